//! Extremal correlation for bivariate Geometric distributions.
//!
//! Computes the exact minimum (and maximum) Pearson correlation attainable
//! between `Geo(p1)` and `Geo(p2)` marginals, together with analytic
//! bounds, the derivative-discontinuity locations of the equal-parameter
//! minimum, and independent verification oracles (exact rational
//! arithmetic, adaptive quadrature, coupled Monte Carlo).
//!
//! ```
//! use geo_extremal::{min_corr, GeoParam64};
//!
//! let p = GeoParam64::new(0.25).unwrap();
//! let r = min_corr(p, p).unwrap();
//! assert!((r.rho - (-1862.0 / 3072.0)).abs() < 1e-12);
//! ```
//!
//! The numeric core is generic over the scalar: [`real::Real`] covers
//! `f32`/`f64`, and the breakpoint sum is additionally instantiated at
//! [`num_rational::BigRational`] for the exact mode. The `*64` aliases
//! below are the default precision.

pub mod analytic;
pub mod error;
pub mod extremal;
pub mod geom;
pub mod oracle;
pub mod real;
pub mod rng;

pub use analytic::{
    bound_pair, enumerate_kinks, kink_root, log_envelope, min_corr_slope_jump, upper_bound_g,
    BoundPair, KinkPoint,
};
pub use error::{Error, Result};
pub use extremal::exact::{
    mean_product_min_exact, mean_product_min_exact_with_budget, min_corr_exact,
    min_corr_exact_with_budget, natural_denominator, ExactCorr, RationalProb,
    DEFAULT_BIT_BUDGET,
};
pub use extremal::{
    breakpoints, max_corr, mean_product_min, min_corr, min_corr_equal_closed, BreakpointGrid,
    ComputePath, CorrResult,
};
pub use geom::{GeoParam, Moments};
pub use oracle::{mc_corr, quad_mean_product, sample_pair, Coupling, McEstimate};
pub use rng::SplitMix64;

/// Default-precision aliases.
pub type GeoParam64 = GeoParam<f64>;
pub type Moments64 = Moments<f64>;
pub type CorrResult64 = CorrResult<f64>;
pub type BreakpointGrid64 = BreakpointGrid<f64>;
pub type BoundPair64 = BoundPair<f64>;
pub type KinkPoint64 = KinkPoint<f64>;

/// Single-precision aliases.
pub type GeoParam32 = GeoParam<f32>;
pub type Moments32 = Moments<f32>;
pub type CorrResult32 = CorrResult<f32>;
pub type BreakpointGrid32 = BreakpointGrid<f32>;
pub type BoundPair32 = BoundPair<f32>;
pub type KinkPoint32 = KinkPoint<f32>;
