//! Independent verification: Monte Carlo sampling at the extremal couplings
//! and deterministic quadrature of the step-function integral.
//!
//! The quadrature path evaluates `chi1(u) = floor(log_{1-p1}(1-u))` and
//! `chi2(u) = floor(log_{1-p2}(u))` pointwise (the same safeguarded floor
//! used by the quantile) and never merges power grids, so its failure modes
//! are independent of the breakpoint engine it cross-checks.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geom::GeoParam;
use crate::real::{pow_count_ge, pow_count_gt};
use crate::rng::SplitMix64;

/// How the two uniforms driving the inverse transforms relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// `(F1^-1(U), F2^-1(1-U))`: attains the minimum correlation.
    Countermonotone,
    /// `(F1^-1(U), F2^-1(U))`: attains the maximum correlation.
    Comonotone,
    /// Independent coordinates.
    Independent,
}

impl core::fmt::Display for Coupling {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            Coupling::Countermonotone => "countermonotone",
            Coupling::Comonotone => "comonotone",
            Coupling::Independent => "independent",
        };
        f.write_str(s)
    }
}

impl FromStr for Coupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "countermonotone" => Ok(Coupling::Countermonotone),
            "comonotone" => Ok(Coupling::Comonotone),
            "independent" => Ok(Coupling::Independent),
            _ => Err(Error::OutOfDomain {
                what: "coupling must be countermonotone, comonotone or independent",
            }),
        }
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// Sample Pearson correlation.
    pub mean: f64,
    /// Large-sample (delta-method) standard error, from the same sample.
    pub std_error: f64,
    pub n: u64,
    pub seed: u64,
}

/// Split the 53 significand bits of `u` by parity into two shorter
/// uniforms; used by the `Independent` coupling so that a pair is still a
/// deterministic function of one uniform.
#[inline]
fn split_uniform(u: f64) -> (f64, f64) {
    let m = (u * 9_007_199_254_740_992.0) as u64; // 2^53
    let mut a: u64 = 0;
    let mut b: u64 = 0;
    for k in 0..27 {
        a |= ((m >> (2 * k)) & 1) << k;
    }
    for k in 0..26 {
        b |= ((m >> (2 * k + 1)) & 1) << k;
    }
    (
        (a as f64 + 0.5) / 134_217_728.0, // 2^27
        (b as f64 + 0.5) / 67_108_864.0,  // 2^26
    )
}

/// One coupled pair by inverse transform; deterministic given `(u, coupling)`.
pub fn sample_pair(
    p1: GeoParam<f64>,
    p2: GeoParam<f64>,
    u: f64,
    coupling: Coupling,
) -> Result<(u64, u64)> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidUniform { value: u });
    }
    // quantile_from_tail(t) inverts the cdf at u = 1 - t.
    Ok(match coupling {
        Coupling::Countermonotone => {
            (p1.quantile_from_tail(1.0 - u), p2.quantile_from_tail(u))
        }
        Coupling::Comonotone => {
            (p1.quantile_from_tail(1.0 - u), p2.quantile_from_tail(1.0 - u))
        }
        Coupling::Independent => {
            let (ua, ub) = split_uniform(u);
            (p1.quantile_from_tail(1.0 - ua), p2.quantile_from_tail(1.0 - ub))
        }
    })
}

/// Samples are drawn in fixed-size shards with sub-seeds derived from
/// `(seed, shard index)`, so a future parallel fold merges to the same sums.
const SHARD: u64 = 1 << 16;

fn for_each_pair(
    p1: GeoParam<f64>,
    p2: GeoParam<f64>,
    n: u64,
    seed: u64,
    coupling: Coupling,
    mut visit: impl FnMut(f64, f64),
) {
    let shards = n.div_ceil(SHARD);
    for s in 0..shards {
        let mut rng = SplitMix64::new(SplitMix64::derive(seed, s));
        let count = SHARD.min(n - s * SHARD);
        for _ in 0..count {
            let u = rng.next_f64();
            let (x, y) = sample_pair(p1, p2, u, coupling).expect("u in (0,1)");
            visit(x as f64, y as f64);
        }
    }
}

/// Sample Pearson correlation of `n` coupled pairs, reproducible from the
/// seed. Needs `n >= 1000` for the large-sample standard error to make
/// sense. If a sampled marginal is constant the estimate is `NaN` with
/// infinite standard error.
pub fn mc_corr(
    p1: GeoParam<f64>,
    p2: GeoParam<f64>,
    n: u64,
    seed: u64,
    coupling: Coupling,
) -> Result<McEstimate> {
    if p1.is_degenerate() {
        return Err(Error::DegenerateMarginal { name: "p1" });
    }
    if p2.is_degenerate() {
        return Err(Error::DegenerateMarginal { name: "p2" });
    }
    if n < 1000 {
        return Err(Error::OutOfDomain { what: "mc_corr requires n >= 1000" });
    }

    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for_each_pair(p1, p2, n, seed, coupling, |x, y| {
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    });
    let nf = n as f64;
    let mx = sx / nf;
    let my = sy / nf;
    let vx = (sxx / nf - mx * mx).max(0.0);
    let vy = (syy / nf - my * my).max(0.0);
    if vx == 0.0 || vy == 0.0 {
        return Ok(McEstimate { mean: f64::NAN, std_error: f64::INFINITY, n, seed });
    }
    let r = (sxy / nf - mx * my) / (vx * vy).sqrt();

    // Influence function of r at a standardized point (u, v):
    // uv - (r/2)(u^2 + v^2); Var(r) ~ E[IF^2]/n.
    let (sdx, sdy) = (vx.sqrt(), vy.sqrt());
    let mut sum_if2 = 0.0;
    for_each_pair(p1, p2, n, seed, coupling, |x, y| {
        let u = (x - mx) / sdx;
        let v = (y - my) / sdy;
        let inf = u * v - 0.5 * r * (u * u + v * v);
        sum_if2 += inf * inf;
    });
    Ok(McEstimate { mean: r, std_error: sum_if2.sqrt() / nf, n, seed })
}

/// `chi1` just right of `u` (right-continuous value).
#[inline]
fn chi1_right(q1: f64, u: f64) -> u64 {
    pow_count_ge(q1, 1.0 - u)
}

/// `chi1` just left of `u`.
#[inline]
fn chi1_left(q1: f64, u: f64) -> u64 {
    pow_count_gt(q1, 1.0 - u)
}

/// `chi2` just right of `u`.
#[inline]
fn chi2_right(q2: f64, u: f64) -> u64 {
    pow_count_gt(q2, u)
}

/// `chi2` just left of `u` (left-continuous value).
#[inline]
fn chi2_left(q2: f64, u: f64) -> u64 {
    pow_count_ge(q2, u)
}

/// `E[X1 X2] = integral_0^1 chi1(u) chi2(u) du` by adaptive interval
/// splitting, independent of the breakpoint engine.
///
/// Both factors are monotone step functions, so an interval on which the
/// one-sided values agree at both ends carries an exactly known integrand;
/// other intervals are split at the midpoint until that holds (or the
/// width reaches float resolution), so successive refinements change the
/// result by strictly less than the 1e-10 target.
pub fn quad_mean_product(p1: GeoParam<f64>, p2: GeoParam<f64>) -> Result<f64> {
    if p1.is_degenerate() {
        return Err(Error::DegenerateMarginal { name: "p1" });
    }
    if p2.is_degenerate() {
        return Err(Error::DegenerateMarginal { name: "p2" });
    }
    // The integrand vanishes outside [p1, 1 - p2].
    let lo = p1.p();
    let hi = p2.q();
    if lo >= hi {
        return Ok(0.0);
    }
    let (q1, q2) = (p1.q(), p2.q());

    fn rec(q1: f64, q2: f64, a: f64, b: f64, depth: u32) -> f64 {
        let v1a = chi1_right(q1, a);
        let v1b = chi1_left(q1, b);
        let v2a = chi2_right(q2, a);
        let v2b = chi2_left(q2, b);
        if v1a == v1b && v2a == v2b {
            return (b - a) * (v1a as f64) * (v2a as f64);
        }
        let mid = 0.5 * (a + b);
        if depth >= 80 || mid <= a || mid >= b {
            return (b - a) * (chi1_right(q1, mid) as f64) * (chi2_left(q2, mid) as f64);
        }
        rec(q1, q2, a, mid, depth + 1) + rec(q1, q2, mid, b, depth + 1)
    }

    Ok(rec(q1, q2, lo, hi, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::{mean_product_min, min_corr};

    fn geo(p: f64) -> GeoParam<f64> {
        GeoParam::new(p).unwrap()
    }

    #[test]
    fn coupling_names_round_trip() {
        for c in [Coupling::Countermonotone, Coupling::Comonotone, Coupling::Independent] {
            assert_eq!(c.to_string().parse::<Coupling>().unwrap(), c);
        }
        assert!("banana".parse::<Coupling>().is_err());
    }

    #[test]
    fn sample_pair_examples() {
        // F^-1(0.3) = 0; F^-1(0.7): cdf(0) = 0.5 < 0.7 <= cdf(1) = 0.75
        assert_eq!(
            sample_pair(geo(0.5), geo(0.5), 0.3, Coupling::Countermonotone).unwrap(),
            (0, 1)
        );
        assert_eq!(
            sample_pair(geo(0.5), geo(0.5), 0.3, Coupling::Comonotone).unwrap(),
            (0, 0)
        );
        // interval [112/256, 144/256] of the worked example carries (2, 2)
        assert_eq!(
            sample_pair(geo(0.25), geo(0.25), 0.5, Coupling::Countermonotone).unwrap(),
            (2, 2)
        );
    }

    #[test]
    fn sample_pair_rejects_bad_uniform() {
        for &u in &[0.0, 1.0, -0.5, 1.5, f64::NAN] {
            assert!(sample_pair(geo(0.5), geo(0.5), u, Coupling::Comonotone).is_err());
        }
    }

    #[test]
    fn comonotone_equal_marginals_move_together() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..1000 {
            let u = rng.next_f64();
            let (x, y) = sample_pair(geo(0.3), geo(0.3), u, Coupling::Comonotone).unwrap();
            assert_eq!(x, y);
        }
    }

    #[test]
    fn countermonotone_half_kills_one_coordinate() {
        let mut rng = SplitMix64::new(6);
        for _ in 0..1000 {
            let u = rng.next_f64();
            let (x, y) = sample_pair(geo(0.5), geo(0.5), u, Coupling::Countermonotone).unwrap();
            assert!(x == 0 || y == 0);
        }
    }

    #[test]
    fn mc_is_deterministic_per_seed() {
        let a = mc_corr(geo(0.3), geo(0.4), 10_000, 99, Coupling::Countermonotone).unwrap();
        let b = mc_corr(geo(0.3), geo(0.4), 10_000, 99, Coupling::Countermonotone).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let c = mc_corr(geo(0.3), geo(0.4), 10_000, 100, Coupling::Countermonotone).unwrap();
        assert_ne!(a.mean.to_bits(), c.mean.to_bits());
    }

    #[test]
    fn mc_requires_enough_samples() {
        assert!(mc_corr(geo(0.3), geo(0.4), 10, 1, Coupling::Comonotone).is_err());
    }

    #[test]
    fn mc_countermonotone_matches_engine_at_half() {
        let est = mc_corr(geo(0.5), geo(0.5), 200_000, 42, Coupling::Countermonotone).unwrap();
        assert!((est.mean - (-0.5)).abs() <= 4.0 * est.std_error, "{est:?}");
    }

    #[test]
    fn mc_independent_is_uncorrelated() {
        let est = mc_corr(geo(0.3), geo(0.3), 200_000, 7, Coupling::Independent).unwrap();
        assert!(est.mean.abs() <= 4.0 * est.std_error, "{est:?}");
    }

    #[test]
    fn quad_worked_example() {
        let e = quad_mean_product(geo(0.25), geo(0.25)).unwrap();
        assert!((e - 442.0 / 256.0).abs() <= 1e-9);
    }

    #[test]
    fn quad_half_case_is_zero() {
        let e = quad_mean_product(geo(0.6), geo(0.7)).unwrap();
        assert!(e.abs() <= 1e-12);
    }

    #[test]
    fn quad_agrees_with_engine() {
        let e1 = quad_mean_product(geo(0.1), geo(0.2)).unwrap();
        let e2 = mean_product_min(geo(0.1), geo(0.2)).unwrap();
        assert!((e1 - e2).abs() <= 1e-9, "quad={e1} engine={e2}");
    }

    #[test]
    fn mc_degenerate_sample_reports_nan() {
        // P(X1 > 0) = 1e-9: every draw of the first coordinate is 0.
        let est =
            mc_corr(geo(1.0 - 1e-9), geo(0.5), 2000, 3, Coupling::Countermonotone).unwrap();
        assert!(est.mean.is_nan());
        assert!(est.std_error.is_infinite());
        let r = min_corr(geo(1.0 - 1e-9), geo(0.5)).unwrap();
        assert!(r.rho.abs() < 1e-4);
    }
}
