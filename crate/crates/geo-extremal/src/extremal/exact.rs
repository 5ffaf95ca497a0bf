//! Exact-rational evaluation of the breakpoint sum.
//!
//! When both parameters are rational every breakpoint
//! `alpha_i = 1 - q1^i`, `beta_j = q2^j` is rational, so the mean product
//! is a finite sum of exact fractions. This is the validation mode the
//! floating-point engine is checked against; a denominator bit budget
//! guards against `denom^d` blowup for small or high-denominator
//! parameters.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use super::{mean_product_sum, ComputePath};
use crate::error::{Error, Result};
use crate::real::GridScalar;

/// Default denominator bit budget for the exact mode.
pub const DEFAULT_BIT_BUDGET: u64 = 4096;

impl GridScalar for BigRational {
    fn from_count(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn pow_u(base: &Self, exp: u64) -> Self {
        if exp == 0 {
            return BigRational::one();
        }
        debug_assert!(exp <= u32::MAX as u64);
        let e = exp as u32;
        // Powers of a reduced fraction stay reduced.
        BigRational::new_raw(Pow::pow(base.numer(), e), Pow::pow(base.denom(), e))
    }

    fn count_powers_at_least(base: &Self, target: &Self) -> u64 {
        debug_assert!(base.is_positive() && base < &BigRational::one());
        debug_assert!(target.is_positive() && target <= &BigRational::one());
        let bf = base.to_f64().unwrap_or(0.5);
        let tf = target.to_f64().unwrap_or(0.5);
        let mut g = (tf.ln() / bf.ln()).floor() as i64;
        if g < 0 {
            g = 0;
        }
        // The float guess is corrected by exact comparisons.
        while Self::pow_u(base, (g + 1) as u64) >= *target {
            g += 1;
        }
        while g > 0 && Self::pow_u(base, g as u64) < *target {
            g -= 1;
        }
        g as u64
    }
}

/// A probability as an exact reduced fraction in (0, 1].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalProb(BigRational);

impl RationalProb {
    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::OutOfDomain { what: "fraction denominator must be nonzero" });
        }
        Self::from_ratio(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_ratio(r: BigRational) -> Result<Self> {
        if !r.is_positive() || r > BigRational::one() {
            return Err(Error::OutOfDomain { what: "fraction must lie in (0, 1]" });
        }
        Ok(Self(r))
    }

    pub fn ratio(&self) -> &BigRational {
        &self.0
    }

    /// `q = 1 - p` as an exact fraction.
    pub fn complement(&self) -> BigRational {
        BigRational::one() - &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }
}

/// `(d2, d1)` exactly, or `(0, 0)` when `p1 + p2 >= 1`.
fn exact_dims(p1: &RationalProb, p2: &RationalProb) -> (u64, u64) {
    if p1.ratio() + p2.ratio() >= BigRational::one() {
        return (0, 0);
    }
    let q1 = p1.complement();
    let q2 = p2.complement();
    let d2 = <BigRational as GridScalar>::count_powers_at_least(&q1, p2.ratio());
    let d1 = <BigRational as GridScalar>::count_powers_at_least(&q2, p1.ratio());
    (d2, d1)
}

fn check_budget(p1: &RationalProb, p2: &RationalProb, d2: u64, d1: u64, budget: u64) -> Result<()> {
    let required = d2 * p1.ratio().denom().bits() + d1 * p2.ratio().denom().bits();
    if required > budget {
        return Err(Error::BudgetExceeded { required_bits: required, budget_bits: budget });
    }
    Ok(())
}

/// Exact `E[X1 X2]` under the countermonotone coupling; 0 when `p1 + p2 >= 1`.
pub fn mean_product_min_exact(p1: &RationalProb, p2: &RationalProb) -> Result<BigRational> {
    mean_product_min_exact_with_budget(p1, p2, DEFAULT_BIT_BUDGET)
}

pub fn mean_product_min_exact_with_budget(
    p1: &RationalProb,
    p2: &RationalProb,
    budget_bits: u64,
) -> Result<BigRational> {
    let (d2, d1) = exact_dims(p1, p2);
    if d1 == 0 || d2 == 0 {
        return Ok(BigRational::zero());
    }
    check_budget(p1, p2, d2, d1, budget_bits)?;
    let q1 = p1.complement();
    let q2 = p2.complement();
    Ok(mean_product_sum(&q1, &q2, d2, d1).0)
}

/// Exact correlation summary. `rho` is `Some` only when `sigma1 sigma2`
/// is rational, i.e. when `q1 q2` is a perfect rational square (always
/// the case for `p1 = p2`).
#[derive(Debug, Clone, PartialEq)]
pub struct ExactCorr {
    pub e_xy: BigRational,
    pub covariance: BigRational,
    pub rho: Option<BigRational>,
    pub n_breakpoints: u64,
    pub path: ComputePath,
}

fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let ns = r.numer().sqrt();
    let ds = r.denom().sqrt();
    if &ns * &ns == *r.numer() && &ds * &ds == *r.denom() {
        Some(BigRational::new_raw(ns, ds))
    } else {
        None
    }
}

pub fn min_corr_exact(p1: &RationalProb, p2: &RationalProb) -> Result<ExactCorr> {
    min_corr_exact_with_budget(p1, p2, DEFAULT_BIT_BUDGET)
}

pub fn min_corr_exact_with_budget(
    p1: &RationalProb,
    p2: &RationalProb,
    budget_bits: u64,
) -> Result<ExactCorr> {
    if p1.is_one() {
        return Err(Error::DegenerateMarginal { name: "p1" });
    }
    if p2.is_one() {
        return Err(Error::DegenerateMarginal { name: "p2" });
    }
    let (d2, d1) = exact_dims(p1, p2);
    let e_xy = if d1 == 0 || d2 == 0 {
        BigRational::zero()
    } else {
        check_budget(p1, p2, d2, d1, budget_bits)?;
        mean_product_sum(&p1.complement(), &p2.complement(), d2, d1).0
    };
    let q1 = p1.complement();
    let q2 = p2.complement();
    let mu = (&q1 / p1.ratio()) * (&q2 / p2.ratio());
    let covariance = &e_xy - mu;
    // sigma1 sigma2 = sqrt(q1 q2) / (p1 p2)
    let rho = exact_sqrt(&(&q1 * &q2))
        .map(|s| &covariance * (p1.ratio() * p2.ratio()) / s);
    Ok(ExactCorr {
        e_xy,
        covariance,
        rho,
        n_breakpoints: d1 + d2,
        path: ComputePath::ExactRational,
    })
}

/// Common denominator of every grid point:
/// `lcm(denom(q1)^d2, denom(q2)^d1)`. Display helper for reporting exact
/// values over the grid's natural denominator instead of in lowest terms.
pub fn natural_denominator(p1: &RationalProb, p2: &RationalProb) -> BigInt {
    let (d2, d1) = exact_dims(p1, p2);
    if d1 == 0 || d2 == 0 {
        return BigInt::one();
    }
    let a = Pow::pow(p1.complement().denom(), d2 as u32);
    let b = Pow::pow(p2.complement().denom(), d1 as u32);
    a.lcm(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(n: u64, d: u64) -> RationalProb {
        RationalProb::new(n, d).unwrap()
    }

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn worked_example_is_exact() {
        let e = mean_product_min_exact(&frac(1, 4), &frac(1, 4)).unwrap();
        assert_eq!(e, big(442, 256));
    }

    #[test]
    fn half_third_regression() {
        // Single interval (1/2, 2/3) with labels (1,1): width 1/6.
        let e = mean_product_min_exact(&frac(1, 2), &frac(1, 3)).unwrap();
        assert_eq!(e, big(1, 6));
    }

    #[test]
    fn half_case_is_zero() {
        let e = mean_product_min_exact(&frac(3, 5), &frac(7, 10)).unwrap();
        assert!(e.is_zero());
    }

    #[test]
    fn budget_guard_trips() {
        let err = mean_product_min_exact_with_budget(&frac(1, 97), &frac(1, 97), 64);
        assert!(matches!(err, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn float_engine_agrees_with_exact() {
        use crate::extremal::mean_product_min;
        use crate::geom::GeoParam;
        for &(n1, d1, n2, d2) in &[(1u64, 4u64, 1u64, 4u64), (1, 3, 1, 5), (2, 7, 3, 11), (1, 10, 1, 2)] {
            let exact = mean_product_min_exact(&frac(n1, d1), &frac(n2, d2)).unwrap();
            let ef = exact.to_f64().unwrap();
            let f = mean_product_min(
                GeoParam::new(n1 as f64 / d1 as f64).unwrap(),
                GeoParam::new(n2 as f64 / d2 as f64).unwrap(),
            )
            .unwrap();
            assert!(
                (f - ef).abs() <= 1e-12 * ef.abs().max(1.0),
                "{n1}/{d1} {n2}/{d2}: float {f} exact {ef}"
            );
        }
    }

    #[test]
    fn exact_corr_quarter() {
        let r = min_corr_exact(&frac(1, 4), &frac(1, 4)).unwrap();
        assert_eq!(r.e_xy, big(442, 256));
        assert_eq!(r.rho, Some(big(-1862, 3072)));
        assert_eq!(r.n_breakpoints, 8);
        assert_eq!(r.path, ComputePath::ExactRational);
    }

    #[test]
    fn exact_rho_absent_when_sigma_irrational() {
        let r = min_corr_exact(&frac(1, 4), &frac(1, 3)).unwrap();
        assert!(r.rho.is_none());
        // q1 q2 = 3/4 * 1/2 = 3/8, not a square
        assert!(!r.e_xy.is_zero());
    }

    #[test]
    fn degenerate_rejected() {
        assert!(min_corr_exact(&frac(1, 1), &frac(1, 2)).is_err());
    }

    #[test]
    fn natural_denominator_quarter() {
        assert_eq!(natural_denominator(&frac(1, 4), &frac(1, 4)), BigInt::from(256));
    }

    #[test]
    fn rational_prob_validation() {
        assert!(RationalProb::new(0, 4).is_err());
        assert!(RationalProb::new(5, 4).is_err());
        assert!(RationalProb::new(1, 0).is_err());
        assert!(RationalProb::new(4, 4).unwrap().is_one());
    }
}
