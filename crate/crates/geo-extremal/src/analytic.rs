//! Closed-form bounds on the minimum correlation and the locations of its
//! derivative discontinuities.
//!
//! The upper bound comes from `floor(ab) <= ab` applied inside the
//! countermonotone integral; the lower bound couples each Geometric with a
//! conditioned exponential remainder so that the exponential minimum
//! correlation `1 - pi^2/6` applies. At equal parameters the derivative of
//! `p -> rho_-(p, p)` jumps exactly where some `alpha_i = beta_j`, i.e. at
//! `p = 1 - x` with `x^i (1 + x^c) = 1`; the `c = 0` family is the set of
//! roots of 1/2.

use crate::error::{Error, Result};
use crate::extremal::min_corr;
use crate::geom::GeoParam;
use crate::real::Real;

/// Analytic lower/upper bounds on the minimum correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPair<T> {
    pub lower: T,
    pub upper: T,
}

/// A solved root of `x^i (1 + x^c) = 1`, a derivative-discontinuity
/// location of `rho_-(p, p)` at `p = 1 - x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinkPoint<T> {
    pub i: u32,
    pub c: u32,
    pub x: T,
    pub p: T,
}

fn require_nondegenerate<T: Real>(p: GeoParam<T>, name: &'static str) -> Result<()> {
    if p.is_degenerate() {
        Err(Error::DegenerateMarginal { name })
    } else {
        Ok(())
    }
}

/// `2 - pi^2/6`.
fn two_minus_zeta2<T: Real>() -> T {
    let two = T::from(2.0).unwrap();
    let six = T::from(6.0).unwrap();
    two - T::PI() * T::PI() / six
}

/// Upper bound `g(p1, p2)` on the minimum correlation:
///
/// ```text
/// g = [p1/ln(1-p1)] [p2/ln(1-p2)] / sqrt(q1 q2) * (2 - pi^2/6) - sqrt(q1 q2)
/// ```
pub fn upper_bound_g<T: Real>(p1: GeoParam<T>, p2: GeoParam<T>) -> Result<T> {
    require_nondegenerate(p1, "p1")?;
    require_nondegenerate(p2, "p2")?;
    let a = p1.p() / (-p1.p()).ln_1p();
    let b = p2.p() / (-p2.p()).ln_1p();
    let s = (p1.q() * p2.q()).sqrt();
    Ok(a * b / s * two_minus_zeta2() - s)
}

/// Two-sided bounds: `upper = g(p1, p2)` and
/// `lower = g - (1/2) sqrt(q1/q2) p2 - (1/2) sqrt(q2/q1) p1`,
/// which at `p1 = p2 = p` reduces to `[g(p) - p, g(p)]`.
pub fn bound_pair<T: Real>(p1: GeoParam<T>, p2: GeoParam<T>) -> Result<BoundPair<T>> {
    let g = upper_bound_g(p1, p2)?;
    let half = T::from(0.5).unwrap();
    let lower = g
        - half * (p1.q() / p2.q()).sqrt() * p2.p()
        - half * (p2.q() / p1.q()).sqrt() * p1.p();
    Ok(BoundPair { lower, upper: g })
}

/// Chord/series envelope of `-p/ln(1-p)` on (0, 1/2]:
///
/// ```text
/// 1 - (2 - 1/ln 2) p  <=  -p/ln(1-p)  <=  1 - p/2 - p^2/12
/// ```
///
/// The lower bound is attained exactly at `p = 1/2`.
pub fn log_envelope<T: Real>(p: GeoParam<T>) -> Result<BoundPair<T>> {
    let half = T::from(0.5).unwrap();
    if p.p() > half {
        return Err(Error::OutOfDomain { what: "log_envelope requires p <= 1/2" });
    }
    let two = T::from(2.0).unwrap();
    let twelve = T::from(12.0).unwrap();
    let lower = T::one() - (two - T::LN_2().recip()) * p.p();
    let upper = T::one() - p.p() / two - p.p() * p.p() / twelve;
    Ok(BoundPair { lower, upper })
}

/// The unique positive root of `x^i (1 + x^c) = 1`.
///
/// For `c = 0` this is `(1/2)^(1/i)` directly; for `c >= 1` the root is
/// bisected inside the guaranteed bracket `((1/2)^(1/i), (1/2)^(1/(i+c)))`.
pub fn kink_root<T: Real>(i: u32, c: u32) -> KinkPoint<T> {
    assert!(i >= 1, "kink_root requires i >= 1");
    let half = T::from(0.5).unwrap();
    let x = if c == 0 {
        half.powf(T::from(i).unwrap().recip())
    } else {
        let f = |x: T| {
            T::pow_u(&x, i as u64) * (T::one() + T::pow_u(&x, c as u64)) - T::one()
        };
        let mut lo = half.powf(T::from(i).unwrap().recip());
        let mut hi = half.powf(T::from(i + c).unwrap().recip());
        debug_assert!(f(lo) < T::zero() && f(hi) > T::zero());
        for _ in 0..200 {
            let mid = (lo + hi) / T::from(2.0).unwrap();
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) < T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo + hi) / T::from(2.0).unwrap()
    };
    KinkPoint { i, c, x, p: T::one() - x }
}

/// All distinct kink locations with `p >= p_min`, sorted by descending `p`.
///
/// `i` is bounded by the `c = 0` family (`(1/2)^(1/i) <= 1 - p_min`) and
/// `c` is swept upward until the root's `p` drops below `p_min`; roots
/// shared by several `(i, c)` pairs are deduplicated at `1e-12` in `x`.
pub fn enumerate_kinks<T: Real>(p_min: T) -> Result<Vec<KinkPoint<T>>> {
    let half = T::from(0.5).unwrap();
    if !(p_min > T::zero()) || p_min > half {
        return Err(Error::OutOfDomain { what: "enumerate_kinks requires 0 < p_min <= 1/2" });
    }
    let x_max = T::one() - p_min;
    let mut found: Vec<KinkPoint<T>> = Vec::new();
    let mut i: u32 = 1;
    loop {
        if half.powf(T::from(i).unwrap().recip()) > x_max {
            break;
        }
        let mut c: u32 = 0;
        loop {
            let root = kink_root::<T>(i, c);
            if root.x > x_max {
                break;
            }
            found.push(root);
            c += 1;
            if c > 10_000 {
                break;
            }
        }
        i += 1;
    }
    // Ascending x = descending p; ties keep the smallest (i, c).
    found.sort_by(|a, b| {
        a.x.partial_cmp(&b.x)
            .unwrap()
            .then(a.i.cmp(&b.i))
            .then(a.c.cmp(&b.c))
    });
    let tol = T::from(1e-12).unwrap().max(T::epsilon() * T::from(4.0).unwrap());
    found.dedup_by(|b, a| (b.x - a.x).abs() <= tol);
    Ok(found)
}

/// Difference of the one-sided finite-difference slopes of
/// `p -> rho_-(p, p)` across `p` with step `h` (absolute value).
pub fn min_corr_slope_jump<T: Real>(p: T, h: T) -> Result<T> {
    let rho = |x: T| -> Result<T> {
        let g = GeoParam::new(x)?;
        Ok(min_corr(g, g)?.rho)
    };
    let left = (rho(p)? - rho(p - h)?) / h;
    let right = (rho(p + h)? - rho(p)?) / h;
    Ok((right - left).abs())
}
