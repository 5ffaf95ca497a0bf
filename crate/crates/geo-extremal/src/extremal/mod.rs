//! Exact computation of the minimum (and maximum) attainable correlation
//! between two Geometric marginals.
//!
//! Under the countermonotone coupling `(F1^-1(U), F2^-1(1-U))` both
//! coordinates are step functions of `u`, constant between the merged
//! breakpoints `alpha_i = 1 - (1-p1)^i` (ascending) and
//! `beta_j = (1-p2)^j` (descending). The mean product is the breakpoint sum
//!
//! ```text
//! E[X1 X2] = sum_m (s_{m+1} - s_m) f1(m) f2(m)
//! ```
//!
//! with `f1(m) = max{ i : alpha_i <= s_m }` and
//! `f2(m) = max{ j : beta_j >= s_{m+1} }`. The grid has
//! `d2 = floor(ln p2 / ln(1-p1))` alphas and `d1 = floor(ln p1 / ln(1-p2))`
//! betas, and is empty when `p1 + p2 >= 1` (one coordinate is always zero).
//! The merge is a single linear pass, so the whole computation is
//! `O(d1 + d2)` power evaluations.

pub mod exact;

use core::fmt;

use crate::error::{Error, Result};
use crate::geom::GeoParam;
use crate::real::{GridScalar, Real};

/// Which computation produced a [`CorrResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComputePath {
    /// Linear merge of the two breakpoint families.
    GeneralEnumeration,
    /// `p1 + p2 >= 1`: one coordinate is always zero, `E[X1 X2] = 0`.
    ClosedFormHalf,
    /// Equal-parameter telescoped closed form (`p < 1/2`).
    ClosedFormEqualP,
    /// Arbitrary-precision rational evaluation of the breakpoint sum.
    ExactRational,
}

impl fmt::Display for ComputePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ComputePath::GeneralEnumeration => "general-enumeration",
            ComputePath::ClosedFormHalf => "closed-form-half",
            ComputePath::ClosedFormEqualP => "closed-form-equal-p",
            ComputePath::ExactRational => "exact-rational",
        };
        f.write_str(s)
    }
}

/// Outcome of an extremal-correlation computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrResult<T> {
    /// `E[X1 X2]` under the coupling.
    pub e_xy: T,
    /// `E[X1 X2] - E[X1] E[X2]`.
    pub covariance: T,
    /// Pearson correlation, clamped to [-1, 1].
    pub rho: T,
    /// Breakpoints enumerated (0 for closed forms over an empty grid).
    pub n_breakpoints: u64,
    pub path: ComputePath,
}

/// Materialized breakpoint grid: the merged order statistics of the
/// `{alpha_i}` and `{beta_j}` with per-interval `(f1, f2)` labels.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakpointGrid<T> {
    /// Sorted points `s_1 <= ... <= s_n`; coincident values stay distinct.
    pub points: Vec<T>,
    /// `(f1, f2)` for each of the `n - 1` intervals.
    pub labels: Vec<(u64, u64)>,
    /// Number of beta points.
    pub d1: u64,
    /// Number of alpha points.
    pub d2: u64,
}

impl<T> BreakpointGrid<T> {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }
}

fn require_nondegenerate<T: Real>(p: GeoParam<T>, name: &'static str) -> Result<()> {
    if p.is_degenerate() {
        Err(Error::DegenerateMarginal { name })
    } else {
        Ok(())
    }
}

/// Grid dimensions `(d2, d1)`: alpha count and beta count. Either being
/// zero means the grid is empty (`p1 + p2 >= 1`).
fn grid_dims<T: GridScalar>(q1: &T, p1: &T, q2: &T, p2: &T) -> (u64, u64) {
    if !(q1 >= p2) || !(q2 >= p1) {
        return (0, 0);
    }
    let d2 = T::count_powers_at_least(q1, p2);
    let d1 = T::count_powers_at_least(q2, p1);
    (d2, d1)
}

/// Linear merge of the alpha and beta families.
///
/// `on_interval(left, right, f1, f2)` is invoked for each of the
/// `d1 + d2 - 1` consecutive intervals; returns the number of points.
fn merge_breakpoints<T: GridScalar>(
    q1: &T,
    q2: &T,
    d2: u64,
    d1: u64,
    mut on_point: impl FnMut(&T),
    mut on_interval: impl FnMut(&T, &T, u64, u64),
) -> u64 {
    if d1 == 0 || d2 == 0 {
        return 0;
    }
    let mut i: u64 = 1; // next alpha index (values ascending)
    let mut j: u64 = d1; // next beta index (consumed in ascending value order)
    let mut f1: u64 = 0;
    let mut next_alpha: Option<T> = Some(T::one() - T::pow_u(q1, 1));
    let mut next_beta: Option<T> = Some(T::pow_u(q2, d1));
    let mut prev: Option<T> = None;
    let mut n: u64 = 0;
    loop {
        // On a tie the alpha is consumed first; the zero-width interval
        // that results contributes nothing to the sum.
        let take_alpha = match (&next_alpha, &next_beta) {
            (Some(a), Some(b)) => a <= b,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        let next = if take_alpha {
            next_alpha.take().unwrap()
        } else {
            next_beta.take().unwrap()
        };
        if let Some(left) = &prev {
            on_interval(left, &next, f1, j);
        }
        if take_alpha {
            f1 += 1;
            i += 1;
            if i <= d2 {
                next_alpha = Some(T::one() - T::pow_u(q1, i));
            }
        } else {
            j -= 1;
            if j >= 1 {
                next_beta = Some(T::pow_u(q2, j));
            }
        }
        on_point(&next);
        prev = Some(next);
        n += 1;
    }
    n
}

/// Breakpoint sum for the countermonotone mean product, streaming (no
/// allocation). Also returns the number of grid points.
pub(crate) fn mean_product_sum<T: GridScalar>(q1: &T, q2: &T, d2: u64, d1: u64) -> (T, u64) {
    let mut acc = T::zero();
    let mut comp = T::zero();
    let n = merge_breakpoints(
        q1,
        q2,
        d2,
        d1,
        |_| {},
        |left, right, f1, f2| {
            let width = right.clone() - left.clone();
            T::add_term(&mut acc, &mut comp, width * T::from_count(f1 * f2));
        },
    );
    (acc + comp, n)
}

/// The merged breakpoint grid for inspection. Empty when `p1 + p2 >= 1`.
///
/// Materializes `d1 + d2` points; use [`mean_product_min`] for large grids.
pub fn breakpoints<T: Real>(p1: GeoParam<T>, p2: GeoParam<T>) -> Result<BreakpointGrid<T>> {
    require_nondegenerate(p1, "p1")?;
    require_nondegenerate(p2, "p2")?;
    let (d2, d1) = grid_dims(&p1.q(), &p1.p(), &p2.q(), &p2.p());
    let mut points = Vec::with_capacity((d1 + d2) as usize);
    let mut labels = Vec::with_capacity((d1 + d2).saturating_sub(1) as usize);
    merge_breakpoints(
        &p1.q(),
        &p2.q(),
        d2,
        d1,
        |s| points.push(*s),
        |_, _, f1, f2| labels.push((f1, f2)),
    );
    Ok(BreakpointGrid { points, labels, d1, d2 })
}

/// `E[X1 X2]` under the countermonotone coupling; 0 when `p1 + p2 >= 1`.
pub fn mean_product_min<T: Real>(p1: GeoParam<T>, p2: GeoParam<T>) -> Result<T> {
    require_nondegenerate(p1, "p1")?;
    require_nondegenerate(p2, "p2")?;
    if p1.p() + p2.p() >= T::one() {
        return Ok(T::zero());
    }
    let (d2, d1) = grid_dims(&p1.q(), &p1.p(), &p2.q(), &p2.p());
    Ok(mean_product_sum(&p1.q(), &p2.q(), d2, d1).0)
}

fn assemble<T: Real>(
    p1: GeoParam<T>,
    p2: GeoParam<T>,
    e_xy: T,
    n_breakpoints: u64,
    path: ComputePath,
) -> CorrResult<T> {
    let m1 = p1.moments();
    let m2 = p2.moments();
    let covariance = e_xy - m1.mean * m2.mean;
    let sigma = (m1.variance * m2.variance).sqrt();
    let rho = (covariance / sigma).max(-T::one()).min(T::one());
    CorrResult { e_xy, covariance, rho, n_breakpoints, path }
}

/// Minimum attainable correlation, by breakpoint enumeration
/// (countermonotone coupling). `p1 + p2 >= 1` short-circuits to the
/// closed-form half case `E[X1 X2] = 0`, giving `rho = -sqrt(q1 q2)`.
pub fn min_corr<T: Real>(p1: GeoParam<T>, p2: GeoParam<T>) -> Result<CorrResult<T>> {
    require_nondegenerate(p1, "p1")?;
    require_nondegenerate(p2, "p2")?;
    if p1.p() + p2.p() >= T::one() {
        return Ok(assemble(p1, p2, T::zero(), 0, ComputePath::ClosedFormHalf));
    }
    let (d2, d1) = grid_dims(&p1.q(), &p1.p(), &p2.q(), &p2.p());
    if d1 == 0 || d2 == 0 {
        return Ok(assemble(p1, p2, T::zero(), 0, ComputePath::ClosedFormHalf));
    }
    let (e_xy, n) = mean_product_sum(&p1.q(), &p2.q(), d2, d1);
    Ok(assemble(p1, p2, e_xy, n, ComputePath::GeneralEnumeration))
}

/// Relative tail tolerance for the comonotone enumeration.
const MAX_CORR_REL_TOL: f64 = 1e-13;
/// Cap on merged grid points for the comonotone enumeration (the grid is
/// infinite; each marginal contributes at most 10^7 points).
const MAX_CORR_STEP_CAP: u64 = 20_000_000;

/// Maximum attainable correlation (comonotone coupling, same uniform).
///
/// Both quantile paths are increasing step functions of `u`; the product is
/// enumerated over the merged grid in the tail scale `t = 1 - u`, truncated
/// once an analytic bound on the remaining integral drops below
/// `1e-13` of the accumulated sum (half the bound is then added back).
/// `rho <= 1`, with equality iff `p1 = p2`.
pub fn max_corr<T: Real>(p1: GeoParam<T>, p2: GeoParam<T>) -> Result<CorrResult<T>> {
    require_nondegenerate(p1, "p1")?;
    require_nondegenerate(p2, "p2")?;
    let (q1, q2) = (p1.q(), p2.q());
    let ln_q1 = (-p1.p()).ln_1p();
    let ln_q2 = (-p2.p()).ln_1p();
    let rel_tol = T::from(MAX_CORR_REL_TOL).unwrap();
    let two = T::from(2.0).unwrap();

    // chi_k(u) <= log_qk(1-u), so the tail past t is bounded by
    // integral_0^t log_q1(s) log_q2(s) ds = t (ln^2 t - 2 ln t + 2) / (ln q1 ln q2).
    let tail_bound = |t: T| -> T {
        if t <= T::zero() {
            return T::zero();
        }
        let l = t.ln();
        t * (l * l - two * l + two) / (ln_q1 * ln_q2)
    };

    let mut sum = T::zero();
    let mut comp = T::zero();
    let mut t_cur = T::one();
    let mut x1: u64 = 0;
    let mut x2: u64 = 0;
    let mut steps: u64 = 0;
    let e_xy = loop {
        let t1 = T::pow_u(&q1, x1 + 1);
        let t2 = T::pow_u(&q2, x2 + 1);
        let t_next = if t1 >= t2 { t1 } else { t2 };
        if x1 > 0 && x2 > 0 {
            T::add_term(&mut sum, &mut comp, (t_cur - t_next) * T::from_count(x1 * x2));
        }
        if t1 >= t2 {
            x1 += 1;
        }
        if t2 >= t1 {
            x2 += 1;
        }
        t_cur = t_next;
        steps += 1;
        let tail = tail_bound(t_cur);
        let total = sum + comp;
        if (total > T::zero() && tail <= rel_tol * total) || steps >= MAX_CORR_STEP_CAP {
            break total + tail / two;
        }
    };
    Ok(assemble(p1, p2, e_xy, steps, ComputePath::GeneralEnumeration))
}

/// Equal-parameter minimum correlation by the telescoped closed form.
///
/// For `p >= 1/2` either coordinate is zero and `rho = p - 1`. For
/// `p < 1/2`, with `q = 1 - p`, `k = floor(log_q(1/2))` and
/// `c_i = max{ j : beta_j >= alpha_i }`:
///
/// ```text
/// E/2 = sum_{i=1}^{k-1} [ c_i (q^i - 1) - q^(c_i+1)/(1-q) ] + R(q, k)
/// ```
///
/// where `R` has three cases selected by comparing `alpha_k` against
/// `beta_{k+1}` and `beta_{k+2}` (exact ties resolve to the lower case).
pub fn min_corr_equal_closed<T: Real>(p: GeoParam<T>) -> Result<CorrResult<T>> {
    require_nondegenerate(p, "p")?;
    let half = T::from(0.5).unwrap();
    let two = T::from(2.0).unwrap();
    if p.p() >= half {
        return Ok(assemble(p, p, T::zero(), 0, ComputePath::ClosedFormHalf));
    }
    let q = p.q();
    let pv = p.p();
    let k = T::count_powers_at_least(&q, &half);
    debug_assert!(k >= 1);

    let mut sum = T::zero();
    let mut comp = T::zero();
    for i in 1..k {
        let alpha_i = T::one() - T::pow_u(&q, i);
        let c_i = T::count_powers_at_least(&q, &alpha_i);
        let term = T::from_count(c_i) * (T::pow_u(&q, i) - T::one())
            - T::pow_u(&q, c_i + 1) / pv;
        T::add_term(&mut sum, &mut comp, term);
    }

    let alpha_k = T::one() - T::pow_u(&q, k);
    let beta_k1 = T::pow_u(&q, k + 1);
    let beta_k2 = T::pow_u(&q, k + 2);
    let kf = T::from_count(k);
    let k_half_sq = kf * kf / two;
    let qk = T::pow_u(&q, k);
    let r = if beta_k1 <= alpha_k {
        // c_k = k
        k_half_sq + kf * (qk - T::one() + beta_k1 / pv) - beta_k1 / pv
    } else if beta_k2 <= alpha_k {
        // c_k = k + 1
        k_half_sq + kf * (beta_k1 + qk - T::one() + beta_k2 / pv) + (qk - T::one())
            - beta_k2 / pv
    } else {
        // c_k = k + 2
        let beta_k3 = T::pow_u(&q, k + 3);
        k_half_sq
            + kf * (beta_k2 + beta_k1 + qk - T::one() + beta_k3 / pv)
            + two * (qk - T::one())
            - beta_k3 / pv
    };
    let e_xy = two * (sum + comp + r);
    let c = T::count_powers_at_least(&q, &pv);
    Ok(assemble(p, p, e_xy, 2 * c, ComputePath::ClosedFormEqualP))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geo(p: f64) -> GeoParam<f64> {
        GeoParam::new(p).unwrap()
    }

    #[test]
    fn quarter_grid_matches_worked_example() {
        let g = breakpoints(geo(0.25), geo(0.25)).unwrap();
        assert_eq!(g.d1, 4);
        assert_eq!(g.d2, 4);
        let expect: Vec<f64> = [64.0, 81.0, 108.0, 112.0, 144.0, 148.0, 175.0, 192.0]
            .iter()
            .map(|n| n / 256.0)
            .collect();
        assert_eq!(g.points, expect);
        assert_eq!(
            g.labels,
            vec![(1, 4), (1, 3), (1, 2), (2, 2), (2, 1), (3, 1), (4, 1)]
        );
    }

    #[test]
    fn grid_is_empty_when_p1_plus_p2_at_least_one() {
        let g = breakpoints(geo(0.6), geo(0.7)).unwrap();
        assert!(g.is_empty());
        assert_eq!((g.d1, g.d2), (0, 0));
    }

    #[test]
    fn small_grid_by_hand() {
        // d1 = d2 = 1: points {0.5, 0.51}, one (1,1) interval
        let g = breakpoints(geo(0.5), geo(0.49)).unwrap();
        assert_eq!(g.points, vec![0.5, 0.51]);
        assert_eq!(g.labels, vec![(1, 1)]);
    }

    #[test]
    fn mean_product_worked_example() {
        let e = mean_product_min(geo(0.25), geo(0.25)).unwrap();
        assert_eq!(e, 442.0 / 256.0);
        assert_eq!(mean_product_min(geo(0.6), geo(0.7)).unwrap(), 0.0);
    }

    #[test]
    fn min_corr_worked_example() {
        let r = min_corr(geo(0.25), geo(0.25)).unwrap();
        assert!((r.rho - (-1862.0 / 3072.0)).abs() < 1e-14);
        assert_eq!(r.n_breakpoints, 8);
        assert_eq!(r.path, ComputePath::GeneralEnumeration);
        assert_eq!(r.e_xy, 442.0 / 256.0);
        assert!((r.covariance - (442.0 / 256.0 - 9.0)).abs() < 1e-14);
    }

    #[test]
    fn min_corr_half_line() {
        let r = min_corr(geo(0.5), geo(0.5)).unwrap();
        assert!((r.rho - (-0.5)).abs() < 1e-15);
        assert_eq!(r.path, ComputePath::ClosedFormHalf);
        assert_eq!(r.n_breakpoints, 0);
    }

    #[test]
    fn min_corr_unequal_half_case() {
        // e_xy = 0 so rho = -sqrt(q1 q2) = -sqrt(0.12)
        let r = min_corr(geo(0.6), geo(0.7)).unwrap();
        assert!((r.rho - (-0.34641016151377546)).abs() < 1e-15);
    }

    #[test]
    fn degenerate_marginal_rejected() {
        assert!(matches!(
            min_corr(geo(1.0), geo(0.5)),
            Err(Error::DegenerateMarginal { name: "p1" })
        ));
        assert!(matches!(
            max_corr(geo(0.5), geo(1.0)),
            Err(Error::DegenerateMarginal { name: "p2" })
        ));
        assert!(min_corr_equal_closed(geo(1.0)).is_err());
    }

    #[test]
    fn max_corr_equal_parameters_is_one() {
        for &p in &[0.05, 0.25, 0.5, 0.9] {
            let r = max_corr(geo(p), geo(p)).unwrap();
            assert!((r.rho - 1.0).abs() <= 1e-12, "p={p} rho={}", r.rho);
        }
    }

    #[test]
    fn max_corr_matches_fh_upper_sum() {
        // E[X1 X2] = sum_{i,j>=1} min(q1^i, q2^j) under the comonotone coupling.
        let (p1, p2) = (0.3, 0.6);
        let (q1, q2): (f64, f64) = (0.7, 0.4);
        let mut expect = 0.0;
        for i in 1..500 {
            let t = (i as f64 * q1.ln() / q2.ln()).floor() as i32;
            expect += t as f64 * q1.powi(i) + q2.powi(t + 1) / (1.0 - q2);
        }
        let r = max_corr(geo(p1), geo(p2)).unwrap();
        assert!(
            (r.e_xy - expect).abs() <= 1e-10 * expect,
            "e_xy={} expect={expect}",
            r.e_xy
        );
        assert!(r.rho > 0.0 && r.rho < 1.0);
    }

    #[test]
    fn closed_form_reproduces_worked_example() {
        let r = min_corr_equal_closed(geo(0.25)).unwrap();
        assert_eq!(r.e_xy, 442.0 / 256.0);
        assert!((r.rho - (-1862.0 / 3072.0)).abs() < 1e-14);
        assert_eq!(r.path, ComputePath::ClosedFormEqualP);
    }

    #[test]
    fn closed_form_half_branch() {
        let r = min_corr_equal_closed(geo(0.75)).unwrap();
        assert_eq!(r.e_xy, 0.0);
        assert!((r.rho - (-0.25)).abs() < 1e-15);
        assert_eq!(r.path, ComputePath::ClosedFormHalf);
    }

    #[test]
    fn closed_form_matches_engine() {
        for &p in &[0.1, 0.22, 0.35, 0.41, 0.49, 0.011] {
            let a = min_corr_equal_closed(geo(p)).unwrap().rho;
            let b = min_corr(geo(p), geo(p)).unwrap().rho;
            assert!((a - b).abs() <= 1e-10, "p={p} closed={a} engine={b}");
        }
    }

    #[test]
    fn rho_is_covariance_over_sigma() {
        let r = min_corr(geo(0.2), geo(0.35)).unwrap();
        let m1 = geo(0.2).moments();
        let m2 = geo(0.35).moments();
        let expect = r.covariance / (m1.variance * m2.variance).sqrt();
        assert!((r.rho - expect).abs() < 1e-15);
    }

    #[test]
    fn works_in_f32() {
        let p = GeoParam::<f32>::new(0.25).unwrap();
        let r = min_corr(p, p).unwrap();
        assert!((r.rho - (-0.606_12_f32)).abs() < 1e-4);
    }
}
