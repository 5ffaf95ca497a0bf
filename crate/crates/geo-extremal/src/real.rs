//! Scalar abstractions the numeric core is generic over.
//!
//! [`Real`] is the floating-point scalar (`f32` or `f64`) used by the
//! closed forms, bounds and root finding. [`GridScalar`] is the smaller
//! arithmetic surface needed to enumerate breakpoint grids; it is
//! implemented both for the floats and for [`num_rational::BigRational`],
//! which is what powers the exact-rational validation mode.

use core::ops::{Add, Mul, Sub};

use num_traits::{Float, FloatConst, One, Zero};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real: Float + FloatConst + core::fmt::Debug + GridScalar {}

impl Real for f32 {}
impl Real for f64 {}

/// Arithmetic needed to enumerate a breakpoint grid of powers of `q`.
///
/// `pow_u` must evaluate `base^exp` as a direct power per index (not by a
/// running product, which drifts over long grids), and
/// `count_powers_at_least` must be safeguarded so that the defining
/// inequality `base^d >= target > base^(d+1)` holds for the returned `d`
/// even when a floating-point log ratio lands on the wrong side.
pub trait GridScalar:
    Clone + PartialOrd + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn from_count(n: u64) -> Self;

    /// `base^exp` for `exp >= 0`.
    fn pow_u(base: &Self, exp: u64) -> Self;

    /// `max { i >= 0 : base^i >= target }` for `base` in (0,1), `target` in (0,1].
    fn count_powers_at_least(base: &Self, target: &Self) -> u64;

    /// Accumulate `term` into `acc`; floats carry a Neumaier correction in `comp`.
    fn add_term(acc: &mut Self, comp: &mut Self, term: Self) {
        let _ = comp;
        *acc = acc.clone() + term;
    }
}

macro_rules! impl_grid_scalar_float {
    ($t:ty) => {
        impl GridScalar for $t {
            #[inline]
            fn from_count(n: u64) -> Self {
                n as $t
            }

            #[inline]
            fn pow_u(base: &Self, exp: u64) -> Self {
                debug_assert!(exp <= i32::MAX as u64);
                base.powi(exp as i32)
            }

            fn count_powers_at_least(base: &Self, target: &Self) -> u64 {
                pow_count_ge(*base, *target)
            }

            #[inline]
            fn add_term(acc: &mut Self, comp: &mut Self, term: Self) {
                // Neumaier compensated summation.
                let t = *acc + term;
                if acc.abs() >= term.abs() {
                    *comp += (*acc - t) + term;
                } else {
                    *comp += (term - t) + *acc;
                }
                *acc = t;
            }
        }
    };
}

impl_grid_scalar_float!(f32);
impl_grid_scalar_float!(f64);

/// `max { i >= 0 : q^i >= t }` for `q` in (0,1), `t` in (0,1].
///
/// The log-ratio `ln t / ln q` is only a starting guess; the result is
/// corrected against the defining inequality with direct powers.
pub(crate) fn pow_count_ge<T: Float>(q: T, t: T) -> u64 {
    debug_assert!(q > T::zero() && q < T::one());
    debug_assert!(t > T::zero() && t <= T::one());
    let guess = (t.ln() / q.ln()).floor();
    let mut g: i64 = num_traits::cast(guess).unwrap_or(0);
    if g < 0 {
        g = 0;
    }
    let mut steps = 0;
    while steps < 128 && q.powi((g + 1) as i32) >= t {
        g += 1;
        steps += 1;
    }
    steps = 0;
    while steps < 128 && g > 0 && q.powi(g as i32) < t {
        g -= 1;
        steps += 1;
    }
    g as u64
}

/// `max { i >= 0 : q^i > t }` (strict variant of [`pow_count_ge`]), `t` in [0,1).
pub(crate) fn pow_count_gt<T: Float>(q: T, t: T) -> u64 {
    debug_assert!(q > T::zero() && q < T::one());
    debug_assert!(t >= T::zero() && t < T::one());
    if t == T::zero() {
        // Every power of q is positive; callers must bound the range themselves.
        panic!("pow_count_gt: unbounded count for t = 0");
    }
    let mut g = pow_count_ge(q, t);
    let mut steps = 0;
    while steps < 128 && g > 0 && !(q.powi(g as i32) > t) {
        g -= 1;
        steps += 1;
    }
    steps = 0;
    while steps < 128 && q.powi((g + 1) as i32) > t {
        g += 1;
        steps += 1;
    }
    g
}
