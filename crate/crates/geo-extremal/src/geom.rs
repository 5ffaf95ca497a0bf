//! Geometric distribution primitives: pmf, cdf, pseudoinverse (quantile)
//! and moments.
//!
//! `Geo(p)` counts failures before the first success: `P(X = i) = p(1-p)^i`
//! on {0, 1, 2, ...}. The pseudoinverse follows the inf-definition
//! `F^{-1}(u) = inf { x : F(x) >= u }`, so the preimage intervals of the
//! quantile are right-closed: `quantile(u) = n` iff `cdf(n-1) < u <= cdf(n)`.

use crate::error::{Error, Result};
use crate::real::{pow_count_ge, Real};

/// Validated parameter of a Geometric distribution, `p` in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoParam<T> {
    p: T,
    q: T,
}

/// Mean and variance of a Geometric distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<T> {
    pub mean: T,
    pub variance: T,
}

impl<T: Real> GeoParam<T> {
    pub fn new(p: T) -> Result<Self> {
        Self::named(p, "p")
    }

    /// Like [`GeoParam::new`] but errors name the offending argument.
    pub fn named(p: T, name: &'static str) -> Result<Self> {
        if !(p > T::zero()) || !(p <= T::one()) {
            return Err(Error::InvalidProbability {
                name,
                value: num_traits::cast(p).unwrap_or(f64::NAN),
            });
        }
        Ok(Self { p, q: T::one() - p })
    }

    #[inline]
    pub fn p(&self) -> T {
        self.p
    }

    /// Failure probability `q = 1 - p`.
    #[inline]
    pub fn q(&self) -> T {
        self.q
    }

    /// `p = 1`: all mass at zero, variance zero.
    #[inline]
    pub fn is_degenerate(&self) -> bool {
        self.q == T::zero()
    }

    /// `P(X = i) = p (1-p)^i`.
    pub fn pmf(&self, i: u64) -> T {
        if self.is_degenerate() {
            return if i == 0 { T::one() } else { T::zero() };
        }
        self.p * T::pow_u(&self.q, i)
    }

    /// `P(X <= a) = 1 - (1-p)^(a+1)`.
    pub fn cdf(&self, a: u64) -> T {
        T::one() - self.sf(a)
    }

    /// Survival function `P(X > a) = (1-p)^(a+1)`, exact in the power scale.
    pub fn sf(&self, a: u64) -> T {
        if self.is_degenerate() {
            return T::zero();
        }
        T::pow_u(&self.q, a + 1)
    }

    /// Pseudoinverse `F^{-1}(u) = inf { n : cdf(n) >= u }` for `u` in [0, 1).
    ///
    /// `u = 1` is rejected (the support is unbounded). Away from interval
    /// endpoints this equals `floor(ln(1-u)/ln(1-p))`; the log ratio is used
    /// only as a starting guess and the defining inequality decides.
    pub fn quantile(&self, u: T) -> Result<u64> {
        if !(u >= T::zero()) || u >= T::one() {
            return Err(Error::InvalidUniform {
                value: num_traits::cast(u).unwrap_or(f64::NAN),
            });
        }
        if u == T::zero() {
            return Ok(0);
        }
        Ok(self.quantile_from_tail(T::one() - u))
    }

    /// `min { n >= 0 : q^(n+1) <= t }` where `t = 1 - u` in (0, 1).
    pub(crate) fn quantile_from_tail(&self, t: T) -> u64 {
        if self.is_degenerate() {
            return 0;
        }
        let m = pow_count_ge(self.q, t);
        // q^m == t exactly: u sits on cdf(m-1), and the inf-definition
        // (right-closed intervals) assigns it to m-1.
        if m > 0 && T::pow_u(&self.q, m) == t {
            m - 1
        } else {
            m
        }
    }

    /// `E(X) = (1-p)/p`, `V(X) = (1-p)/p^2`.
    pub fn moments(&self) -> Moments<T> {
        Moments {
            mean: self.q / self.p,
            variance: self.q / (self.p * self.p),
        }
    }
}
