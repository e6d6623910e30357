//! Working-precision scalar abstraction for the numerical (non-exact) side.
//!
//! Everything numeric is generic over [`Real`]. Two instantiations are
//! provided: plain `f64` (53-bit mantissa) and the double-double newtype
//! [`Dd`] (106-bit mantissa), the default working precision.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use twofloat::TwoFloat;

pub trait Real:
    Copy
    + PartialOrd
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MANTISSA_BITS: u32;

    /// Exact embedding of an `f64`.
    fn of(x: f64) -> Self;

    /// Exact embedding of a small integer (|n| < 2^53).
    fn from_int(n: i64) -> Self;

    /// Correctly rounded small-integer ratio.
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn to_f64_lossy(self) -> f64;

    fn zero() -> Self {
        Self::of(0.0)
    }

    fn one() -> Self {
        Self::of(1.0)
    }

    /// Unit roundoff 2^-MANTISSA_BITS.
    fn unit_roundoff() -> Self {
        Self::of(2f64.powi(-(Self::MANTISSA_BITS as i32)))
    }

    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn max(self, other: Self) -> Self;
    fn min(self, other: Self) -> Self;
    fn is_finite(self) -> bool;
}

impl Real for f64 {
    const MANTISSA_BITS: u32 = 53;

    fn of(x: f64) -> Self {
        x
    }

    fn from_int(n: i64) -> Self {
        debug_assert!(n.abs() < (1i64 << 53));
        n as f64
    }

    fn to_f64_lossy(self) -> f64 {
        self
    }

    fn abs(self) -> Self {
        f64::abs(self)
    }

    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }

    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }

    fn max(self, other: Self) -> Self {
        f64::max(self, other)
    }

    fn min(self, other: Self) -> Self {
        f64::min(self, other)
    }

    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

/// Double-double scalar backed by [`twofloat::TwoFloat`].
///
/// The underlying crate's addition, subtraction, multiplication and square
/// root carry full double-double accuracy, but its `TwoFloat / TwoFloat`
/// loses the reciprocal's rounding residual (the `1 - hi*th` step needs a
/// fused multiply-add) and comes out only f64-accurate. This newtype routes
/// division through an explicit long division with two corrections instead.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Dd(TwoFloat);

impl Dd {
    pub fn hi(self) -> f64 {
        self.0.hi()
    }

    pub fn lo(self) -> f64 {
        self.0.lo()
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        Dd(self.0 + rhs.0)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        Dd(self.0 - rhs.0)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        Dd(self.0 * rhs.0)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}

impl Div for Dd {
    type Output = Dd;
    /// Long division with two residual corrections; each residual is formed
    /// with full-precision multiply and subtract, so the quotient recovers
    /// double-double accuracy.
    fn div(self, rhs: Dd) -> Dd {
        let bh = rhs.0.hi();
        let q1 = self.0.hi() / bh;
        let r1 = self.0 - rhs.0 * q1;
        let q2 = r1.hi() / bh;
        let r2 = r1 - rhs.0 * q2;
        let q3 = r2.hi() / bh;
        Dd(TwoFloat::new_add(q1, q2) + q3)
    }
}

impl Real for Dd {
    const MANTISSA_BITS: u32 = 106;

    fn of(x: f64) -> Self {
        Dd(TwoFloat::from(x))
    }

    fn from_int(n: i64) -> Self {
        debug_assert!(n.abs() < (1i64 << 53));
        Dd(TwoFloat::from(n as f64))
    }

    fn to_f64_lossy(self) -> f64 {
        self.0.hi()
    }

    fn abs(self) -> Self {
        if self.0.hi() < 0.0 || (self.0.hi() == 0.0 && self.0.lo() < 0.0) {
            -self
        } else {
            self
        }
    }

    fn sqrt(self) -> Self {
        Dd(self.0.sqrt())
    }

    fn powi(self, n: i32) -> Self {
        if n < 0 {
            return Dd::one() / self.powi(-n);
        }
        let mut result = Dd::one();
        let mut base = self;
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                result = result * base;
            }
            base = base * base;
            k >>= 1;
        }
        result
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn is_finite(self) -> bool {
        self.0.hi().is_finite() && self.0.lo().is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_double_resolves_below_f64_epsilon() {
        let tiny = Dd::of(2f64.powi(-80));
        let x = Dd::of(1.0) + tiny;
        assert!(x > Dd::of(1.0));
        let back = x - Dd::of(1.0);
        assert_eq!(back.hi(), 2f64.powi(-80));
    }

    #[test]
    fn ratio_is_correctly_rounded_in_both_precisions() {
        let f: f64 = Real::ratio(1, 3);
        assert_eq!(f, 1.0 / 3.0);
        let t: Dd = Real::ratio(1, 3);
        // residual of the double-double is the next correction term
        let resid = (t - Dd::of(f)).abs();
        assert!(resid < Dd::of(f64::EPSILON));
        assert!(resid > Dd::of(0.0));
    }

    #[test]
    fn division_carries_double_double_accuracy() {
        let a = Dd::of(1.0);
        let b = Dd::of(3.0);
        let q = a / b;
        let resid = (q * b - a).abs();
        assert!(resid < Dd::of(1e-31), "resid = {resid}");
        // denominator with a live low word
        let c = Dd::of(1.0) + Dd::of(2f64.powi(-70));
        let q = a / c;
        let resid = (q * c - a).abs();
        assert!(resid < Dd::of(1e-31), "resid = {resid}");
    }

    #[test]
    fn powi_handles_negative_exponents_accurately() {
        let x = Dd::of(3.0);
        let p = x.powi(-3);
        let resid = (p * x.powi(3) - Dd::one()).abs();
        assert!(resid < Dd::of(1e-31), "resid = {resid}");
    }

    #[test]
    fn sqrt_squares_back() {
        let x = Dd::of(189.0);
        let s = x.sqrt();
        let err = (s * s - x).abs();
        assert!(err < Dd::of(1e-29), "err = {err}");
    }

    #[test]
    fn rational_to_real_keeps_extended_precision() {
        use crate::exact::{rat, to_real};
        let q = rat(1, 3).unwrap();
        let t: Dd = to_real(&q);
        let three = Dd::of(3.0);
        assert!((t * three - Dd::of(1.0)).abs() < Dd::of(1e-31));
    }
}
