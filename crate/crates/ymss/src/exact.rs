//! Exact arithmetic substrate: arbitrary-precision rationals and the real
//! quadratic field Q(sqrt(D)).
//!
//! Rationals are [`num_rational::BigRational`] (always in lowest terms,
//! positive denominator). [`QuadExt`] represents `p + q*sqrt(D)` with
//! rational `p`, `q` and a fixed positive integer radicand `D`; values with
//! different radicands refuse to combine. All values are immutable.

use num_bigint::{BigInt, Sign};
use num_integer::{Integer, Roots};
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;
use thiserror::Error;

pub use num_rational::BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("zero denominator in rational constructor")]
    ZeroDenominator,
    #[error("radicand must be a positive integer, got {0}")]
    NonPositiveRadicand(i64),
    #[error("radicand mismatch: sqrt({0}) vs sqrt({1})")]
    RadicandMismatch(i64, i64),
    #[error("division by zero")]
    DivisionByZero,
}

/// Canonical reduced rational `num/den`; the sign is carried by the numerator.
pub fn rat(num: i64, den: i64) -> Result<BigRational, ExactError> {
    if den == 0 {
        return Err(ExactError::ZeroDenominator);
    }
    Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Shorthand for integer rationals.
pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Fixed `num/den` serialization, keeping the denominator even for integers.
pub fn rat_str(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Round a rational to the nearest `f64`, ties to even.
///
/// `num_rational`'s own `to_f64` rounds numerator and denominator separately;
/// this one performs a single correctly rounded division.
pub fn to_f64_nearest(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let negative = q.numer().sign() == Sign::Minus;
    let num = q.numer().abs();
    let den = q.denom().clone();

    // Scale so that floor(num * 2^shift / den) has exactly 54 bits: a 53-bit
    // mantissa plus one rounding bit, with the division remainder as sticky.
    let mut shift: i64 = 54 - (num.bits() as i64 - den.bits() as i64);
    let (mut quo, mut rem) = shifted_div_rem(&num, &den, shift);
    while quo.bits() > 54 {
        shift -= 1;
        (quo, rem) = shifted_div_rem(&num, &den, shift);
    }
    while quo.bits() < 54 {
        shift += 1;
        (quo, rem) = shifted_div_rem(&num, &den, shift);
    }
    let sticky = !rem.is_zero();
    let round_bit = quo.is_odd();
    let mut m: u64 = (&quo >> 1u32).to_u64().expect("54-bit quotient");
    let mut exp = -(shift as i32 - 1);
    if round_bit && (sticky || m & 1 == 1) {
        m += 1;
        if m == 1u64 << 53 {
            m >>= 1;
            exp += 1;
        }
    }
    let mag = if exp >= 0 {
        m as f64 * 2f64.powi(exp.min(1023))
    } else {
        m as f64 * 2f64.powi(exp.max(-1074))
    };
    if negative {
        -mag
    } else {
        mag
    }
}

fn shifted_div_rem(num: &BigInt, den: &BigInt, shift: i64) -> (BigInt, BigInt) {
    if shift >= 0 {
        (num << shift as u64).div_rem(den)
    } else {
        num.div_rem(&(den << (-shift) as u64))
    }
}

/// Convert a rational to any float type, splitting into a correctly rounded
/// leading `f64` plus a correctly rounded residual (exact to double-double).
pub fn to_real<R: crate::real::Real>(q: &BigRational) -> R {
    let hi = to_f64_nearest(q);
    if R::MANTISSA_BITS <= 53 || hi == 0.0 {
        return R::of(hi);
    }
    let hi_exact = BigRational::from_float(hi).expect("finite");
    let lo = to_f64_nearest(&(q - hi_exact));
    R::of(hi) + R::of(lo)
}

fn sgn_rat(q: &BigRational) -> i32 {
    match q.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

fn perfect_sqrt(n: i64) -> Option<i64> {
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

/// Element `p + q*sqrt(D)` of the quadratic field Q(sqrt(D)), D a positive
/// integer. If D is a perfect square the value collapses to a pure rational
/// at construction, so `radical_part != 0` implies sqrt(D) is irrational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadExt {
    rational_part: BigRational,
    radical_part: BigRational,
    radicand: i64,
}

impl QuadExt {
    pub fn new(
        rational_part: BigRational,
        radical_part: BigRational,
        radicand: i64,
    ) -> Result<Self, ExactError> {
        if radicand <= 0 {
            return Err(ExactError::NonPositiveRadicand(radicand));
        }
        if let Some(r) = perfect_sqrt(radicand) {
            return Ok(QuadExt {
                rational_part: rational_part + radical_part * rat_int(r),
                radical_part: BigRational::zero(),
                radicand,
            });
        }
        Ok(QuadExt {
            rational_part,
            radical_part,
            radicand,
        })
    }

    pub fn from_rational(q: BigRational, radicand: i64) -> Result<Self, ExactError> {
        Self::new(q, BigRational::zero(), radicand)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational_part
    }

    pub fn radical_part(&self) -> &BigRational {
        &self.radical_part
    }

    pub fn radicand(&self) -> i64 {
        self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.radical_part.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.rational_part.is_zero() && self.radical_part.is_zero()
    }

    /// Rational value if the radical part vanishes.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.rational_part)
    }

    pub fn conj(&self) -> QuadExt {
        QuadExt {
            rational_part: self.rational_part.clone(),
            radical_part: -self.radical_part.clone(),
            radicand: self.radicand,
        }
    }

    fn combine(&self, rhs: &QuadExt) -> Result<(), ExactError> {
        if self.radicand != rhs.radicand {
            return Err(ExactError::RadicandMismatch(self.radicand, rhs.radicand));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &QuadExt) -> Result<QuadExt, ExactError> {
        self.combine(rhs)?;
        Ok(QuadExt {
            rational_part: &self.rational_part + &rhs.rational_part,
            radical_part: &self.radical_part + &rhs.radical_part,
            radicand: self.radicand,
        })
    }

    pub fn sub(&self, rhs: &QuadExt) -> Result<QuadExt, ExactError> {
        self.combine(rhs)?;
        Ok(QuadExt {
            rational_part: &self.rational_part - &rhs.rational_part,
            radical_part: &self.radical_part - &rhs.radical_part,
            radicand: self.radicand,
        })
    }

    pub fn mul(&self, rhs: &QuadExt) -> Result<QuadExt, ExactError> {
        self.combine(rhs)?;
        let d = rat_int(self.radicand);
        Ok(QuadExt {
            rational_part: &self.rational_part * &rhs.rational_part
                + &self.radical_part * &rhs.radical_part * &d,
            radical_part: &self.rational_part * &rhs.radical_part
                + &self.radical_part * &rhs.rational_part,
            radicand: self.radicand,
        })
    }

    /// Field division via multiplication with the conjugate.
    pub fn div(&self, rhs: &QuadExt) -> Result<QuadExt, ExactError> {
        self.combine(rhs)?;
        if rhs.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let n = rhs.norm();
        debug_assert!(!n.is_zero());
        let num = self.mul(&rhs.conj())?;
        Ok(QuadExt {
            rational_part: num.rational_part / &n,
            radical_part: num.radical_part / &n,
            radicand: self.radicand,
        })
    }

    pub fn neg(&self) -> QuadExt {
        QuadExt {
            rational_part: -self.rational_part.clone(),
            radical_part: -self.radical_part.clone(),
            radicand: self.radicand,
        }
    }

    /// `x + conj(x)`, always rational.
    pub fn trace(&self) -> BigRational {
        &self.rational_part + &self.rational_part
    }

    /// `x * conj(x)`, always rational.
    pub fn norm(&self) -> BigRational {
        let prod = self.mul(&self.conj()).expect("same radicand");
        debug_assert!(prod.radical_part.is_zero());
        prod.rational_part
    }

    pub fn trace_norm(&self) -> (BigRational, BigRational) {
        (self.trace(), self.norm())
    }

    /// Exact sign: -1, 0 or +1. No floating point involved.
    pub fn sign(&self) -> i32 {
        let sp = sgn_rat(&self.rational_part);
        let sq = sgn_rat(&self.radical_part);
        if sq == 0 {
            return sp;
        }
        if sp == 0 || sp == sq {
            return sq;
        }
        // Opposite signs: compare p^2 against q^2 D.
        let lhs = &self.rational_part * &self.rational_part;
        let rhs = &self.radical_part * &self.radical_part * rat_int(self.radicand);
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Greater => sp,
            std::cmp::Ordering::Less => sq,
            std::cmp::Ordering::Equal => 0,
        }
    }

    /// Exact comparison against a rational.
    pub fn cmp_rational(&self, q: &BigRational) -> std::cmp::Ordering {
        let diff = QuadExt {
            rational_part: &self.rational_part - q,
            radical_part: self.radical_part.clone(),
            radicand: self.radicand,
        };
        diff.sign().cmp(&0)
    }

    /// Evaluate to the requested float type: `p + q*sqrt(D)`.
    pub fn to_real<R: crate::real::Real>(&self) -> R {
        let p: R = to_real(&self.rational_part);
        if self.radical_part.is_zero() {
            return p;
        }
        let q: R = to_real(&self.radical_part);
        p + q * R::of(self.radicand as f64).sqrt()
    }

    pub fn to_f64(&self) -> f64 {
        crate::real::Real::to_f64_lossy(self.to_real::<crate::real::Dd>())
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{} + {}/{}*sqrt({})",
            self.rational_part.numer(),
            self.rational_part.denom(),
            self.radical_part.numer(),
            self.radical_part.denom(),
            self.radicand
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rat_reduces_to_lowest_terms() {
        let q = rat(114, 225).unwrap();
        assert_eq!(rat_str(&q), "38/75");
    }

    #[test]
    fn rat_normalizes_sign_into_numerator() {
        assert_eq!(rat_str(&rat(-2, -4).unwrap()), "1/2");
        assert_eq!(rat_str(&rat(2, -4).unwrap()), "-1/2");
    }

    #[test]
    fn rat_embeds_integers() {
        assert_eq!(rat_str(&rat(5, 1).unwrap()), "5/1");
    }

    #[test]
    fn rat_rejects_zero_denominator() {
        assert_eq!(rat(1, 0), Err(ExactError::ZeroDenominator));
    }

    #[test]
    fn conjugate_product_is_norm() {
        // (2 + sqrt(189)) * (2 - sqrt(189)) = 4 - 189 = -185
        let x = QuadExt::new(rat_int(2), rat_int(1), 189).unwrap();
        let p = x.mul(&x.conj()).unwrap();
        assert!(p.is_rational());
        assert_eq!(p.as_rational().unwrap(), &rat_int(-185));
    }

    #[test]
    fn pure_radical_squares_to_radicand() {
        let x = QuadExt::new(BigRational::zero(), rat_int(1), 189).unwrap();
        let sq = x.mul(&x).unwrap();
        assert_eq!(sq.as_rational().unwrap(), &rat_int(189));
    }

    #[test]
    fn trace_norm_by_hand() {
        // x = 3 + 2 sqrt(5): trace 6, norm 9 - 20 = -11
        let x = QuadExt::new(rat_int(3), rat_int(2), 5).unwrap();
        let (t, n) = x.trace_norm();
        assert_eq!(t, rat_int(6));
        assert_eq!(n, rat_int(-11));
    }

    #[test]
    fn trace_norm_of_rational_degenerates() {
        let x = QuadExt::from_rational(rat(3, 7).unwrap(), 5).unwrap();
        let (t, n) = x.trace_norm();
        assert_eq!(t, rat(6, 7).unwrap());
        assert_eq!(n, rat(9, 49).unwrap());
    }

    #[test]
    fn perfect_square_radicand_collapses() {
        let x = QuadExt::new(rat_int(1), rat(1, 2).unwrap(), 49).unwrap();
        assert!(x.is_rational());
        assert_eq!(x.as_rational().unwrap(), &rat(9, 2).unwrap());
    }

    #[test]
    fn mismatched_radicands_refuse_to_combine() {
        let a = QuadExt::new(rat_int(1), rat_int(1), 5).unwrap();
        let b = QuadExt::new(rat_int(1), rat_int(1), 7).unwrap();
        assert_eq!(a.add(&b), Err(ExactError::RadicandMismatch(5, 7)));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let a = QuadExt::new(rat_int(1), rat_int(1), 5).unwrap();
        let z = QuadExt::from_rational(BigRational::zero(), 5).unwrap();
        assert_eq!(a.div(&z), Err(ExactError::DivisionByZero));
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = QuadExt::new(rat(3, 4).unwrap(), rat(-2, 5).unwrap(), 21).unwrap();
        let b = QuadExt::new(rat(-1, 3).unwrap(), rat(7, 2).unwrap(), 21).unwrap();
        let q = a.mul(&b).unwrap().div(&b).unwrap();
        assert_eq!(q, a);
    }

    #[test]
    fn sign_is_exact_on_cancelling_parts() {
        // 14 - 3 sqrt(21): 14^2 = 196 > 9*21 = 189, so positive
        let x = QuadExt::new(rat_int(14), rat_int(-3), 21).unwrap();
        assert_eq!(x.sign(), 1);
        // 13 - 3 sqrt(21): 169 < 189, negative
        let y = QuadExt::new(rat_int(13), rat_int(-3), 21).unwrap();
        assert_eq!(y.sign(), -1);
    }

    #[test]
    fn to_f64_nearest_matches_f64_parsing() {
        let cases: [(i64, i64); 6] = [(1, 3), (2, 3), (1, 10), (355, 113), (-7, 11), (1, 7)];
        for (n, d) in cases {
            let q = rat(n, d).unwrap();
            let expect: f64 = n as f64 / d as f64;
            // these small cases are within one rounding of the double division
            assert!((to_f64_nearest(&q) - expect).abs() <= f64::EPSILON * expect.abs());
        }
        // exact dyadic values round-trip exactly
        let q = BigRational::from_float(0.577215664901532).unwrap();
        assert_eq!(to_f64_nearest(&q), 0.577215664901532);
    }

    #[test]
    fn to_f64_nearest_ties_to_even() {
        // 1 + 2^-53 is exactly halfway between 1.0 and the next double up
        let q = rat_int(1) + BigRational::new(BigInt::from(1), BigInt::from(2).pow(53));
        assert_eq!(to_f64_nearest(&q), 1.0);
        // 1 + 3*2^-53 is halfway between 1+2^-52 and 1+2^-51; even mantissa wins
        let q = rat_int(1) + BigRational::new(BigInt::from(3), BigInt::from(2).pow(53));
        assert_eq!(to_f64_nearest(&q), 1.0 + 2.0f64.powi(-51));
    }

    #[test]
    fn quadext_display_format() {
        let x = QuadExt::new(rat_int(2), rat(2, 27).unwrap(), 189).unwrap();
        assert_eq!(x.to_string(), "2/1 + 2/27*sqrt(189)");
    }
}
