//! Dense univariate polynomials over the rationals: exact arithmetic,
//! division, primitive normalization, Sturm-sequence root counting and
//! bisection root isolation.
//!
//! Coefficients are stored ascending by degree; the zero polynomial is the
//! empty list. Degrees in this crate stay small (< 40), so the dense
//! representation and naive O(n^2) products are the right tool.

use crate::exact::{rat_int, rat_str, BigRational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("division left a nonzero remainder")]
    DivisionNotExact,
    #[error("the zero polynomial cannot be normalized")]
    ZeroPolynomial,
    #[error("expected exactly one root in the bracket, found {0}")]
    RootCountNotOne(usize),
    #[error("invalid interval: lo must be strictly below hi")]
    InvalidInterval,
    #[error("invalid width: must be positive")]
    InvalidWidth,
    #[error("polynomial has a nonzero odd-degree coefficient")]
    NotEven,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyQ {
    coeffs: Vec<BigRational>,
}

/// Open interval known to bracket a single sign change of some polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RootInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self, PolyError> {
        if lo >= hi {
            return Err(PolyError::InvalidInterval);
        }
        Ok(RootInterval { lo, hi })
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / rat_int(2)
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo < x && x < &self.hi
    }
}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

impl PolyQ {
    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        PolyQ {
            coeffs: trim(coeffs),
        }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn zero() -> Self {
        PolyQ { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(rat_int(1))
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// c * x^k
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = c;
        Self::from_coeffs(v)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Horner evaluation in working-precision floats, coefficients rounded
    /// individually.
    pub fn eval_real<R: crate::real::Real>(&self, x: R) -> R {
        let mut acc = R::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + crate::exact::to_real::<R>(c);
        }
        acc
    }

    pub fn add(&self, rhs: &PolyQ) -> PolyQ {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut v = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            v[i] += c;
        }
        Self::from_coeffs(v)
    }

    pub fn sub(&self, rhs: &PolyQ) -> PolyQ {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> PolyQ {
        PolyQ {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, rhs: &PolyQ) -> PolyQ {
        if self.is_zero() || rhs.is_zero() {
            return PolyQ::zero();
        }
        let mut v = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::from_coeffs(v)
    }

    pub fn scale(&self, k: &BigRational) -> PolyQ {
        if k.is_zero() {
            return PolyQ::zero();
        }
        PolyQ {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn derivative(&self) -> PolyQ {
        if self.coeffs.len() <= 1 {
            return PolyQ::zero();
        }
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat_int(i as i64))
                .collect(),
        )
    }

    /// Euclidean division with remainder, exact over the rationals.
    pub fn divrem(&self, rhs: &PolyQ) -> Result<(PolyQ, PolyQ), PolyError> {
        let dd = rhs.degree().ok_or(PolyError::DivisionByZero)?;
        let lead = rhs.leading().expect("nonzero").clone();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![BigRational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let factor = rem.last().expect("nonempty") / &lead;
            for (i, b) in rhs.coeffs.iter().enumerate() {
                let t = &factor * b;
                rem[k + i] -= t;
            }
            debug_assert!(rem.last().expect("nonempty").is_zero());
            rem.pop();
            rem = trim(rem);
            quo[k] = factor;
        }
        Ok((PolyQ::from_coeffs(quo), PolyQ::from_coeffs(rem)))
    }

    /// Quotient when the division is exact; any nonzero remainder is an error.
    pub fn divide_exact(&self, rhs: &PolyQ) -> Result<PolyQ, PolyError> {
        let (q, r) = self.divrem(rhs)?;
        if !r.is_zero() {
            return Err(PolyError::DivisionNotExact);
        }
        Ok(q)
    }

    /// Positive rational `s` such that `self / s` has coprime integer
    /// coefficients (sign untouched).
    fn content(&self) -> Option<BigRational> {
        if self.is_zero() {
            return None;
        }
        let mut den_lcm = BigInt::one();
        for c in &self.coeffs {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in &self.coeffs {
            num_gcd = num_gcd.gcd(&(c.numer() * &den_lcm / c.denom()));
        }
        Some(BigRational::new(num_gcd, den_lcm))
    }

    /// Divide out the content, keeping the sign of the polynomial.
    fn primitive_keep_sign(&self) -> PolyQ {
        match self.content() {
            Some(c) => self.scale(&c.recip()),
            None => PolyQ::zero(),
        }
    }

    /// Canonical representative up to rational scaling: coprime integer
    /// coefficients and a positive leading coefficient.
    pub fn primitive_normalize(&self) -> Result<PolyQ, PolyError> {
        let p = self.primitive_keep_sign();
        let lead = p.leading().ok_or(PolyError::ZeroPolynomial)?;
        Ok(if lead.is_negative() { p.neg() } else { p })
    }

    /// Primitive gcd with positive leading coefficient; gcd with zero is the
    /// normalized other operand.
    pub fn gcd(&self, rhs: &PolyQ) -> PolyQ {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b).expect("b nonzero");
            a = b;
            b = r.primitive_keep_sign();
        }
        match a.primitive_normalize() {
            Ok(p) => p,
            Err(_) => PolyQ::zero(),
        }
    }

    /// Product of the distinct irreducible factors: `self / gcd(self, self')`.
    pub fn squarefree_part(&self) -> PolyQ {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.divide_exact(&g).expect("gcd divides")
    }

    /// Remove a known root exactly: `self / (x - r)^k` for maximal k >= 1.
    fn deflate_root(&self, r: &BigRational) -> PolyQ {
        let lin = PolyQ::from_coeffs(vec![-r.clone(), rat_int(1)]);
        let mut p = self.clone();
        while !p.is_zero() && p.eval(r).is_zero() {
            p = p.divide_exact(&lin).expect("root divides");
        }
        p
    }

    /// Sturm sequence of the squarefree part, with content-scaled (sign
    /// preserving) remainders to keep coefficient growth in check.
    fn sturm_chain(&self) -> Vec<PolyQ> {
        let p0 = self.squarefree_part().primitive_keep_sign();
        let p1 = p0.derivative().primitive_keep_sign();
        let mut chain = vec![p0, p1];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].divrem(&chain[n - 1]).expect("nonzero");
            if r.is_zero() {
                break;
            }
            chain.push(r.neg().primitive_keep_sign());
        }
        chain
    }

    fn sign_changes_at(chain: &[PolyQ], x: &BigRational) -> usize {
        let mut last: i8 = 0;
        let mut changes = 0;
        for p in chain {
            let v = p.eval(x);
            let s: i8 = if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            };
            if s != 0 {
                if last != 0 && s != last {
                    changes += 1;
                }
                last = s;
            }
        }
        changes
    }

    /// Exact number of distinct real roots in the open interval (lo, hi).
    ///
    /// Roots sitting exactly on an endpoint are removed by exact deflation
    /// first, so they are neither counted nor allowed to corrupt the count.
    pub fn sturm_count(&self, lo: &BigRational, hi: &BigRational) -> usize {
        debug_assert!(lo < hi);
        if self.is_zero() || self.degree() == Some(0) {
            return 0;
        }
        let mut p = self.clone();
        if p.eval(lo).is_zero() {
            p = p.deflate_root(lo);
        }
        if p.eval(hi).is_zero() {
            p = p.deflate_root(hi);
        }
        if p.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let chain = p.sturm_chain();
        let va = Self::sign_changes_at(&chain, lo);
        let vb = Self::sign_changes_at(&chain, hi);
        va.saturating_sub(vb)
    }

    /// Shrink a bracket known to contain exactly one root down to `width`
    /// by exact rational bisection; the result keeps a strict sign change.
    pub fn isolate_root(
        &self,
        bracket: &RootInterval,
        width: &BigRational,
    ) -> Result<RootInterval, PolyError> {
        if !width.is_positive() {
            return Err(PolyError::InvalidWidth);
        }
        let found = self.sturm_count(&bracket.lo, &bracket.hi);
        if found != 1 {
            return Err(PolyError::RootCountNotOne(found));
        }
        let mut q = self.squarefree_part();
        if q.eval(&bracket.lo).is_zero() {
            q = q.deflate_root(&bracket.lo);
        }
        if q.eval(&bracket.hi).is_zero() {
            q = q.deflate_root(&bracket.hi);
        }
        let mut lo = bracket.lo.clone();
        let mut hi = bracket.hi.clone();
        let slo = q.eval(&lo).is_positive();
        debug_assert!(slo != q.eval(&hi).is_positive());
        let two = rat_int(2);
        while &hi - &lo > *width {
            let mid = (&lo + &hi) / &two;
            let v = q.eval(&mid);
            if v.is_zero() {
                // Landed exactly on the root: return a snug strict bracket.
                let half = width / &two;
                let lo2 = (&mid - &half).max((&lo + &mid) / &two);
                let hi2 = (&mid + &half).min((&mid + &hi) / &two);
                return RootInterval::new(lo2, hi2);
            }
            if v.is_positive() == slo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        RootInterval::new(lo, hi)
    }

    /// Coefficient signs from the leading term down to the constant.
    pub fn sign_pattern(&self) -> Vec<i8> {
        self.coeffs
            .iter()
            .rev()
            .map(|c| {
                if c.is_zero() {
                    0
                } else if c.is_positive() {
                    1
                } else {
                    -1
                }
            })
            .collect()
    }

    /// Rewrite an even polynomial p(c) as q(z) with z = c^2.
    pub fn even_part_in_z(&self) -> Result<PolyQ, PolyError> {
        if self.coeffs.iter().skip(1).step_by(2).any(|c| !c.is_zero()) {
            return Err(PolyError::NotEven);
        }
        Ok(PolyQ::from_coeffs(
            self.coeffs.iter().step_by(2).cloned().collect(),
        ))
    }

    /// Ascending `num/den` coefficient strings (the JSON wire format).
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rat_str).collect()
    }

    /// Human-readable form, highest degree first, e.g. `4725z^3 - 2619z^2 + 135z - 1`.
    pub fn pretty(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let coeff_txt = if mag.is_integer() {
                mag.numer().to_string()
            } else {
                format!("{}/{}", mag.numer(), mag.denom())
            };
            match k {
                0 => out.push_str(&coeff_txt),
                _ => {
                    if !mag.is_one() {
                        out.push_str(&coeff_txt);
                    }
                    out.push_str(var);
                    if k > 1 {
                        out.push_str(&format!("^{k}"));
                    }
                }
            }
        }
        out
    }
}
