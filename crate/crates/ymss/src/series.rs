//! Taylor-coefficient systems at the two singular endpoints of the interior
//! similarity ODE
//!
//! ```text
//! y^2 (1-y^2) u'' + ((d-3) y - 2 y^3) u' + (d-2) u (1 - u^2) = 0.
//! ```
//!
//! At y = 1 (series variable t = y-1) the coefficient equations form a
//! triangular system: equation n is linear in c_{n+1} with a rational pivot.
//! For odd d = 2m+5 the pivot vanishes exactly at n = m, and the leftover
//! equation is a polynomial solvability condition in the endpoint value
//! c = u(1). Stripping the trivial factors c and (1-c^2) and substituting
//! z = c^2 yields the degree-m polynomial whose roots in (0,1) enumerate the
//! smooth solutions.
//!
//! At y = 0 regular solutions are even power series with u(0) = 1 and the
//! quadratic coefficient -a free; [`zero_series`] builds that series in
//! working-precision floats to launch the integrator.

use crate::exact::{rat_int, BigRational};
use crate::poly::{PolyError, PolyQ};
use crate::real::Real;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error(
        "dimension {0} is even: every endpoint value admits a formal series, so no \
         polynomial condition arises; this construction requires odd d >= 7"
    )]
    EvenDimension(i64),
    #[error("dimension {0} is too small: need odd d >= 7")]
    DimensionTooSmall(i64),
    #[error("zero pivot while solving for coefficient {n}; triangular structure broken")]
    ZeroPivot { n: usize },
    #[error("pivot of the free coefficient is {pivot}, expected exactly zero")]
    NonzeroFreePivot { pivot: String },
    #[error("solved coefficient c1 does not match its closed form")]
    FirstCoefficientMismatch,
    #[error("coefficient c_{n} contains even powers of c; parity broken")]
    ParityViolation { n: usize },
    #[error("residual vanished identically; nothing to extract")]
    DegenerateResidual,
    #[error("extracted polynomial has degree {got}, expected {expected}")]
    UnexpectedDegree { expected: usize, got: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Solved endpoint series at y = 1: coefficients c_1..c_m as exact
/// polynomials in the formal endpoint value c.
#[derive(Debug, Clone)]
pub struct CoeffTable {
    pub d: i64,
    pub m: usize,
    /// cn[n] is the polynomial for c_n; cn[0] is the identity polynomial c.
    cn: Vec<PolyQ>,
    /// Truncated series data needed to form the leftover equation.
    lin_a: Vec<BigRational>,
    lin_b: Vec<BigRational>,
    u: Vec<PolyQ>,
    cube: Vec<PolyQ>,
}

/// The leftover equation at order m with the free coefficient dropped.
#[derive(Debug, Clone)]
pub struct ResidualData {
    pub d: i64,
    pub m: usize,
    pub residual: PolyQ,
    pub pivot_checked: bool,
}

/// Result of stripping trivial factors from the residual.
#[derive(Debug, Clone)]
pub struct ExtractedPm {
    pub pm: PolyQ,
    pub mult_c: u32,
    pub mult_one_minus_c2: u32,
}

impl CoeffTable {
    pub fn c_n(&self, n: usize) -> &PolyQ {
        &self.cn[n]
    }

    /// Linear-in-u part of the order-n equation: contributions of
    /// A(t) u'' + B(t) u' where A = -t(1+t)^2(2+t) and B is the first-order
    /// coefficient rewritten in t.
    fn linear_order(&self, n: usize) -> PolyQ {
        let mut acc = PolyQ::zero();
        for (i, ai) in self.lin_a.iter().enumerate() {
            if ai.is_zero() || n + 2 < i {
                continue;
            }
            let k = n + 2 - i;
            if k >= self.u.len() {
                continue;
            }
            let w = ai * rat_int((k * (k.saturating_sub(1))) as i64);
            acc = acc.add(&self.u[k].scale(&w));
        }
        for (i, bi) in self.lin_b.iter().enumerate() {
            if bi.is_zero() || n + 1 < i {
                continue;
            }
            let k = n + 1 - i;
            if k >= self.u.len() {
                continue;
            }
            acc = acc.add(&self.u[k].scale(&(bi * rat_int(k as i64))));
        }
        acc
    }

    /// Full order-n coefficient of the ODE applied to the series.
    fn equation_order(&self, n: usize) -> PolyQ {
        let f = self.u[n].sub(&self.cube[n]).scale(&rat_int(self.d - 2));
        self.linear_order(n).add(&f)
    }

    /// Rational pivot multiplying c_{n+1} in the order-n equation, read off
    /// the expanded A and B series.
    fn pivot(&self, n: usize) -> BigRational {
        let nn = rat_int(n as i64);
        let np1 = rat_int((n + 1) as i64);
        &self.lin_a[1] * &np1 * nn + &self.lin_b[0] * np1
    }
}

/// Solve the triangular system for c_1..c_m as exact polynomials in c.
pub fn derive_system(d: i64) -> Result<CoeffTable, SeriesError> {
    if d < 7 {
        return Err(SeriesError::DimensionTooSmall(d));
    }
    if d % 2 == 0 {
        return Err(SeriesError::EvenDimension(d));
    }
    let m = ((d - 5) / 2) as usize;

    // A(t) = -t (1+t)^2 (2+t), B(t) = (d-3)(1+t) - 2(1+t)^3, expanded exactly.
    let t = PolyQ::from_ints(&[0, 1]);
    let one_plus = PolyQ::from_ints(&[1, 1]);
    let a_poly = t
        .mul(&one_plus)
        .mul(&one_plus)
        .mul(&PolyQ::from_ints(&[2, 1]))
        .neg();
    let b_poly = one_plus.scale(&rat_int(d - 3)).sub(
        &one_plus
            .mul(&one_plus)
            .mul(&one_plus)
            .scale(&rat_int(2)),
    );
    let pad = |p: &PolyQ, len: usize| {
        let mut v: Vec<BigRational> = p.coeffs().to_vec();
        v.resize(len, BigRational::zero());
        v
    };

    let mut table = CoeffTable {
        d,
        m,
        cn: vec![PolyQ::zero(); m + 1],
        lin_a: pad(&a_poly, 5),
        lin_b: pad(&b_poly, 4),
        u: vec![PolyQ::zero(); m + 2],
        cube: vec![PolyQ::zero(); m + 1],
    };
    let mut sq = vec![PolyQ::zero(); m + 1];

    // Incrementally maintain u, u^2 and u^3 truncated at order m while the
    // coefficients are solved one by one.
    let add_term = |table: &mut CoeffTable, sq: &mut Vec<PolyQ>, k: usize, p: PolyQ| {
        let p2 = p.mul(&p);
        let p3 = p2.mul(&p);
        let three = rat_int(3);
        let two = rat_int(2);
        for i in 0..=m.saturating_sub(k) {
            if !sq[i].is_zero() {
                let upd = sq[i].mul(&p).scale(&three);
                table.cube[i + k] = table.cube[i + k].add(&upd);
            }
        }
        if 2 * k <= m {
            for i in 0..=(m - 2 * k) {
                if !table.u[i].is_zero() {
                    let upd = table.u[i].mul(&p2).scale(&three);
                    table.cube[i + 2 * k] = table.cube[i + 2 * k].add(&upd);
                }
            }
        }
        if 3 * k <= m {
            table.cube[3 * k] = table.cube[3 * k].add(&p3);
        }
        for i in 0..=m.saturating_sub(k) {
            if !table.u[i].is_zero() {
                let upd = table.u[i].mul(&p).scale(&two);
                sq[i + k] = sq[i + k].add(&upd);
            }
        }
        if 2 * k <= m {
            sq[2 * k] = sq[2 * k].add(&p2);
        }
        table.u[k] = p;
    };

    let c_poly = PolyQ::from_ints(&[0, 1]);
    add_term(&mut table, &mut sq, 0, c_poly.clone());
    table.cn[0] = c_poly;

    for n in 0..m {
        let piv = table.pivot(n);
        if piv.is_zero() {
            return Err(SeriesError::ZeroPivot { n: n + 1 });
        }
        let rest = table.equation_order(n);
        let solved = rest.scale(&(-piv.recip()));
        table.cn[n + 1] = solved.clone();
        add_term(&mut table, &mut sq, n + 1, solved);
    }

    // c_1 = -(d-2)/(d-5) (c - c^3), and every c_n is odd in c.
    let k = rat_int(d - 2) / rat_int(d - 5);
    let expected_c1 = PolyQ::from_ints(&[0, -1, 0, 1]).scale(&k);
    if table.cn[1] != expected_c1 {
        return Err(SeriesError::FirstCoefficientMismatch);
    }
    for n in 1..=m {
        if table.cn[n]
            .coeffs()
            .iter()
            .step_by(2)
            .any(|c| !c.is_zero())
        {
            return Err(SeriesError::ParityViolation { n });
        }
    }
    Ok(table)
}

/// Form the order-m equation, confirm the free coefficient's pivot is
/// exactly zero, and return what is left as a polynomial in c.
pub fn residual_condition(table: &CoeffTable) -> Result<ResidualData, SeriesError> {
    let piv = table.pivot(table.m);
    if !piv.is_zero() {
        return Err(SeriesError::NonzeroFreePivot {
            pivot: crate::exact::rat_str(&piv),
        });
    }
    let residual = table.equation_order(table.m);
    // The residual inherits the odd parity of the coefficient system.
    if residual.coeffs().iter().step_by(2).any(|c| !c.is_zero()) {
        return Err(SeriesError::ParityViolation { n: table.m + 1 });
    }
    Ok(ResidualData {
        d: table.d,
        m: table.m,
        residual,
        pivot_checked: true,
    })
}

/// Divide out every factor of c and (1-c^2), substitute z = c^2 and
/// normalize. The multiplicities are recorded, not assumed.
pub fn extract_pm(res: &ResidualData) -> Result<ExtractedPm, SeriesError> {
    let mut r = res.residual.clone();
    if r.is_zero() {
        return Err(SeriesError::DegenerateResidual);
    }
    let mut mult_c = 0u32;
    while !r.is_zero() && r.coeff(0).is_zero() {
        r = PolyQ::from_coeffs(r.coeffs()[1..].to_vec());
        mult_c += 1;
    }
    let one_minus_c2 = PolyQ::from_ints(&[1, 0, -1]);
    let mut mult_q = 0u32;
    while let Ok(q) = r.divide_exact(&one_minus_c2) {
        r = q;
        mult_q += 1;
    }
    let pm = r.even_part_in_z()?.primitive_normalize()?;
    let got = pm.degree().unwrap_or(0);
    if got != res.m {
        return Err(SeriesError::UnexpectedDegree {
            expected: res.m,
            got,
        });
    }
    Ok(ExtractedPm {
        pm,
        mult_c,
        mult_one_minus_c2: mult_q,
    })
}

/// Even power series of a regular solution at y = 0:
/// u = 1 - a y^2 + u_4 y^4 + ..., in working-precision floats.
#[derive(Debug, Clone)]
pub struct ZeroSeries<R> {
    pub d: i64,
    pub a: R,
    pub order: usize,
    coeffs: Vec<R>,
}

impl<R: Real> ZeroSeries<R> {
    /// Coefficient of y^(2k).
    pub fn even_coefficient(&self, k: usize) -> R {
        self.coeffs.get(2 * k).copied().unwrap_or_else(R::zero)
    }

    /// Value and derivative at y by Horner evaluation.
    pub fn eval(&self, y: R) -> (R, R) {
        let mut u = R::zero();
        let mut du = R::zero();
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            u = u * y + c;
            if k >= 1 {
                du = du * y + c * R::from_int(k as i64);
            }
        }
        (u, du)
    }

    /// Magnitude of the last retained term at y, a truncation heuristic.
    pub fn tail_estimate(&self, y: R) -> R {
        let n = self.coeffs.len() - 1;
        (self.coeffs[n] * y.powi(n as i32)).abs()
            + (self.coeffs[n - 2] * y.powi(n as i32 - 2)).abs()
    }
}

/// Build the regular series at y = 0 up to the requested even order.
///
/// The coefficient of y^n carries the pivot (n-2)(n+d-2), which vanishes
/// only at n = 2 where -a enters as the free datum; everything above is
/// determined by the recurrence.
pub fn zero_series<R: Real>(d: i64, a: R, order: usize) -> ZeroSeries<R> {
    assert!(order >= 4 && order % 2 == 0, "order must be even and >= 4");
    assert!(a >= R::zero(), "shooting parameter must be nonnegative");
    assert!(d >= 5);
    let mut v = vec![R::zero(); order + 1];
    v[0] = R::one();
    v[2] = -a;
    for n in 3..=order {
        // Triple product of the series, excluding any factor with index n.
        let mut cube = R::zero();
        for i in 0..=n {
            if v[i] == R::zero() || i == n {
                continue;
            }
            for j in 0..=(n - i) {
                let k = n - i - j;
                if j == n || k == n || v[j] == R::zero() {
                    continue;
                }
                cube = cube + v[i] * v[j] * v[k];
            }
        }
        let t = -R::from_int(((n - 2) * (n - 1)) as i64) * v[n - 2]
            - R::from_int(d - 2) * cube;
        let pivot = R::from_int(((n - 2) * (n + d as usize - 2)) as i64);
        v[n] = -t / pivot;
    }
    for (n, &c) in v.iter().enumerate() {
        if n % 2 == 1 {
            debug_assert!(c == R::zero(), "odd coefficient {n} must vanish");
        }
    }
    ZeroSeries {
        d,
        a,
        order,
        coeffs: v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};

    #[test]
    fn first_coefficient_matches_closed_form_d7() {
        // d=7: c1 = -(5/2)(c - c^3)
        let t = derive_system(7).unwrap();
        let expected = PolyQ::from_ints(&[0, -1, 0, 1]).scale(&rat(5, 2).unwrap());
        assert_eq!(t.c_n(1), &expected);
    }

    #[test]
    fn second_coefficient_matches_triangular_equation_d9() {
        // d=9: 2 c2 + (1/2)(7 - 21 c^2) c1 = 0 with c1 = -(7/4)(c - c^3)
        let t = derive_system(9).unwrap();
        let c1 = PolyQ::from_ints(&[0, -1, 0, 1]).scale(&rat(7, 4).unwrap());
        let half_bracket = PolyQ::from_ints(&[7, 0, -21]).scale(&rat(1, 4).unwrap());
        let expected = half_bracket.mul(&c1).neg();
        assert_eq!(t.c_n(2), &expected);
    }

    #[test]
    fn admissible_constants_annihilate_all_coefficients() {
        for d in [7, 9, 11, 13] {
            let t = derive_system(d).unwrap();
            for n in 1..=t.m {
                assert!(t.c_n(n).eval(&rat_int(1)).is_zero(), "c_{n}(1) != 0 for d={d}");
                assert!(t.c_n(n).eval(&rat_int(0)).is_zero(), "c_{n}(0) != 0 for d={d}");
            }
            let res = residual_condition(&t).unwrap();
            assert!(res.pivot_checked);
            assert!(res.residual.eval(&rat_int(1)).is_zero());
            assert!(res.residual.eval(&rat_int(0)).is_zero());
            assert!(res.residual.eval(&rat_int(-1)).is_zero());
        }
    }

    #[test]
    fn even_and_small_dimensions_are_rejected() {
        assert!(matches!(derive_system(12), Err(SeriesError::EvenDimension(12))));
        assert!(matches!(derive_system(5), Err(SeriesError::DimensionTooSmall(5))));
    }

    #[test]
    fn extracted_polynomials_low_degrees() {
        let cases: [(i64, &[i64]); 4] = [
            (7, &[-1, 5]),
            (9, &[1, -77, 196]),
            (11, &[-1, 135, -2619, 4725]),
            (13, &[-12, 55, 6413, -70543, 102487]),
        ];
        for (d, expect) in cases {
            let table = derive_system(d).unwrap();
            let res = residual_condition(&table).unwrap();
            let ex = extract_pm(&res).unwrap();
            assert_eq!(ex.pm, PolyQ::from_ints(expect), "P_m mismatch for d={d}");
            assert_eq!((ex.mult_c, ex.mult_one_minus_c2), (1, 1));
        }
    }

    #[test]
    fn extracted_polynomial_m5() {
        // Frozen from three independent derivations of the same system
        // (series substitution, Fraction recurrence, derivative relations).
        let table = derive_system(15).unwrap();
        let ex = extract_pm(&residual_condition(&table).unwrap()).unwrap();
        let expect = PolyQ::from_ints(&[-116875, -71383, 3626402, 222745042]).add(
            &PolyQ::from_coeffs(vec![
                BigRational::zero(),
                BigRational::zero(),
                BigRational::zero(),
                BigRational::zero(),
                rat_int(-1762299383),
                rat_int(2201396197),
            ]),
        );
        assert_eq!(ex.pm, expect);
    }

    #[test]
    fn zero_series_constant_solution() {
        let s = zero_series::<f64>(11, 0.0, 20);
        for k in 1..=10 {
            assert_eq!(s.even_coefficient(k), 0.0);
        }
        let (u, du) = s.eval(0.5);
        assert_eq!((u, du), (1.0, 0.0));
    }

    #[test]
    fn zero_series_leading_terms() {
        // u - (1 - a y^2) = O(y^4): coefficients below y^4 are fixed.
        let a = 0.37;
        let s = zero_series::<f64>(13, a, 12);
        assert_eq!(s.even_coefficient(0), 1.0);
        assert_eq!(s.even_coefficient(1), -a);
        assert_eq!(s.coeffs[1], 0.0);
        assert_eq!(s.coeffs[3], 0.0);
        // u4 = (3(d-2)a^2 - 6a) / (2(d+2))
        let u4 = (3.0 * 11.0 * a * a - 6.0 * a) / (2.0 * 15.0);
        assert!((s.even_coefficient(2) - u4).abs() < 1e-15);
    }

    #[test]
    fn zero_series_matches_rational_solution_coefficients() {
        use crate::real::Dd;
        use crate::roots::closed_form_roots;
        // For a = alpha+/beta+ the series must reproduce the expansion of
        // the explicit rational solution: u4 = alpha+/beta+^2.
        let cf = closed_form_roots(11).unwrap();
        let alpha: Dd = cf.alpha_plus.to_real();
        let beta: Dd = cf.beta_plus.to_real();
        let a = alpha / beta;
        let s = zero_series::<Dd>(11, a, 16);
        let u4_expect = alpha / (beta * beta);
        let err = (s.even_coefficient(2) - u4_expect).abs();
        assert!(err < Dd::of(1e-28), "u4 err = {err}");
        // u6 = -alpha+/beta+^3 from the geometric expansion
        let u6_expect = -alpha / (beta * beta * beta);
        let err6 = (s.even_coefficient(3) - u6_expect).abs();
        assert!(err6 < Dd::of(1e-28), "u6 err = {err6}");
    }

    #[test]
    fn zero_series_tail_shrinks_with_order() {
        use crate::real::Dd;
        // At the shrunk launch point a*y0^2 ~ 0.03, so the default order-28
        // truncation sits near (0.03)^15, far below the integrator tolerance.
        let a = Dd::of(50.0);
        let y0 = Dd::of(0.18) / a.sqrt();
        let default_order = zero_series::<Dd>(11, a, 28);
        let doubled = zero_series::<Dd>(11, a, 56);
        let (uc, _) = default_order.eval(y0);
        let (uf, _) = doubled.eval(y0);
        let diff = (uc - uf).abs();
        assert!(diff < Dd::of(1e-20), "truncation too large: {diff}");
    }
}
