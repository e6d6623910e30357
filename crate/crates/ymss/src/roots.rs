//! Closed-form endpoint values z± in Q(sqrt(D)), the factor split
//! P_m = (z - z-)(z - z+) S_m, coefficient sign checks, exact root counting
//! and the ordering of the third root z* against z±.

use crate::exact::{rat, rat_int, rat_str, to_f64_nearest, BigRational, ExactError, QuadExt};
use crate::poly::{PolyError, PolyQ, RootInterval};
use crate::series::{derive_system, extract_pm, residual_condition, SeriesError};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RootsError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("closed-form solutions require odd d >= 11, got {0}")]
    DimensionTooSmall(i64),
    #[error(
        "the quadratic factor built from the explicit roots does not divide the derived \
         polynomial: series pipeline and closed forms disagree"
    )]
    FactorizationInconsistent,
    #[error("quotient after removing the explicit roots has degree {got}, expected {expected}")]
    WrongQuotientDegree { expected: usize, got: usize },
    #[error("root count mismatch: Sturm on P_m gives {direct}, 2 + count on S_m gives {via_sm}")]
    RootCountMismatch { direct: usize, via_sm: usize },
    #[error("explicit roots violate 0 < z- < z+ < 1")]
    ExplicitRootsOutsideInterval,
    #[error("ordering refinement did not separate z* from z± within the iteration budget")]
    OrderingUndecided,
    #[error("appendix checks did not isolate a unique root; no ordering to compute")]
    NoUniqueRoot,
}

/// Exact endpoint data of the two explicit rational solutions.
#[derive(Debug, Clone)]
pub struct ClosedFormRoots {
    pub d: i64,
    pub alpha_plus: QuadExt,
    pub alpha_minus: QuadExt,
    pub beta_plus: QuadExt,
    pub beta_minus: QuadExt,
    pub z_plus: QuadExt,
    pub z_minus: QuadExt,
    /// Monic z^2 - (z+ + z-) z + z+ z- with exactly rational coefficients.
    pub quad_factor: PolyQ,
}

/// Ordering of the shooting root z* relative to the explicit pair z±.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RootOrdering {
    #[serde(rename = "MINUS_STAR_PLUS")]
    MinusStarPlus,
    #[serde(rename = "STAR_MINUS_PLUS")]
    StarMinusPlus,
    #[serde(rename = "OTHER")]
    Other,
}

impl std::fmt::Display for RootOrdering {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RootOrdering::MinusStarPlus => "MINUS_STAR_PLUS",
            RootOrdering::StarMinusPlus => "STAR_MINUS_PLUS",
            RootOrdering::Other => "OTHER",
        })
    }
}

/// Build alpha±, beta± and z± = (1 - alpha±/(beta±+1))^2 in Q(sqrt(D)) with
/// D = 3(d-2)(d-4), plus the rational quadratic factor they satisfy.
pub fn closed_form_roots(d: i64) -> Result<ClosedFormRoots, RootsError> {
    if d < 11 || d % 2 == 0 {
        return Err(RootsError::DimensionTooSmall(d));
    }
    let big_d = 3 * (d - 2) * (d - 4);
    let half = |sign: i64| -> Result<(QuadExt, QuadExt, QuadExt), RootsError> {
        let alpha = QuadExt::new(rat_int(2), rat(sign * 2, 3 * (d - 2))?, big_d)?;
        let beta = QuadExt::new(rat(2 * (d - 4), 3)?, rat(sign, 3)?, big_d)?;
        let one = QuadExt::from_rational(rat_int(1), big_d)?;
        let inner = one.sub(&alpha.div(&beta.add(&one)?)?)?;
        let z = inner.mul(&inner)?;
        Ok((alpha, beta, z))
    };
    let (alpha_plus, beta_plus, z_plus) = half(1)?;
    let (alpha_minus, beta_minus, z_minus) = half(-1)?;
    debug_assert!(z_minus == z_plus.conj() || z_plus.is_rational());

    let zero = BigRational::zero();
    let one = rat_int(1);
    let inside = z_minus.cmp_rational(&zero).is_gt()
        && z_plus.cmp_rational(&one).is_lt()
        && z_minus.sub(&z_plus)?.sign() < 0;
    if !inside {
        return Err(RootsError::ExplicitRootsOutsideInterval);
    }

    // Sum and product of the pair are exactly rational: conjugate
    // combinations for irrational sqrt(D), plain rationals when D is a
    // perfect square (which does happen, e.g. d = 29 gives D = 45^2).
    let tr = z_plus
        .add(&z_minus)?
        .as_rational()
        .expect("z+ + z- is rational")
        .clone();
    let nm = z_plus
        .mul(&z_minus)?
        .as_rational()
        .expect("z+ * z- is rational")
        .clone();
    let quad_factor = PolyQ::from_coeffs(vec![nm, -tr, rat_int(1)]);
    Ok(ClosedFormRoots {
        d,
        alpha_plus,
        alpha_minus,
        beta_plus,
        beta_minus,
        z_plus,
        z_minus,
        quad_factor,
    })
}

/// Divide the explicit quadratic factor out of P_m; exactness of this
/// division is the strongest cross-check between the series pipeline and
/// the closed-form solutions.
pub fn split_sm(pm: &PolyQ, roots: &ClosedFormRoots) -> Result<PolyQ, RootsError> {
    let q = pm
        .divide_exact(&roots.quad_factor)
        .map_err(|_| RootsError::FactorizationInconsistent)?;
    let sm = q.primitive_normalize()?;
    let m = pm.degree().unwrap_or(0);
    let got = sm.degree().unwrap_or(0);
    if got + 2 != m {
        return Err(RootsError::WrongQuotientDegree {
            expected: m - 2,
            got,
        });
    }
    Ok(sm)
}

/// Outcome of the coefficient-sign and unique-zero checks on S_m.
#[derive(Debug, Clone)]
pub struct AppendixChecks {
    /// Leading coefficient positive and every lower coefficient negative.
    pub sign_ok: bool,
    pub s_at_0_negative: bool,
    pub s_at_1_positive: bool,
    pub unique_zero: bool,
    pub zstar: Option<RootInterval>,
}

/// Width of the exact bracket around z*: 10^-30.
fn zstar_width() -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(10u32).pow(30))
}

/// Check the sign pattern of S_m, evaluate its endpoint signs exactly and,
/// when the root in (0,1) is unique, isolate it to width 10^-30.
///
/// A root count other than one is reported, not treated as an error: for
/// dimensions beyond the verified range the pattern is open territory.
pub fn appendix_checks(sm: &PolyQ) -> Result<AppendixChecks, RootsError> {
    let pattern = sm.sign_pattern();
    let sign_ok = pattern.first() == Some(&1) && pattern.iter().skip(1).all(|&s| s == -1);
    let zero = BigRational::zero();
    let one = rat_int(1);
    let s_at_0_negative = sm.eval(&zero).is_negative();
    let s_at_1_positive = sm.eval(&one).is_positive();
    let count = sm.sturm_count(&zero, &one);
    let unique_zero = count == 1;
    let zstar = if unique_zero {
        let bracket = RootInterval::new(zero, one)?;
        Some(sm.isolate_root(&bracket, &zstar_width())?)
    } else {
        None
    };
    Ok(AppendixChecks {
        sign_ok,
        s_at_0_negative,
        s_at_1_positive,
        unique_zero,
        zstar,
    })
}

/// Number of roots of the derived P_m in the open interval (0,1).
pub fn count_n(d: i64) -> Result<usize, RootsError> {
    let table = derive_system(d)?;
    let ex = extract_pm(&residual_condition(&table)?)?;
    Ok(ex.pm.sturm_count(&BigRational::zero(), &rat_int(1)))
}

/// Where a rational point sits relative to the pair z- < z+.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    BelowMinus,
    Between,
    AbovePlus,
    OnRoot,
}

/// Classify q against z± using only the sign of the rational quadratic
/// q^2 - tr q + nm and the position of q relative to tr/2.
fn classify(q: &BigRational, quad: &PolyQ) -> Region {
    let v = quad.eval(q);
    if v.is_zero() {
        return Region::OnRoot;
    }
    if v.is_negative() {
        return Region::Between;
    }
    let tr_half = -quad.coeff(1) / rat_int(2);
    if *q < tr_half {
        Region::BelowMinus
    } else {
        Region::AbovePlus
    }
}

/// Decide the ordering of z* against z± by exact sign tests, refining the
/// z* bracket by bisection on S_m whenever its endpoints straddle one of
/// the explicit roots.
pub fn ordering(
    sm: &PolyQ,
    zstar: &RootInterval,
    roots: &ClosedFormRoots,
) -> Result<RootOrdering, RootsError> {
    let quad = &roots.quad_factor;
    let mut lo = zstar.lo.clone();
    let mut hi = zstar.hi.clone();
    let slo_pos = sm.eval(&lo).is_positive();
    let two = rat_int(2);
    // z* was produced by exact division-tested S_m, so it cannot coincide
    // with z±; the loop terminates long before this budget.
    for _ in 0..1_000_000u32 {
        let rl = classify(&lo, quad);
        let rh = classify(&hi, quad);
        if rl == rh && rl != Region::OnRoot {
            return Ok(match rl {
                Region::BelowMinus => RootOrdering::StarMinusPlus,
                Region::Between => RootOrdering::MinusStarPlus,
                Region::AbovePlus | Region::OnRoot => RootOrdering::Other,
            });
        }
        let mid = (&lo + &hi) / &two;
        let v = sm.eval(&mid);
        if v.is_zero() {
            // Exact hit: shrink a hair to both sides of the root.
            let w = (&hi - &lo) / rat_int(4);
            lo = &mid - &w;
            hi = &mid + &w;
            continue;
        }
        if v.is_positive() == slo_pos {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(RootsError::OrderingUndecided)
}

/// Exact quantities serialized for reports.
#[derive(Debug, Clone, Serialize)]
pub struct PolyInfo {
    /// Ascending `num/den` coefficients.
    pub coeffs: Vec<String>,
    pub pretty: String,
}

impl PolyInfo {
    pub fn of(p: &PolyQ, var: &str) -> Self {
        PolyInfo {
            coeffs: p.coeff_strings(),
            pretty: p.pretty(var),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadExtInfo {
    pub exact: String,
    #[serde(serialize_with = "crate::report::ser_g17")]
    pub approx: f64,
}

impl QuadExtInfo {
    fn of(x: &QuadExt) -> Self {
        QuadExtInfo {
            exact: x.to_string(),
            approx: x.to_f64(),
        }
    }
}

/// Shooting data attached to a case by the numerical layer.
#[derive(Debug, Clone, Serialize)]
pub struct ShootSummary {
    #[serde(serialize_with = "crate::report::ser_g17")]
    pub astar: f64,
    #[serde(serialize_with = "crate::report::ser_g17")]
    pub c_target: f64,
    #[serde(serialize_with = "crate::report::ser_g17")]
    pub c_achieved: f64,
    #[serde(serialize_with = "crate::report::ser_g17")]
    pub endpoint_residual: f64,
    pub lemma_checks_ok: bool,
    pub bisection_steps: u32,
}

/// Complete verification record for one dimension.
#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub d: i64,
    pub m: usize,
    pub pm: PolyInfo,
    pub sm: Option<PolyInfo>,
    pub n_roots: usize,
    pub mult_c: u32,
    pub mult_one_minus_c2: u32,
    pub division_exact: bool,
    pub double_entry_ok: bool,
    pub sign_pattern_ok: bool,
    pub s_at_0_negative: bool,
    pub s_at_1_positive: bool,
    pub unique_zero: bool,
    pub zstar_lo: Option<String>,
    pub zstar_hi: Option<String>,
    #[serde(serialize_with = "crate::report::ser_g17_opt")]
    pub zstar_approx: Option<f64>,
    pub z_minus: Option<QuadExtInfo>,
    pub z_plus: Option<QuadExtInfo>,
    pub ordering: Option<RootOrdering>,
    pub shoot: Option<ShootSummary>,
    /// Hard internal-consistency verdict; reported findings such as the
    /// sign pattern do not gate it.
    pub pass: bool,
}

impl CaseReport {
    pub fn zstar(&self) -> Option<RootInterval> {
        let lo = self.zstar_lo.as_ref()?;
        let hi = self.zstar_hi.as_ref()?;
        let parse = |s: &str| -> Option<BigRational> {
            let (n, d) = s.split_once('/')?;
            Some(BigRational::new(n.parse().ok()?, d.parse().ok()?))
        };
        RootInterval::new(parse(lo)?, parse(hi)?).ok()
    }
}

/// Run the exact pipeline for one dimension: derive, extract, split,
/// check, count and order. Shooting data is attached separately.
pub fn analyze_case(d: i64) -> Result<CaseReport, RootsError> {
    let table = derive_system(d)?;
    let res = residual_condition(&table)?;
    let ex = extract_pm(&res)?;
    let zero = BigRational::zero();
    let one = rat_int(1);
    let n_direct = ex.pm.sturm_count(&zero, &one);

    let mut report = CaseReport {
        d,
        m: res.m,
        pm: PolyInfo::of(&ex.pm, "z"),
        sm: None,
        n_roots: n_direct,
        mult_c: ex.mult_c,
        mult_one_minus_c2: ex.mult_one_minus_c2,
        division_exact: false,
        double_entry_ok: false,
        sign_pattern_ok: false,
        s_at_0_negative: false,
        s_at_1_positive: false,
        unique_zero: false,
        zstar_lo: None,
        zstar_hi: None,
        zstar_approx: None,
        z_minus: None,
        z_plus: None,
        ordering: None,
        shoot: None,
        pass: false,
    };

    if d < 11 {
        // No explicit pair below d = 11; the exact pipeline alone decides.
        report.pass = true;
        return Ok(report);
    }

    let roots = closed_form_roots(d)?;
    let sm = split_sm(&ex.pm, &roots)?;
    report.division_exact = true;
    report.sm = Some(PolyInfo::of(&sm, "z"));
    report.z_minus = Some(QuadExtInfo::of(&roots.z_minus));
    report.z_plus = Some(QuadExtInfo::of(&roots.z_plus));

    let checks = appendix_checks(&sm)?;
    report.sign_pattern_ok = checks.sign_ok;
    report.s_at_0_negative = checks.s_at_0_negative;
    report.s_at_1_positive = checks.s_at_1_positive;
    report.unique_zero = checks.unique_zero;

    // Double-entry count: z± lie strictly inside (0,1), so the direct Sturm
    // count of P_m must be exactly two more than the count on S_m.
    let n_sm = sm.sturm_count(&zero, &one);
    if n_direct != n_sm + 2 {
        return Err(RootsError::RootCountMismatch {
            direct: n_direct,
            via_sm: n_sm + 2,
        });
    }
    report.double_entry_ok = true;

    if let Some(zstar) = checks.zstar {
        report.zstar_lo = Some(rat_str(&zstar.lo));
        report.zstar_hi = Some(rat_str(&zstar.hi));
        report.zstar_approx = Some(to_f64_nearest(&zstar.midpoint()));
        report.ordering = Some(ordering(&sm, &zstar, &roots)?);
    }

    report.pass = report.division_exact && report.double_entry_ok;
    Ok(report)
}
