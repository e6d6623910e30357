//! Numerical side: integration of the interior similarity ODE, the shooting
//! map a -> c(a), construction of the third solution, extension past the
//! light cone in the reciprocal coordinate x = 1/y, and the autonomous
//! large-a limit.
//!
//! All routines are generic over the working-precision scalar; the default
//! configuration targets double-double arithmetic.

use crate::exact::to_real;
use crate::ode::{integrate, Dopri5Options, Integration, OdeErrorKind, OdeFailure, State};
use crate::real::Real;
use crate::roots::{analyze_case, CaseReport, ClosedFormRoots, RootsError, ShootSummary};
use crate::series::zero_series;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ShootError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("|u| exceeded 1 + 10*tol at {at} (u = {u}); launch data or tolerance is broken")]
    AmplitudeBound { at: f64, u: f64 },
    #[error("solution escaped |u| > {cap} at x = {at}")]
    Escape { at: f64, cap: f64 },
    #[error("step size underflow at {at}; last valid u = {u}")]
    StepUnderflow { at: f64, u: f64 },
    #[error("integrator step budget exhausted at {at}")]
    TooManySteps { at: f64 },
    #[error(
        "shooting bracket not found: c(a) never crossed the target before a = {limit}"
    )]
    BracketNotFound { limit: f64 },
    #[error(
        "shooting samples are not monotone decreasing (c({a_prev}) = {c_prev}, \
         c({a}) = {c}); the map a -> c(a) must decrease for d >= 10"
    )]
    NonMonotoneSamples {
        a_prev: f64,
        c_prev: f64,
        a: f64,
        c: f64,
    },
    #[error("bisection did not reach the target tolerance within {0} iterations")]
    BisectionStalled(u32),
    #[error("autonomous profile not monotone for d = {d} >= 10; integrator failure")]
    NonMonotoneAutonomous { d: i64 },
    #[error(transparent)]
    Roots(#[from] RootsError),
}

/// Tolerances and launch parameters for the numerical pipeline.
#[derive(Debug, Clone, Copy)]
pub struct ShootConfig {
    /// Integrator relative/absolute tolerance.
    pub tol: f64,
    /// Endpoint offset: integration stops at y = 1 - delta.
    pub delta: f64,
    /// Shooting tolerance on the endpoint value c.
    pub tol_c: f64,
    /// Even truncation order of the launch series at y = 0.
    pub series_order: usize,
    /// Launch point for small a; shrunk like a^-1/2 for large a.
    pub y0_base: f64,
    /// Launch offset for the exterior equation, x0 = 1 - eps.
    pub exterior_eps: f64,
    /// Escape bound for the exterior integration.
    pub exterior_cap: f64,
    /// Base number of output-grid samples for stored profiles.
    pub grid_base: usize,
}

impl Default for ShootConfig {
    fn default() -> Self {
        ShootConfig {
            tol: 1e-12,
            delta: 1e-6,
            tol_c: 1e-8,
            series_order: 28,
            y0_base: 1.0 / 16.0,
            exterior_eps: 1e-4,
            exterior_cap: 10.0,
            grid_base: 400,
        }
    }
}

impl ShootConfig {
    fn ode_options(&self) -> Dopri5Options {
        Dopri5Options {
            rtol: self.tol,
            atol: self.tol,
            ..Default::default()
        }
    }
}

/// Independent variable of a stored profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Var {
    #[serde(rename = "Y_INTERIOR")]
    YInterior,
    #[serde(rename = "X_EXTERIOR")]
    XExterior,
    #[serde(rename = "TAU")]
    Tau,
}

/// Pointwise checks over a stored profile. Flags refer to the grid samples;
/// residuals are cubic-Hermite midpoint defects, second order in the grid
/// spacing.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MonotonicityReport {
    pub u_monotone_decreasing: bool,
    pub h_nonincreasing: bool,
    pub max_h: f64,
    pub min_h: f64,
    pub h_bounds_ok: bool,
    pub gradient_bound_ok: bool,
    pub residual_max: f64,
    pub identity_residual_max: f64,
    pub degenerate_constant: bool,
}

/// Sampled solution of one of the three ODE forms.
#[derive(Debug, Clone)]
pub struct SolutionProfile<R> {
    pub d: i64,
    pub variable: Var,
    pub grid: Vec<R>,
    pub u: Vec<R>,
    pub du: Vec<R>,
    pub a: Option<R>,
    pub diagnostics: MonotonicityReport,
    /// Per-interval ODE defect, assigned to the left grid node.
    pub residuals: Vec<f64>,
    /// Integrator tolerance the samples were produced at; scales the
    /// monotonicity slack in the pointwise checks.
    pub tol: f64,
}

fn interior_rhs<R: Real>(d: i64) -> impl Fn(R, &State<R>) -> State<R> {
    let dm3 = R::from_int(d - 3);
    let dm2 = R::from_int(d - 2);
    let two = R::of(2.0);
    let one = R::one();
    move |y, s: &State<R>| {
        let (u, du) = (s[0], s[1]);
        let y2 = y * y;
        let num = -(dm3 * y - two * y2 * y) * du - dm2 * u * (one - u * u);
        [du, num / (y2 * (one - y2))]
    }
}

fn exterior_rhs<R: Real>(d: i64) -> impl Fn(R, &State<R>) -> State<R> {
    let dm5 = R::from_int(d - 5);
    let dm2 = R::from_int(d - 2);
    let one = R::one();
    move |x, s: &State<R>| {
        let (u, du) = (s[0], s[1]);
        let num = dm2 * u * (one - u * u) - dm5 * x * du;
        [du, num / (one - x * x)]
    }
}

fn autonomous_rhs<R: Real>(d: i64) -> impl Fn(R, &State<R>) -> State<R> {
    let dm4 = R::from_int(d - 4);
    let dm2 = R::from_int(d - 2);
    let one = R::one();
    move |_t, s: &State<R>| {
        let (u, du) = (s[0], s[1]);
        [du, -dm4 * du - dm2 * u * (one - u * u)]
    }
}

/// First endpoint coefficient c1(c) = -(d-2) c (1-c^2) / (d-5).
pub fn c1_of_c<R: Real>(d: i64, c: R) -> R {
    -R::from_int(d - 2) * c * (R::one() - c * c) / R::from_int(d - 5)
}

/// Explicit rational solution in the interior variable:
/// u = 1 - alpha y^2 / (y^2 + beta), returned with its derivative.
pub fn explicit_interior<R: Real>(alpha: R, beta: R, y: R) -> (R, R) {
    let den = y * y + beta;
    let u = R::one() - alpha * y * y / den;
    let du = -R::of(2.0) * alpha * beta * y / (den * den);
    (u, du)
}

/// The same solution in the exterior variable x = 1/y:
/// u = 1 - alpha / (1 + beta x^2), with derivative in x.
pub fn explicit_exterior<R: Real>(alpha: R, beta: R, x: R) -> (R, R) {
    let den = R::one() + beta * x * x;
    let u = R::one() - alpha / den;
    let du = R::of(2.0) * alpha * beta * x / (den * den);
    (u, du)
}

/// Exact endpoint data (c, c1) of one explicit solution, evaluated in the
/// quadratic field and only then rounded to working precision.
pub fn explicit_endpoint_data<R: Real>(cf: &ClosedFormRoots, plus: bool) -> (R, R) {
    let (alpha, beta) = if plus {
        (&cf.alpha_plus, &cf.beta_plus)
    } else {
        (&cf.alpha_minus, &cf.beta_minus)
    };
    let one = crate::exact::QuadExt::from_rational(crate::exact::rat_int(1), alpha.radicand())
        .expect("positive radicand");
    let c_exact = one
        .sub(&alpha.div(&beta.add(&one).expect("same radicand")).expect("beta+1 != 0"))
        .expect("same radicand");
    let c: R = c_exact.to_real();
    (c, c1_of_c(cf.d, c))
}

fn launch_point<R: Real>(a: R, cfg: &ShootConfig) -> R {
    // Keep a*y0^2 small enough that the truncated series tail is far below
    // the integrator tolerance.
    let shrink = R::of(0.18) / a.max(R::one()).sqrt();
    R::of(cfg.y0_base).min(shrink)
}

fn map_failure<R: Real>(f: Box<OdeFailure<R>>, interior: bool, cap: f64) -> ShootError {
    let at = f.t.to_f64_lossy();
    let u = f.state[0].to_f64_lossy();
    match f.kind {
        OdeErrorKind::GuardTripped if interior => ShootError::AmplitudeBound { at, u },
        OdeErrorKind::GuardTripped => ShootError::Escape { at, cap },
        OdeErrorKind::StepUnderflow => ShootError::StepUnderflow { at, u },
        OdeErrorKind::TooManySteps => ShootError::TooManySteps { at },
    }
}

/// Output grid from `from` to `to`, uniform in the core with geometric
/// refinement toward singular ends (distance-to-end ratio 0.75).
fn graded_grid<R: Real>(from: R, to: R, n_core: usize, refine_end: bool, refine_start: bool) -> Vec<R> {
    let mut pts = Vec::with_capacity(n_core + 96);
    let span = to - from;
    let mut core_lo = from;
    let mut core_hi = to;
    let edge = span.abs() * R::of(0.05);
    let dir = if span >= R::zero() { R::one() } else { -R::one() };
    if refine_start {
        core_lo = from + dir * edge;
    }
    if refine_end {
        core_hi = to - dir * edge;
    }
    if refine_start {
        // geometric approach from `from` into the core
        let mut gaps = Vec::new();
        let mut g = edge;
        let floor = span.abs() * R::of(1e-7);
        while g > floor {
            gaps.push(g);
            g = g * R::of(0.75);
        }
        pts.push(from);
        for g in gaps.iter().rev() {
            pts.push(from + dir * *g);
        }
    } else {
        pts.push(from);
    }
    let n = n_core.max(2);
    for i in 1..n {
        let th = R::of(i as f64 / n as f64);
        pts.push(core_lo + (core_hi - core_lo) * th);
    }
    if refine_end {
        let mut g = edge;
        let floor = span.abs() * R::of(1e-7);
        while g > floor {
            pts.push(to - dir * g);
            g = g * R::of(0.75);
        }
    }
    pts.push(to);
    pts.dedup_by(|a, b| *a == *b);
    pts
}

fn profile_from_integration<R: Real>(
    d: i64,
    variable: Var,
    a: Option<R>,
    run: &Integration<R>,
    tol: f64,
) -> SolutionProfile<R> {
    let mut p = SolutionProfile {
        d,
        variable,
        grid: run.ts.clone(),
        u: run.ys.iter().map(|s| s[0]).collect(),
        du: run.ys.iter().map(|s| s[1]).collect(),
        a,
        diagnostics: MonotonicityReport {
            u_monotone_decreasing: false,
            h_nonincreasing: false,
            max_h: 0.0,
            min_h: 0.0,
            h_bounds_ok: false,
            gradient_bound_ok: false,
            residual_max: 0.0,
            identity_residual_max: 0.0,
            degenerate_constant: false,
        },
        residuals: Vec::new(),
        tol,
    };
    let (report, residuals) = diagnostics_of(&p);
    p.diagnostics = report;
    p.residuals = residuals;
    p
}

/// Integrate a regular interior solution from its series launch up to y_end,
/// sampling on a graded output grid.
pub fn interior_profile<R: Real>(
    d: i64,
    a: R,
    y_end: R,
    cfg: &ShootConfig,
) -> Result<SolutionProfile<R>, ShootError> {
    if d < 5 {
        return Err(ShootError::InvalidParameter(format!("d = {d} < 5")));
    }
    if a < R::zero() {
        return Err(ShootError::InvalidParameter("a must be >= 0".into()));
    }
    if y_end >= R::one() || y_end <= R::zero() {
        return Err(ShootError::InvalidParameter(
            "y_end must lie in (0, 1)".into(),
        ));
    }
    let y0 = launch_point(a, cfg);
    if y_end <= y0 {
        return Err(ShootError::InvalidParameter(format!(
            "y_end must exceed the launch point {}",
            y0.to_f64_lossy()
        )));
    }
    let series = zero_series(d, a, cfg.series_order);
    let (u0, du0) = series.eval(y0);
    let grid = graded_grid(y0, y_end, cfg.grid_base, true, false);
    let bound = R::of(1.0 + 10.0 * cfg.tol);
    let run = integrate(
        interior_rhs(d),
        y0,
        y_end,
        [u0, du0],
        &grid,
        |_, s: &State<R>| s[0].abs() <= bound,
        &cfg.ode_options(),
    )
    .map_err(|f| map_failure(f, true, cfg.exterior_cap))?;
    Ok(profile_from_integration(d, Var::YInterior, Some(a), &run, cfg.tol))
}

/// Endpoint state (u, u') at y = 1 - delta, without profile storage.
fn rim_state<R: Real>(d: i64, a: R, cfg: &ShootConfig) -> Result<(R, R), ShootError> {
    let y0 = launch_point(a, cfg);
    let series = zero_series(d, a, cfg.series_order);
    let (u0, du0) = series.eval(y0);
    let y_end = R::one() - R::of(cfg.delta);
    let bound = R::of(1.0 + 10.0 * cfg.tol);
    let run = integrate(
        interior_rhs(d),
        y0,
        y_end,
        [u0, du0],
        &[],
        |_, s: &State<R>| s[0].abs() <= bound,
        &cfg.ode_options(),
    )
    .map_err(|f| map_failure(f, true, cfg.exterior_cap))?;
    Ok((run.y_end[0], run.y_end[1]))
}

/// Endpoint value estimate produced by [`c_of_a`].
#[derive(Debug, Clone, Copy)]
pub struct CEstimate<R> {
    pub c: R,
    /// False when the first-order endpoint correction failed to contract
    /// and the raw u(1-delta) was returned instead.
    pub corrected: bool,
}

/// The shooting map: integrate to y = 1 - delta and correct the endpoint
/// value by one series term, u(1-delta) ~ c - delta*c1(c), solved for c by
/// fixed-point iteration seeded at u(1-delta).
pub fn c_of_a<R: Real>(d: i64, a: R, cfg: &ShootConfig) -> Result<CEstimate<R>, ShootError> {
    if !(1e-8..=1e-3).contains(&cfg.delta) {
        return Err(ShootError::InvalidParameter(format!(
            "delta = {} outside [1e-8, 1e-3]",
            cfg.delta
        )));
    }
    let (u_end, _) = rim_state(d, a, cfg)?;
    let delta = R::of(cfg.delta);
    let stop = R::of(cfg.tol * 1e-3) * R::of(cfg.delta);
    let mut c = u_end;
    let mut prev_update = R::of(f64::MAX);
    for _ in 0..30 {
        let next = u_end + delta * c1_of_c(d, c);
        let update = (next - c).abs();
        c = next;
        if update <= stop {
            return Ok(CEstimate { c, corrected: true });
        }
        if update > prev_update {
            // Not contracting: fall back to the raw endpoint sample.
            return Ok(CEstimate {
                c: u_end,
                corrected: false,
            });
        }
        prev_update = update;
    }
    Ok(CEstimate { c, corrected: true })
}

/// Converged shooting parameter for a prescribed endpoint value.
#[derive(Debug, Clone, Copy)]
pub struct AStar<R> {
    pub a: R,
    pub c_achieved: R,
    pub bisection_steps: u32,
    pub bracket: (R, R),
}

/// Locate a with c(a) = c_target by geometric bracketing from a = 1 followed
/// by bisection; monotonicity of the map makes this unconditionally
/// convergent, and non-monotone samples are a hard error.
pub fn find_astar<R: Real>(
    d: i64,
    c_target: R,
    cfg: &ShootConfig,
) -> Result<AStar<R>, ShootError> {
    if c_target <= R::zero() || c_target >= R::one() {
        return Err(ShootError::InvalidParameter(
            "c_target must lie in (0, 1)".into(),
        ));
    }
    let limit = 1e12f64;
    let cfn = |a: R| -> Result<R, ShootError> { Ok(c_of_a(d, a, cfg)?.c) };
    let slack = R::of(1e-10);

    let mut a_lo = R::one();
    let mut c_lo = cfn(a_lo)?;
    let mut a_hi = a_lo;
    let mut c_hi = c_lo;
    if c_lo > c_target {
        // Need larger a on the high side.
        loop {
            let a_next = a_hi * R::of(2.0);
            if a_next.to_f64_lossy() > limit {
                return Err(ShootError::BracketNotFound { limit });
            }
            let c_next = cfn(a_next)?;
            if c_next > c_hi + slack {
                return Err(ShootError::NonMonotoneSamples {
                    a_prev: a_hi.to_f64_lossy(),
                    c_prev: c_hi.to_f64_lossy(),
                    a: a_next.to_f64_lossy(),
                    c: c_next.to_f64_lossy(),
                });
            }
            a_hi = a_next;
            c_hi = c_next;
            if c_hi <= c_target {
                break;
            }
        }
    } else {
        // Need smaller a on the low side.
        loop {
            let a_next = a_lo * R::of(0.5);
            if a_next.to_f64_lossy() < 1.0 / limit {
                return Err(ShootError::BracketNotFound { limit });
            }
            let c_next = cfn(a_next)?;
            if c_next < c_lo - slack {
                return Err(ShootError::NonMonotoneSamples {
                    a_prev: a_lo.to_f64_lossy(),
                    c_prev: c_lo.to_f64_lossy(),
                    a: a_next.to_f64_lossy(),
                    c: c_next.to_f64_lossy(),
                });
            }
            a_lo = a_next;
            c_lo = c_next;
            if c_lo >= c_target {
                break;
            }
        }
    }

    let tol_c = R::of(cfg.tol_c);
    let half = R::of(0.5);
    for iter in 0..300u32 {
        let a_mid = (a_lo + a_hi) * half;
        let c_mid = cfn(a_mid)?;
        if (c_mid - c_target).abs() < tol_c {
            return Ok(AStar {
                a: a_mid,
                c_achieved: c_mid,
                bisection_steps: iter + 1,
                bracket: (a_lo, a_hi),
            });
        }
        if c_mid > c_target {
            a_lo = a_mid;
        } else {
            a_hi = a_mid;
        }
    }
    Err(ShootError::BisectionStalled(300))
}

/// Residual of the endpoint relation (d-5) u'(1) + (d-2) c (1 - c^2) = 0 for
/// the solution launched with parameter a, using endpoint data extrapolated
/// from y = 1 - delta by one Taylor step.
pub fn endpoint_relation_residual<R: Real>(
    d: i64,
    a: R,
    cfg: &ShootConfig,
) -> Result<R, ShootError> {
    let (u_end, du_end) = rim_state(d, a, cfg)?;
    let delta = R::of(cfg.delta);
    let y = R::one() - delta;
    let rhs = interior_rhs(d);
    let ddu = rhs(y, &[u_end, du_end])[1];
    let du_at_one = du_end + delta * ddu;
    let c = c_of_a(d, a, cfg)?.c;
    Ok((R::from_int(d - 5) * du_at_one + R::from_int(d - 2) * c * (R::one() - c * c)).abs())
}

/// Taylor jet of the smooth local family at x = 1, ascending in s = 1 - x:
/// the endpoint coefficients c_n(c) of the interior expansion composed
/// through y - 1 = s / (1 - s). Terms above order m would need the free
/// coefficient and are not available from c alone.
fn exterior_jet<R: Real>(d: i64, c: R) -> Result<Vec<R>, ShootError> {
    let table = crate::series::derive_system(d).map_err(RootsError::from)?;
    let m = table.m;
    let cn: Vec<R> = (1..=m).map(|n| table.c_n(n).eval_real(c)).collect();
    // (y-1)^n = sum_j C(k-1, k-n) s^k for k >= n
    let mut jet = vec![R::zero(); m + 1];
    jet[0] = c;
    for (k, slot) in jet.iter_mut().enumerate().skip(1) {
        let mut acc = R::zero();
        for (n, &cval) in cn.iter().enumerate().take(k) {
            acc = acc + cval * R::from_int(binomial(k - 1, k - (n + 1)));
        }
        *slot = acc;
    }
    Ok(jet)
}

fn binomial(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

/// Integrate the exterior form of the equation,
/// (1-x^2) u'' + (d-5) x u' - (d-2) u (1-u^2) = 0,
/// downward from an explicitly given state at x0.
///
/// An error committed at distance s from the cone feeds the s^(m+1) branch
/// of the regular singular point at x = 1 and reaches the far end amplified
/// by (s_end/s)^(m+1). The integration is therefore split into geometric
/// segments with per-segment tolerances scheduled like s^(m+1), clamped at
/// the roundoff floor of the working precision, so that every segment
/// contributes below the requested tolerance.
pub fn extend_exterior_from_state<R: Real>(
    d: i64,
    x0: R,
    u0: R,
    du0: R,
    x_end: R,
    cfg: &ShootConfig,
) -> Result<SolutionProfile<R>, ShootError> {
    let grid = graded_grid(x0, x_end, cfg.grid_base, true, true);
    exterior_profile_on_grid(d, x0, u0, du0, x_end, &grid, cfg)
}

/// Same integration with caller-chosen output samples (descending in x).
pub fn exterior_profile_on_grid<R: Real>(
    d: i64,
    x0: R,
    u0: R,
    du0: R,
    x_end: R,
    grid: &[R],
    cfg: &ShootConfig,
) -> Result<SolutionProfile<R>, ShootError> {
    if x_end <= -R::one() || x_end >= x0 || x0 >= R::one() {
        return Err(ShootError::InvalidParameter(
            "need -1 < x_end < x0 < 1".into(),
        ));
    }
    let m1 = ((d - 3) / 2).max(2) as i32; // branch exponent m + 1
    let span = (R::one() - x_end).to_f64_lossy();
    let floor = 10.0 * 2f64.powi(-(R::MANTISSA_BITS as i32));
    let cap = R::of(cfg.exterior_cap);
    let rhs = exterior_rhs(d);
    let guard = |_: R, s: &State<R>| s[0].abs() <= cap;

    let mut t = x0;
    let mut y = [u0, du0];
    let mut out_ts: Vec<R> = Vec::new();
    let mut out_ys: Vec<State<R>> = Vec::new();
    let mut cursor = 0usize;
    loop {
        let s_here = (R::one() - t).to_f64_lossy();
        let seg_tol = (cfg.tol * (s_here / span).powi(m1) * 0.1).max(floor);
        let (seg_end, done) = if seg_tol >= cfg.tol || s_here * 4.0 >= span {
            (x_end, true)
        } else {
            (R::one() - R::of(s_here * 4.0), false)
        };
        let seg_samples_end = grid[cursor..]
            .iter()
            .position(|&g| g < seg_end)
            .map_or(grid.len(), |k| cursor + k);
        let opts = Dopri5Options {
            rtol: seg_tol.min(cfg.tol),
            atol: seg_tol.min(cfg.tol),
            ..Default::default()
        };
        let run = integrate(
            &rhs,
            t,
            seg_end,
            y,
            &grid[cursor..seg_samples_end],
            guard,
            &opts,
        )
        .map_err(|f| map_failure(f, false, cfg.exterior_cap))?;
        out_ts.extend_from_slice(&run.ts);
        out_ys.extend_from_slice(&run.ys);
        cursor = seg_samples_end;
        t = run.t_end;
        y = run.y_end;
        if done {
            break;
        }
    }
    let run = Integration {
        ts: out_ts,
        ys: out_ys,
        t_end: t,
        y_end: y,
        steps: 0,
        rejected: 0,
    };
    Ok(profile_from_integration(d, Var::XExterior, None, &run, cfg.tol))
}

/// Extend a solution with endpoint data (c, c1) past the light cone.
///
/// The launch at x = 1 - eps uses the full order-m Taylor jet of the smooth
/// local family: x = 1 is a regular singular point with exponents 0 and m+1,
/// and low-order launch data seeds the s^(m+1) branch with amplitude
/// ~ error/eps^m, which destroys the extension. With the order-m jet the
/// only deficit left is the free (m+1)-th coefficient of the particular
/// solution, which no local data in c can supply.
pub fn extend_exterior<R: Real>(
    d: i64,
    c: R,
    c1: R,
    x_end: R,
    cfg: &ShootConfig,
) -> Result<SolutionProfile<R>, ShootError> {
    let eps = R::of(cfg.exterior_eps);
    let x0 = R::one() - eps;
    if x_end <= -R::one() || x_end >= x0 {
        return Err(ShootError::InvalidParameter(
            "x_end must lie in (-1, 1 - eps)".into(),
        ));
    }
    let c1_expected = c1_of_c(d, c);
    if (c1 - c1_expected).abs() > R::of(1e-4) * c1_expected.abs().max(R::one()) {
        return Err(ShootError::InvalidParameter(format!(
            "c1 = {} inconsistent with the endpoint relation (expected {})",
            c1.to_f64_lossy(),
            c1_expected.to_f64_lossy()
        )));
    }
    let jet = exterior_jet(d, c)?;
    let mut u0 = R::zero();
    let mut dus = R::zero();
    for (k, &coeff) in jet.iter().enumerate().rev() {
        u0 = u0 * eps + coeff;
        if k >= 1 {
            dus = dus * eps + coeff * R::from_int(k as i64);
        }
    }
    // du/dx = -du/ds
    extend_exterior_from_state(d, x0, u0, -dus, x_end, cfg)
}

/// Integrate the autonomous large-a limit U'' + (d-4) U' + (d-2) U (1-U^2) = 0
/// along the unstable manifold of (U, U') = (1, 0).
pub fn autonomous_limit<R: Real>(
    d: i64,
    tau_span: f64,
    cfg: &ShootConfig,
) -> Result<SolutionProfile<R>, ShootError> {
    if tau_span <= 0.0 {
        return Err(ShootError::InvalidParameter("tau_span must be > 0".into()));
    }
    // Positive root of the linearization at (1,0):
    // lambda^2 + (d-4) lambda + f'(1) = 0 with f'(1) = -2(d-2).
    let dm4 = R::from_int(d - 4);
    let disc = dm4 * dm4 + R::of(8.0) * R::from_int(d - 2);
    let kappa = (disc.sqrt() - dm4) * R::of(0.5);
    let eps = R::of(1e-10);
    let u0 = R::one() - eps;
    let du0 = -kappa * eps;
    let t_end = R::of(tau_span);
    let n = (cfg.grid_base.max(100)).min(2000);
    let grid: Vec<R> = (0..=n)
        .map(|i| t_end * R::of(i as f64 / n as f64))
        .collect();
    let run = integrate(
        autonomous_rhs(d),
        R::zero(),
        t_end,
        [u0, du0],
        &grid,
        |_, s: &State<R>| s[0].abs() <= R::of(2.0),
        &cfg.ode_options(),
    )
    .map_err(|f| map_failure(f, false, 2.0))?;
    let profile = profile_from_integration(d, Var::Tau, None, &run, cfg.tol);
    if d >= 10 && !profile.diagnostics.u_monotone_decreasing {
        return Err(ShootError::NonMonotoneAutonomous { d });
    }
    Ok(profile)
}

/// True when the profile swings through zero and turns back up: the
/// low-dimension behavior the monotonicity statements exclude for d >= 10.
/// Swings below the sampling-noise scale do not count.
pub fn oscillation_detected<R: Real>(p: &SolutionProfile<R>) -> bool {
    let thr = R::of(1e4 * p.tol);
    let crossed = p.u.iter().any(|&u| u < -thr);
    let mut run_min = match p.u.first() {
        Some(&u) => u,
        None => return false,
    };
    let mut rise = R::zero();
    for &u in &p.u {
        run_min = run_min.min(u);
        rise = rise.max(u - run_min);
    }
    crossed && rise > thr
}

/// ODE coefficients of the stored form: A(t) u'' + B(t) u' + sgn*f(u) = 0 and
/// the weight w(t) in the dissipation identity H' = -(d-4) w u'^2.
fn form_coefficients<R: Real>(d: i64, var: Var, t: R) -> (R, R, R, R) {
    let one = R::one();
    match var {
        Var::YInterior => (
            t * t * (one - t * t),
            R::from_int(d - 3) * t - R::of(2.0) * t * t * t,
            one,
            t,
        ),
        Var::XExterior => (one - t * t, R::from_int(d - 5) * t, -one, t),
        Var::Tau => (one, R::from_int(d - 4), one, one),
    }
}

/// The dissipation functional of the stored form: the interior Lyapunov
/// quantity, its sign-flipped exterior counterpart, or the autonomous energy.
pub fn dissipation_value<R: Real>(d: i64, var: Var, t: R, u: R, du: R) -> R {
    let one = R::one();
    let q = one - u * u;
    let quarter_dm2 = R::from_int(d - 2) * R::of(0.25);
    match var {
        Var::YInterior => {
            R::of(0.5) * t * t * (one - t * t) * du * du - quarter_dm2 * q * q
        }
        Var::XExterior => R::of(0.5) * (one - t * t) * du * du + quarter_dm2 * q * q,
        // Lyapunov energy of the autonomous flow.
        Var::Tau => {
            R::of(0.5) * du * du
                + R::from_int(d - 2) * (R::of(0.5) * u * u - R::of(0.25) * u * u * u * u)
        }
    }
}

/// Pointwise verification of a stored profile: monotonicity, bounds on the
/// dissipation functional, the gradient bound, the cubic-Hermite ODE defect
/// and the finite-difference dissipation identity.
pub fn verify_profile<R: Real>(p: &SolutionProfile<R>) -> MonotonicityReport {
    diagnostics_of(p).0
}

fn diagnostics_of<R: Real>(p: &SolutionProfile<R>) -> (MonotonicityReport, Vec<f64>) {
    let d = p.d;
    let n = p.grid.len();
    // Slack for the pointwise monotonicity checks: samples are only
    // tolerance-accurate, and double-double roundoff sits far below that.
    let eps_slack = (R::unit_roundoff() * R::of(64.0)).max(R::of(100.0 * p.tol));
    let tiny = R::unit_roundoff() * R::of(64.0);
    let degenerate = p
        .u
        .iter()
        .all(|&u| (u - p.u[0]).abs() <= tiny * p.u[0].abs().max(R::one()));

    let mut u_monotone = true;
    let mut g_ok = true;
    let mut hs: Vec<R> = Vec::with_capacity(n);
    let interior = p.variable == Var::YInterior;
    let grad_bound = R::from_int(d - 2).sqrt() * R::of(0.5);
    for i in 0..n {
        let (t, u, du) = (p.grid[i], p.u[i], p.du[i]);
        hs.push(dissipation_value(d, p.variable, t, u, du));
        if i > 0 && p.u[i] > p.u[i - 1] + eps_slack {
            u_monotone = false;
        }
        if interior {
            let g = t * (R::one() - t * t).max(R::zero()).sqrt() * du.abs();
            if g >= grad_bound {
                g_ok = false;
            }
        }
    }
    let mut max_h = hs[0];
    let mut min_h = hs[0];
    for &h in &hs[1..] {
        max_h = max_h.max(h);
        min_h = min_h.min(h);
    }
    let mut h_noninc = true;
    let h_slack = eps_slack * max_h.abs().max(R::one());
    if matches!(p.variable, Var::YInterior | Var::Tau) {
        for w in hs.windows(2) {
            if w[1] > w[0] + h_slack {
                h_noninc = false;
            }
        }
    }
    let h_bounds_ok = match p.variable {
        Var::YInterior => {
            degenerate
                || (max_h < R::zero() && min_h > -R::from_int(d - 2) * R::of(0.25))
        }
        Var::XExterior => min_h >= R::zero(),
        Var::Tau => true,
    };

    // Cubic-Hermite midpoint defects: ODE residual and dissipation identity.
    let mut residuals = vec![0.0f64; n];
    let mut resid_max = 0.0f64;
    let mut ident_max = 0.0f64;
    let half = R::of(0.5);
    let quarter = R::of(0.25);
    let eighth = R::of(0.125);
    for i in 0..n.saturating_sub(1) {
        let h = p.grid[i + 1] - p.grid[i];
        if h == R::zero() {
            continue;
        }
        let (u0, u1) = (p.u[i], p.u[i + 1]);
        let (d0, d1) = (p.du[i], p.du[i + 1]);
        let tm = p.grid[i] + half * h;
        let um = half * (u0 + u1) + eighth * h * (d0 - d1);
        let dm = R::of(1.5) * (u1 - u0) / h - quarter * (d0 + d1);
        let ddm = (d1 - d0) / h;
        let (a, b, sgn, w) = form_coefficients(d, p.variable, tm);
        let fu = R::from_int(d - 2) * um * (R::one() - um * um);
        let terms = [a * ddm, b * dm, sgn * fu];
        let defect = (terms[0] + terms[1] + terms[2]).abs();
        let scale = R::one() + terms[0].abs() + terms[1].abs() + terms[2].abs();
        let r = (defect / scale).to_f64_lossy();
        residuals[i] = r;
        resid_max = resid_max.max(r);

        let dh = (hs[i + 1] - hs[i]) / h;
        let ident = (dh + R::from_int(d - 4) * w * dm * dm).abs().to_f64_lossy();
        ident_max = ident_max.max(ident);
    }

    (
        MonotonicityReport {
            u_monotone_decreasing: u_monotone,
            h_nonincreasing: h_noninc,
            max_h: max_h.to_f64_lossy(),
            min_h: min_h.to_f64_lossy(),
            h_bounds_ok,
            gradient_bound_ok: g_ok,
            residual_max: resid_max,
            identity_residual_max: ident_max,
            degenerate_constant: degenerate,
        },
        residuals,
    )
}

/// Outcome of the full shooting verification for one dimension.
#[derive(Debug)]
pub struct ShootOutcome<R: Real> {
    pub astar: AStar<R>,
    pub profile: SolutionProfile<R>,
    pub endpoint_residual: R,
}

/// Construct the third solution for a case report's z* bracket and verify it.
pub fn shoot_for_case<R: Real>(
    report: &CaseReport,
    cfg: &ShootConfig,
) -> Result<ShootOutcome<R>, ShootError> {
    let zstar = report
        .zstar()
        .ok_or_else(|| ShootError::InvalidParameter("case has no z* bracket".into()))?;
    let c_target: R = to_real::<R>(&zstar.midpoint()).sqrt();
    let astar = find_astar(report.d, c_target, cfg)?;
    let y_end = R::one() - R::of(cfg.delta);
    let profile = interior_profile(report.d, astar.a, y_end, cfg)?;
    let endpoint_residual = endpoint_relation_residual(report.d, astar.a, cfg)?;
    Ok(ShootOutcome {
        astar,
        profile,
        endpoint_residual,
    })
}

/// Run the exact pipeline and attach shooting data to the report.
pub fn analyze_with_shooting<R: Real>(
    d: i64,
    cfg: &ShootConfig,
) -> Result<CaseReport, ShootError> {
    let mut report = analyze_case(d)?;
    let outcome: ShootOutcome<R> = shoot_for_case(&report, cfg)?;
    let diag = &outcome.profile.diagnostics;
    let lemma_ok = diag.u_monotone_decreasing && diag.h_bounds_ok && diag.gradient_bound_ok;
    let zstar = report.zstar().expect("bracket exists");
    report.shoot = Some(ShootSummary {
        astar: outcome.astar.a.to_f64_lossy(),
        c_target: to_real::<R>(&zstar.midpoint()).sqrt().to_f64_lossy(),
        c_achieved: outcome.astar.c_achieved.to_f64_lossy(),
        endpoint_residual: outcome.endpoint_residual.to_f64_lossy(),
        lemma_checks_ok: lemma_ok,
        bisection_steps: outcome.astar.bisection_steps,
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Dd;
    use crate::roots::closed_form_roots;
    use num_traits::{Float, One};

    type T = Dd;

    fn cfg() -> ShootConfig {
        ShootConfig::default()
    }

    #[test]
    fn constant_solution_for_a_zero() {
        let p = interior_profile::<T>(11, T::of(0.0), T::of(0.999), &cfg()).unwrap();
        for (&u, &du) in p.u.iter().zip(&p.du) {
            assert_eq!(u.hi(), 1.0);
            assert_eq!(du.hi(), 0.0);
        }
        assert!(p.diagnostics.degenerate_constant);
        assert!(p.diagnostics.u_monotone_decreasing);
        assert!(p.diagnostics.h_bounds_ok);
        assert_eq!(p.diagnostics.max_h, 0.0);
    }

    #[test]
    fn interior_matches_explicit_solution_plus() {
        let cf = closed_form_roots(11).unwrap();
        let alpha: T = cf.alpha_plus.to_real();
        let beta: T = cf.beta_plus.to_real();
        let a = alpha / beta;
        let p = interior_profile::<T>(11, a, T::one() - T::of(1e-6), &cfg()).unwrap();
        let mut worst = 0.0f64;
        for (&y, &u) in p.grid.iter().zip(&p.u) {
            let (ue, _) = explicit_interior(alpha, beta, y);
            worst = worst.max((u - ue).abs().hi());
        }
        // oracle agreement within 50x the integrator tolerance
        assert!(worst < 50.0 * cfg().tol, "worst = {worst:e}");
    }

    #[test]
    fn interior_matches_explicit_solution_minus() {
        let cf = closed_form_roots(11).unwrap();
        let alpha: T = cf.alpha_minus.to_real();
        let beta: T = cf.beta_minus.to_real();
        assert!(beta > T::of(0.0), "beta- must be positive for d >= 11");
        let a = alpha / beta;
        let p = interior_profile::<T>(11, a, T::one() - T::of(1e-6), &cfg()).unwrap();
        let mut worst = 0.0f64;
        for (&y, &u) in p.grid.iter().zip(&p.u) {
            let (ue, _) = explicit_interior(alpha, beta, y);
            worst = worst.max((u - ue).abs().hi());
        }
        assert!(worst < 50.0 * cfg().tol, "worst = {worst:e}");
    }

    #[test]
    fn c_of_a_constant_and_explicit_values() {
        let est = c_of_a::<T>(11, T::of(0.0), &cfg()).unwrap();
        assert!(est.corrected);
        assert!((est.c - T::one()).abs().hi() < 1e-12);

        let cf = closed_form_roots(11).unwrap();
        let (c_exact, _) = explicit_endpoint_data::<T>(&cf, true);
        let alpha: T = cf.alpha_plus.to_real();
        let beta: T = cf.beta_plus.to_real();
        let est = c_of_a::<T>(11, alpha / beta, &cfg()).unwrap();
        assert!(est.corrected);
        let err = (est.c - c_exact).abs().hi();
        assert!(err < 1e-10, "err = {err:e}");
        // frozen decimal: c+ = 1 - alpha+/(1+beta+) = 0.70550504633038933...
        assert!((c_exact.hi() - 0.705505046330389).abs() < 1e-14);
    }

    #[test]
    fn c_of_a_large_parameter_tail() {
        let est = c_of_a::<T>(11, T::of(1e6), &cfg()).unwrap();
        assert!(est.c.hi() < 0.05, "c(1e6) = {}", est.c.hi());
        assert!(est.c.hi() > 0.0);
    }

    #[test]
    fn find_astar_recovers_explicit_parameters() {
        let cf = closed_form_roots(11).unwrap();
        let alpha: T = cf.alpha_plus.to_real();
        let beta: T = cf.beta_plus.to_real();
        let (c_exact, _) = explicit_endpoint_data::<T>(&cf, true);
        let got = find_astar::<T>(11, c_exact, &cfg()).unwrap();
        let expect = (alpha / beta).hi();
        assert!(
            (got.a.hi() - expect).abs() < 2e-7,
            "a = {}, expected {}",
            got.a.hi(),
            expect
        );
        // the shooting fixed point: c(find_astar(c)) = c within 2 tol_c
        assert!((got.c_achieved - c_exact).abs().hi() < 2.0 * cfg().tol_c);
    }

    #[test]
    fn find_astar_regression_for_third_solution_d11() {
        // c* = sqrt(1/21); regression value from converged runs at two
        // tolerances (see the cross-tolerance check below).
        let c_target = (T::one() / T::of(21.0)).sqrt();
        let got = find_astar::<T>(11, c_target, &cfg()).unwrap();
        assert!(
            (got.a.hi() - 3.6366965745490466).abs() < 1e-7,
            "a* = {}",
            got.a.hi()
        );
        let tighter = ShootConfig {
            tol_c: 1e-10,
            ..cfg()
        };
        let refined = find_astar::<T>(11, c_target, &tighter).unwrap();
        assert!((refined.a - got.a).abs().hi() < 1e-6);
    }

    #[test]
    fn endpoint_relation_residual_small_at_astar() {
        let c_target = (T::one() / T::of(21.0)).sqrt();
        let got = find_astar::<T>(11, c_target, &cfg()).unwrap();
        let r = endpoint_relation_residual::<T>(11, got.a, &cfg()).unwrap();
        assert!(r.hi() < 1e-5, "residual = {:e}", r.hi());
    }

    #[test]
    fn exterior_matches_explicit_solutions() {
        // Launch from the exact closed-form state at x0 and verify the
        // integration across the whole interval against the rational oracle.
        let cf = closed_form_roots(11).unwrap();
        for plus in [true, false] {
            let (alpha, beta) = if plus {
                (cf.alpha_plus.to_real::<T>(), cf.beta_plus.to_real::<T>())
            } else {
                (cf.alpha_minus.to_real::<T>(), cf.beta_minus.to_real::<T>())
            };
            let x0 = T::one() - T::of(cfg().exterior_eps);
            let (u0, du0) = explicit_exterior(alpha, beta, x0);
            let p =
                extend_exterior_from_state::<T>(11, x0, u0, du0, T::of(-0.999), &cfg()).unwrap();
            let mut worst = 0.0f64;
            for (&x, &u) in p.grid.iter().zip(&p.u) {
                let (ue, _) = explicit_exterior(alpha, beta, x);
                worst = worst.max((u - ue).abs().hi());
            }
            assert!(worst < 1e-8, "worst = {worst:e} (plus = {plus})");
            assert!(p.diagnostics.h_bounds_ok);
        }
    }

    #[test]
    fn exterior_jet_launch_stays_near_explicit_solution() {
        // The order-m jet launch misses only the free (m+1)-th coefficient;
        // the resulting profile is a nearby exact solution, bounded on the
        // whole interval. The closed form bounds the drift.
        let cf = closed_form_roots(11).unwrap();
        let (c, c1) = explicit_endpoint_data::<T>(&cf, true);
        let p = extend_exterior::<T>(11, c, c1, T::of(-0.999), &cfg()).unwrap();
        let alpha: T = cf.alpha_plus.to_real();
        let beta: T = cf.beta_plus.to_real();
        let mut worst = 0.0f64;
        for (&x, &u) in p.grid.iter().zip(&p.u) {
            let (ue, _) = explicit_exterior(alpha, beta, x);
            worst = worst.max((u - ue).abs().hi());
        }
        assert!(worst < 1.0, "drift from free coefficient too large: {worst:e}");
        assert!(p.diagnostics.h_bounds_ok);
        assert!(p.u.iter().all(|u| u.abs() < T::of(10.0)));
    }

    #[test]
    fn exterior_rejects_inconsistent_endpoint_data() {
        let err = extend_exterior::<T>(11, T::of(0.7), T::of(40.0), T::of(-0.9), &cfg());
        assert!(matches!(err, Err(ShootError::InvalidParameter(_))));
    }

    #[test]
    fn exterior_escape_reports_location() {
        // A state far outside the attractor blows up quickly.
        let err = extend_exterior_from_state::<T>(
            11,
            T::of(0.9999),
            T::of(3.0),
            T::of(-40.0),
            T::of(-0.9),
            &cfg(),
        );
        match err {
            Err(ShootError::Escape { cap, .. }) => assert_eq!(cap, 10.0),
            other => panic!("expected escape, got {other:?}"),
        }
    }

    #[test]
    fn autonomous_decay_monotone_high_dimensions() {
        for d in [10i64, 11, 19] {
            let p = autonomous_limit::<T>(d, 30.0, &cfg()).unwrap();
            assert!(p.diagnostics.u_monotone_decreasing, "d = {d}");
            assert!(p.u.last().unwrap().abs().hi() < 1e-6, "d = {d}");
            assert!(!oscillation_detected(&p));
        }
    }

    #[test]
    fn autonomous_oscillates_in_dimension_five() {
        let err = autonomous_limit::<T>(5, 30.0, &cfg());
        // d = 5 is allowed to oscillate; it must not be reported as an error
        let p = err.unwrap();
        assert!(oscillation_detected(&p));
        assert!(!p.diagnostics.u_monotone_decreasing);
    }

    #[test]
    fn corrupted_profile_fails_residual_check() {
        let cf = closed_form_roots(11).unwrap();
        let alpha: T = cf.alpha_plus.to_real();
        let beta: T = cf.beta_plus.to_real();
        let mut p = interior_profile::<T>(11, alpha / beta, T::of(0.9), &cfg()).unwrap();
        let clean = p.diagnostics.residual_max;
        let mid = p.u.len() / 2;
        p.u[mid] = p.u[mid] + T::of(1e-3);
        let report = verify_profile(&p);
        assert!(
            report.residual_max > 1e3 * clean.max(1e-12),
            "corruption not detected: clean = {clean:e}, corrupted = {:e}",
            report.residual_max
        );
    }

    #[test]
    fn hermite_defect_shrinks_at_second_order() {
        // Refining the output grid by 2x must cut the defect ~4x. Grids are
        // kept coarse so the h^2 interpolation term dominates the tol/h^2
        // sampling-noise floor of the estimator.
        let cf = closed_form_roots(11).unwrap();
        let alpha: T = cf.alpha_plus.to_real();
        let beta: T = cf.beta_plus.to_real();
        let a = alpha / beta;
        let profiles: Vec<_> = [24usize, 48, 96]
            .iter()
            .map(|&n| {
                let c = ShootConfig { grid_base: n, ..cfg() };
                interior_profile::<T>(11, a, T::of(0.9), &c).unwrap()
            })
            .collect();
        for w in profiles.windows(2) {
            let ratio = w[0].diagnostics.residual_max / w[1].diagnostics.residual_max;
            assert!(ratio > 3.0 && ratio < 5.5, "ratio = {ratio}");
            let ratio_h = w[0].diagnostics.identity_residual_max
                / w[1].diagnostics.identity_residual_max;
            assert!(ratio_h > 3.0 && ratio_h < 5.5, "identity ratio = {ratio_h}");
        }
    }
}
