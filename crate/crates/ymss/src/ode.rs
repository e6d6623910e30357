//! Embedded Dormand-Prince 5(4) integration for two-component systems,
//! generic over the working-precision scalar, with fourth-order dense
//! output used to sample profiles on caller-supplied grids.

use crate::real::Real;
use std::fmt;

pub type State<R> = [R; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeErrorKind {
    /// The controller pushed the step below the roundoff floor.
    StepUnderflow,
    /// The caller-supplied state guard returned false.
    GuardTripped,
    /// Step budget exhausted.
    TooManySteps,
}

/// Failed integration, carrying the last valid point and all samples
/// produced before the failure.
#[derive(Debug)]
pub struct OdeFailure<R: Real> {
    pub kind: OdeErrorKind,
    pub t: R,
    pub state: State<R>,
    pub partial: Integration<R>,
}

impl<R: Real> fmt::Display for OdeFailure<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            OdeErrorKind::StepUnderflow => "step size underflow",
            OdeErrorKind::GuardTripped => "state guard tripped",
            OdeErrorKind::TooManySteps => "step budget exhausted",
        };
        write!(
            f,
            "{what} at t = {} (u = {}, u' = {})",
            self.t, self.state[0], self.state[1]
        )
    }
}

impl<R: Real> std::error::Error for OdeFailure<R> {}

#[derive(Debug, Clone)]
pub struct Integration<R> {
    /// Dense-output samples at the requested grid points.
    pub ts: Vec<R>,
    pub ys: Vec<State<R>>,
    pub t_end: R,
    pub y_end: State<R>,
    pub steps: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5Options {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Initial step as a fraction of the span.
    pub first_step_fraction: f64,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Dopri5Options {
            rtol: 1e-12,
            atol: 1e-12,
            max_steps: 1_000_000,
            first_step_fraction: 1e-4,
        }
    }
}

struct Tableau<R> {
    c: [R; 6],
    a: [[R; 6]; 6],
    e: [R; 7],
    d: [R; 7],
}

fn tableau<R: Real>() -> Tableau<R> {
    let r = R::ratio;
    let z = R::zero();
    Tableau {
        c: [r(1, 5), r(3, 10), r(4, 5), r(8, 9), r(1, 1), r(1, 1)],
        a: [
            [r(1, 5), z, z, z, z, z],
            [r(3, 40), r(9, 40), z, z, z, z],
            [r(44, 45), r(-56, 15), r(32, 9), z, z, z],
            [
                r(19372, 6561),
                r(-25360, 2187),
                r(64448, 6561),
                r(-212, 729),
                z,
                z,
            ],
            [
                r(9017, 3168),
                r(-355, 33),
                r(46732, 5247),
                r(49, 176),
                r(-5103, 18656),
                z,
            ],
            // fifth-order solution row (doubles as the b vector)
            [
                r(35, 384),
                z,
                r(500, 1113),
                r(125, 192),
                r(-2187, 6784),
                r(11, 84),
            ],
        ],
        e: [
            r(71, 57600),
            z,
            r(-71, 16695),
            r(71, 1920),
            r(-17253, 339200),
            r(22, 525),
            r(-1, 40),
        ],
        d: [
            r(-12715105075, 11282082432),
            z,
            r(87487479700, 32700410799),
            r(-10690763975, 1880347072),
            r(701980252875, 199316789632),
            r(-1453857185, 822651844),
            r(69997945, 29380423),
        ],
    }
}

#[inline]
fn axpy<R: Real>(y: &State<R>, h: R, terms: &[(R, &State<R>)]) -> State<R> {
    let mut out = *y;
    for &(w, k) in terms {
        out[0] = out[0] + h * w * k[0];
        out[1] = out[1] + h * w * k[1];
    }
    out
}

/// Integrate `y' = f(t, y)` from t0 to t_end (either direction), emitting
/// dense-output samples at `samples` (sorted in the direction of travel).
/// `guard` is checked on every accepted state; returning false aborts.
pub fn integrate<R, F, G>(
    f: F,
    t0: R,
    t_end: R,
    y0: State<R>,
    samples: &[R],
    guard: G,
    opts: &Dopri5Options,
) -> Result<Integration<R>, Box<OdeFailure<R>>>
where
    R: Real,
    F: Fn(R, &State<R>) -> State<R>,
    G: Fn(R, &State<R>) -> bool,
{
    let tb = tableau::<R>();
    let span = t_end - t0;
    let dir = if span >= R::zero() { R::one() } else { -R::one() };
    let mut h = span * R::of(opts.first_step_fraction);
    let h_floor = span.abs() * R::unit_roundoff() * R::of(64.0);

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut out = Integration {
        ts: Vec::with_capacity(samples.len()),
        ys: Vec::with_capacity(samples.len()),
        t_end: t0,
        y_end: y0,
        steps: 0,
        rejected: 0,
    };
    let mut cursor = 0usize;
    while cursor < samples.len() && (samples[cursor] - t0) * dir <= R::zero() {
        out.ts.push(samples[cursor]);
        out.ys.push(y0);
        cursor += 1;
    }
    let fail = |kind, t, state, partial| Err(Box::new(OdeFailure { kind, t, state, partial }));

    loop {
        if out.steps >= opts.max_steps {
            return fail(OdeErrorKind::TooManySteps, t, y, out);
        }
        if h.abs() < h_floor {
            return fail(OdeErrorKind::StepUnderflow, t, y, out);
        }
        let mut last = false;
        if (t + h - t_end) * dir >= R::zero() {
            h = t_end - t;
            last = true;
        }

        let k2 = f(t + tb.c[0] * h, &axpy(&y, h, &[(tb.a[0][0], &k1)]));
        let k3 = f(
            t + tb.c[1] * h,
            &axpy(&y, h, &[(tb.a[1][0], &k1), (tb.a[1][1], &k2)]),
        );
        let k4 = f(
            t + tb.c[2] * h,
            &axpy(
                &y,
                h,
                &[(tb.a[2][0], &k1), (tb.a[2][1], &k2), (tb.a[2][2], &k3)],
            ),
        );
        let k5 = f(
            t + tb.c[3] * h,
            &axpy(
                &y,
                h,
                &[
                    (tb.a[3][0], &k1),
                    (tb.a[3][1], &k2),
                    (tb.a[3][2], &k3),
                    (tb.a[3][3], &k4),
                ],
            ),
        );
        let k6 = f(
            t + tb.c[4] * h,
            &axpy(
                &y,
                h,
                &[
                    (tb.a[4][0], &k1),
                    (tb.a[4][1], &k2),
                    (tb.a[4][2], &k3),
                    (tb.a[4][3], &k4),
                    (tb.a[4][4], &k5),
                ],
            ),
        );
        let y1 = axpy(
            &y,
            h,
            &[
                (tb.a[5][0], &k1),
                (tb.a[5][2], &k3),
                (tb.a[5][3], &k4),
                (tb.a[5][4], &k5),
                (tb.a[5][5], &k6),
            ],
        );
        let t1 = t + h;
        let k7 = f(t1, &y1);

        // Scaled RMS of the embedded 4th/5th-order difference.
        let ks = [&k1, &k2, &k3, &k4, &k5, &k6, &k7];
        let mut err_sq = 0.0f64;
        for c in 0..2 {
            let mut e = R::zero();
            for (i, k) in ks.iter().enumerate() {
                e = e + tb.e[i] * k[c];
            }
            e = e * h;
            let scale = opts.atol + opts.rtol * y[c].abs().max(y1[c].abs()).to_f64_lossy();
            let r = e.to_f64_lossy() / scale;
            err_sq += r * r;
        }
        let err = (err_sq / 2.0).sqrt();

        if err <= 1.0 {
            // Accepted: emit dense samples inside (t, t1].
            if cursor < samples.len() {
                let dy = [y1[0] - y[0], y1[1] - y[1]];
                let r1 = y;
                let r2 = dy;
                let r3 = [h * k1[0] - dy[0], h * k1[1] - dy[1]];
                let r4 = [
                    dy[0] - h * k7[0] - r3[0],
                    dy[1] - h * k7[1] - r3[1],
                ];
                let mut r5 = [R::zero(); 2];
                for c in 0..2 {
                    let mut acc = R::zero();
                    for (i, k) in ks.iter().enumerate() {
                        acc = acc + tb.d[i] * k[c];
                    }
                    r5[c] = acc * h;
                }
                while cursor < samples.len() && (samples[cursor] - t1) * dir <= R::zero() {
                    let s = samples[cursor];
                    let th = (s - t) / h;
                    let omt = R::one() - th;
                    let mut ys = [R::zero(); 2];
                    for c in 0..2 {
                        ys[c] = r1[c]
                            + th * (r2[c] + omt * (r3[c] + th * (r4[c] + omt * r5[c])));
                    }
                    out.ts.push(s);
                    out.ys.push(ys);
                    cursor += 1;
                }
            }
            t = t1;
            y = y1;
            k1 = k7;
            out.steps += 1;
            if !guard(t, &y) {
                return fail(OdeErrorKind::GuardTripped, t, y, out);
            }
            if last {
                out.t_end = t;
                out.y_end = y;
                return Ok(out);
            }
        } else {
            out.rejected += 1;
        }
        let fac = (0.9 * err.max(1e-300).powf(-0.2)).clamp(0.2, 5.0);
        h = h * R::of(fac);
    }
}
