//! Command-line front end: derivation, counting, analysis, shooting,
//! exterior extension, the autonomous limit, range sweeps and the full
//! verification run.

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use std::io::Write;
use std::process::ExitCode;
use ymss::exact::to_real;
use ymss::real::{Dd, Real};
use ymss::report::{self, g17};
use ymss::roots::{analyze_case, CaseReport};
use ymss::shoot::{
    analyze_with_shooting, autonomous_limit, c_of_a, explicit_endpoint_data, extend_exterior,
    find_astar, interior_profile, oscillation_detected, ShootConfig,
};

#[derive(Parser)]
#[command(
    name = "ymss",
    version,
    about = "Self-similar solutions of SO(d) Yang-Mills equations in odd dimensions: \
             exact polynomial derivation, root counting, and numerical shooting"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Integrator relative/absolute tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    /// Endpoint offset: interior integration stops at y = 1 - delta.
    #[arg(long, global = true, default_value_t = 1e-6)]
    delta: f64,
    /// Shooting tolerance on the endpoint value c.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tolc: f64,
    /// Working precision: 53 selects f64, anything higher double-double (106).
    #[arg(long, global = true, default_value_t = 106)]
    prec_bits: u32,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Branch {
    Plus,
    Minus,
    Star,
}

#[derive(Subcommand)]
enum Cmd {
    /// Derive the polynomial P_m from the endpoint coefficient system.
    Derive {
        #[arg(long)]
        d: Option<i64>,
        #[arg(long)]
        m: Option<i64>,
        /// Also emit the solved coefficient polynomials c_1..c_m.
        #[arg(long)]
        full_table: bool,
    },
    /// Count the roots of P_m in (0,1) by exact Sturm sequences.
    Count {
        #[arg(long)]
        d: Option<i64>,
        #[arg(long)]
        m: Option<i64>,
    },
    /// Full exact verification record for one dimension.
    Analyze {
        #[arg(long)]
        d: Option<i64>,
        #[arg(long)]
        m: Option<i64>,
        /// Also construct the third solution numerically.
        #[arg(long)]
        shoot: bool,
    },
    /// Integrate the interior equation / construct the third solution.
    Shoot {
        #[arg(long)]
        d: Option<i64>,
        #[arg(long)]
        m: Option<i64>,
        /// Integrate a single profile with this shooting parameter.
        #[arg(long)]
        a: Option<f64>,
        /// Shoot for this endpoint value instead of the default sqrt(z*).
        #[arg(long)]
        c_target: Option<f64>,
    },
    /// Extend a solution past the light cone in the variable x = 1/y.
    Extend {
        #[arg(long)]
        d: Option<i64>,
        #[arg(long)]
        m: Option<i64>,
        #[arg(long, value_enum, default_value_t = Branch::Star)]
        branch: Branch,
        #[arg(long, default_value_t = -0.999, allow_hyphen_values = true)]
        x_end: f64,
    },
    /// Integrate the autonomous large-a limit.
    Limit {
        #[arg(long)]
        d: Option<i64>,
        #[arg(long)]
        m: Option<i64>,
        #[arg(long, default_value_t = 30.0)]
        tau_span: f64,
    },
    /// Run the exact pipeline over a range of m values.
    Sweep {
        /// Range of m values, e.g. 3..15 (inclusive).
        #[arg(long, default_value = "3..15")]
        m: String,
        /// Also construct the third solution for every case.
        #[arg(long)]
        shoot: bool,
    },
    /// Sweep plus per-dimension shooting oracle checks; nonzero exit on any failure.
    VerifyAll {
        #[arg(long, default_value = "3..15")]
        m: String,
    },
}

fn resolve_dimension(d: Option<i64>, m: Option<i64>) -> Result<i64, String> {
    match (d, m) {
        (Some(d), None) => Ok(d),
        (None, Some(m)) => Ok(2 * m + 5),
        (Some(d), Some(m)) if d == 2 * m + 5 => Ok(d),
        (Some(d), Some(m)) => Err(format!(
            "--d {d} and --m {m} disagree: d = 2m+5 requires d = {}",
            2 * m + 5
        )),
        (None, None) => Err("one of --d or --m is required".into()),
    }
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("range must look like 3..15, got {s}"))?;
    let lo: i64 = lo.trim().parse().map_err(|_| format!("bad range start {lo}"))?;
    let hi: i64 = hi.trim().parse().map_err(|_| format!("bad range end {hi}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn emit(cli: &Cli, text: String) -> std::io::Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn shoot_config(cli: &Cli) -> ShootConfig {
    ShootConfig {
        tol: cli.tol,
        delta: cli.delta,
        tol_c: cli.tolc,
        ..Default::default()
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn failure(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = if cli.prec_bits <= 53 {
        run_with::<f64>
    } else {
        run_with::<Dd>
    };
    run(&cli)
}

fn run_with<R: Real>(cli: &Cli) -> ExitCode {
    match dispatch::<R>(cli) {
        Ok(code) => code,
        Err(e) => match e.strip_prefix("usage: ") {
            Some(msg) => usage_error(msg),
            None => failure(&e),
        },
    }
}

/// Dimension-validation failures are usage errors (exit 2), not pipeline
/// failures.
fn usage_if_dimension(e: ymss::series::SeriesError) -> String {
    use ymss::series::SeriesError::*;
    match e {
        EvenDimension(_) | DimensionTooSmall(_) => format!("usage: {e}"),
        other => other.to_string(),
    }
}

fn usage_if_dimension_roots(e: ymss::roots::RootsError) -> String {
    match e {
        ymss::roots::RootsError::Series(inner) => usage_if_dimension(inner),
        ymss::roots::RootsError::DimensionTooSmall(_) => format!("usage: {e}"),
        other => other.to_string(),
    }
}

fn case_output(cli: &Cli, reports: &[CaseReport]) -> String {
    match cli.format {
        Format::Json => {
            if reports.len() == 1 {
                serde_json::to_string_pretty(&reports[0]).expect("serializable") + "\n"
            } else {
                serde_json::to_string_pretty(&reports).expect("serializable") + "\n"
            }
        }
        Format::Csv => report::sweep_csv(reports),
        Format::Text => {
            if reports.len() == 1 {
                report::case_text(&reports[0])
            } else {
                report::sweep_text(reports)
            }
        }
    }
}

fn dispatch<R: Real>(cli: &Cli) -> Result<ExitCode, String> {
    let cfg = shoot_config(cli);
    match &cli.cmd {
        Cmd::Derive { d, m, full_table } => {
            let d = resolve_dimension(*d, *m).map_err(|e| return_usage(&e))?;
            let table = ymss::derive_system(d).map_err(usage_if_dimension)?;
            let res = ymss::residual_condition(&table).map_err(|e| e.to_string())?;
            let ex = ymss::extract_pm(&res).map_err(|e| e.to_string())?;
            let text = match cli.format {
                Format::Json => {
                    let mut doc = serde_json::json!({
                        "d": d,
                        "m": res.m,
                        "pm": ymss::roots::PolyInfo::of(&ex.pm, "z"),
                        "mult_c": ex.mult_c,
                        "mult_one_minus_c2": ex.mult_one_minus_c2,
                    });
                    if *full_table {
                        let cn: Vec<_> = (1..=res.m)
                            .map(|n| ymss::roots::PolyInfo::of(table.c_n(n), "c"))
                            .collect();
                        doc["coefficients"] = serde_json::to_value(cn).expect("serializable");
                    }
                    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
                }
                _ => {
                    let mut t = format!("P_{}(z) = {}\n", res.m, ex.pm.pretty("z"));
                    if *full_table {
                        for n in 1..=res.m {
                            t.push_str(&format!("c_{n} = {}\n", table.c_n(n).pretty("c")));
                        }
                    }
                    t
                }
            };
            emit(cli, text).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Count { d, m } => {
            let d = resolve_dimension(*d, *m).map_err(|e| return_usage(&e))?;
            let n = ymss::count_n(d).map_err(usage_if_dimension_roots)?;
            let text = match cli.format {
                Format::Json => format!("{{\"d\": {d}, \"N\": {n}}}\n"),
                _ => format!("N = {n}\n"),
            };
            emit(cli, text).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Analyze { d, m, shoot } => {
            let d = resolve_dimension(*d, *m).map_err(|e| return_usage(&e))?;
            let report = if *shoot {
                analyze_with_shooting::<R>(d, &cfg).map_err(|e| e.to_string())?
            } else {
                analyze_case(d).map_err(usage_if_dimension_roots)?
            };
            let pass = report.pass;
            emit(cli, case_output(cli, &[report])).map_err(|e| e.to_string())?;
            Ok(if pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Cmd::Shoot { d, m, a, c_target } => {
            let d = resolve_dimension(*d, *m).map_err(|e| return_usage(&e))?;
            let (profile, summary) = if let Some(a) = a {
                let a = R::of(*a);
                let p = interior_profile(d, a, R::one() - R::of(cfg.delta), &cfg)
                    .map_err(|e| e.to_string())?;
                let c = c_of_a(d, a, &cfg).map_err(|e| e.to_string())?;
                let s = format!(
                    "d = {d}  a = {}  c(a) = {}{}\n{}",
                    g17(a.to_f64_lossy()),
                    g17(c.c.to_f64_lossy()),
                    if c.corrected { "" } else { " (uncorrected)" },
                    diag_text(&p.diagnostics, oscillation_detected(&p)),
                );
                (p, s)
            } else {
                let c_target: R = match c_target {
                    Some(c) => R::of(*c),
                    None => {
                        let report = analyze_case(d).map_err(|e| e.to_string())?;
                        let z = report
                            .zstar()
                            .ok_or("no unique third root bracket for this dimension")?;
                        to_real::<R>(&z.midpoint()).sqrt()
                    }
                };
                let astar = find_astar(d, c_target, &cfg).map_err(|e| e.to_string())?;
                let p = interior_profile(d, astar.a, R::one() - R::of(cfg.delta), &cfg)
                    .map_err(|e| e.to_string())?;
                let s = format!(
                    "d = {d}  c_target = {}  a* = {}  c(a*) = {}  bisection steps = {}\n{}",
                    g17(c_target.to_f64_lossy()),
                    g17(astar.a.to_f64_lossy()),
                    g17(astar.c_achieved.to_f64_lossy()),
                    astar.bisection_steps,
                    diag_text(&p.diagnostics, oscillation_detected(&p)),
                );
                (p, s)
            };
            let text = match cli.format {
                Format::Csv => report::profile_csv(&profile),
                _ => summary,
            };
            emit(cli, text).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Extend { d, m, branch, x_end } => {
            let d = resolve_dimension(*d, *m).map_err(|e| return_usage(&e))?;
            let (c, c1): (R, R) = match branch {
                Branch::Plus | Branch::Minus => {
                    let cf = ymss::roots::closed_form_roots(d).map_err(|e| e.to_string())?;
                    explicit_endpoint_data(&cf, matches!(branch, Branch::Plus))
                }
                Branch::Star => {
                    let report = analyze_case(d).map_err(|e| e.to_string())?;
                    let z = report
                        .zstar()
                        .ok_or("no unique third root bracket for this dimension")?;
                    let c_target: R = to_real::<R>(&z.midpoint()).sqrt();
                    let astar = find_astar(d, c_target, &cfg).map_err(|e| e.to_string())?;
                    let c = c_of_a(d, astar.a, &cfg).map_err(|e| e.to_string())?.c;
                    (c, ymss::shoot::c1_of_c(d, c))
                }
            };
            let p = extend_exterior(d, c, c1, R::of(*x_end), &cfg).map_err(|e| e.to_string())?;
            let text = match cli.format {
                Format::Csv => report::profile_csv(&p),
                _ => format!(
                    "d = {d}  branch launch: u(1) = {}, u_x(1) = {}\n{}",
                    g17(c.to_f64_lossy()),
                    g17((-c1).to_f64_lossy()),
                    diag_text(&p.diagnostics, false)
                ),
            };
            emit(cli, text).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Limit { d, m, tau_span } => {
            let d = resolve_dimension(*d, *m).map_err(|e| return_usage(&e))?;
            let p = autonomous_limit::<R>(d, *tau_span, &cfg).map_err(|e| e.to_string())?;
            let osc = oscillation_detected(&p);
            let text = match cli.format {
                Format::Csv => report::profile_csv(&p),
                _ => format!(
                    "d = {d}  tau span = {tau_span}  U(end) = {}\n{}",
                    g17(p.u.last().copied().unwrap_or_else(R::zero).to_f64_lossy()),
                    diag_text(&p.diagnostics, osc)
                ),
            };
            emit(cli, text).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Sweep { m, shoot } => {
            let (lo, hi) = parse_range(m).map_err(|e| return_usage(&e))?;
            let reports: Vec<CaseReport> = if *shoot {
                (lo..=hi)
                    .into_par_iter()
                    .map(|m| analyze_with_shooting::<R>(2 * m + 5, &cfg))
                    .collect::<Result<_, _>>()
                    .map_err(|e| e.to_string())?
            } else {
                report::sweep(lo, hi).map_err(|e| e.to_string())?
            };
            let all_pass = reports.iter().all(|r| {
                r.pass && r.shoot.as_ref().map_or(true, |s| s.lemma_checks_ok)
            });
            emit(cli, case_output(cli, &reports)).map_err(|e| e.to_string())?;
            Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Cmd::VerifyAll { m } => {
            let (lo, hi) = parse_range(m).map_err(|e| return_usage(&e))?;
            let mut lines = Vec::new();
            let mut all_ok = true;
            let results: Vec<(i64, Result<(CaseReport, f64, f64), String>)> = (lo..=hi)
                .into_par_iter()
                .map(|m| {
                    let d = 2 * m + 5;
                    let out = verify_one::<R>(d, &cfg);
                    (d, out)
                })
                .collect();
            for (d, res) in results {
                match res {
                    Ok((r, err_plus, err_minus)) => {
                        let oracle_ok = err_plus < 1e-8 && err_minus < 1e-8;
                        let shoot_ok = r.shoot.as_ref().is_some_and(|s| {
                            s.lemma_checks_ok && s.endpoint_residual < 1e-5
                        });
                        let ok = r.pass && oracle_ok && shoot_ok;
                        all_ok &= ok;
                        lines.push(format!(
                            "d = {d:>2}: pipeline {}  oracle(c+|c-) {:.2e}|{:.2e}  third solution {}  -> {}",
                            if r.pass { "pass" } else { "FAIL" },
                            err_plus,
                            err_minus,
                            if shoot_ok { "pass" } else { "FAIL" },
                            if ok { "OK" } else { "FAIL" }
                        ));
                    }
                    Err(e) => {
                        all_ok = false;
                        lines.push(format!("d = {d:>2}: ERROR {e}"));
                    }
                }
            }
            lines.push(format!(
                "verify-all: {}",
                if all_ok { "all checks passed" } else { "FAILURES present" }
            ));
            emit(cli, lines.join("\n") + "\n").map_err(|e| e.to_string())?;
            Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

/// One verify-all case: full analysis with shooting plus the closed-form
/// oracle checks on the shooting map at the explicit parameters.
fn verify_one<R: Real>(d: i64, cfg: &ShootConfig) -> Result<(CaseReport, f64, f64), String> {
    let report = analyze_with_shooting::<R>(d, cfg).map_err(|e| e.to_string())?;
    let cf = ymss::roots::closed_form_roots(d).map_err(|e| e.to_string())?;
    let mut errs = [0.0f64; 2];
    for (i, plus) in [true, false].into_iter().enumerate() {
        let (c_exact, _) = explicit_endpoint_data::<R>(&cf, plus);
        let (alpha, beta): (R, R) = if plus {
            (cf.alpha_plus.to_real(), cf.beta_plus.to_real())
        } else {
            (cf.alpha_minus.to_real(), cf.beta_minus.to_real())
        };
        let est = c_of_a(d, alpha / beta, cfg).map_err(|e| e.to_string())?;
        errs[i] = (est.c - c_exact).abs().to_f64_lossy();
    }
    Ok((report, errs[0], errs[1]))
}

fn diag_text(r: &ymss::shoot::MonotonicityReport, oscillation: bool) -> String {
    format!(
        "u monotone decreasing: {}\nH nonincreasing: {}  H in bounds: {}  (max H = {}, min H = {})\n\
         gradient bound: {}  residual max = {}  identity residual max = {}{}\n",
        r.u_monotone_decreasing,
        r.h_nonincreasing,
        r.h_bounds_ok,
        g17(r.max_h),
        g17(r.min_h),
        r.gradient_bound_ok,
        g17(r.residual_max),
        g17(r.identity_residual_max),
        if oscillation { "\noscillation detected" } else { "" }
    )
}

fn return_usage(msg: &str) -> String {
    // Map argument-validation problems onto the usage exit path.
    format!("usage: {msg}")
}
