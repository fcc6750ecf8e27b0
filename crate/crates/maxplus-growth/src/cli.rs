//! Command-line front end.
//!
//! Subcommands: `lambda` (closed-form growth rate), `psi` and `phi`
//! (distribution curves as CSV), `simulate` (seeded Monte Carlo with
//! optional Kolmogorov-Smirnov comparison, JSON output), and `verify`
//! (the cross-validation battery).
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or validation
//! error, 3 inconsistent flag combination. All numeric output uses `.` as
//! the decimal separator and `\n` line endings; values are printed with
//! 12 fractional digits, abscissas with 6. `MAXPLUS_THREADS` caps
//! simulation parallelism; results do not depend on it.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use chrono::{SecondsFormat, Utc};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analytic::{
    lambda_by_quadrature, lambda_closed, phi_cdf, phi_pdf, psi1, psi_eval, psi_limit, psi_next,
    simpson, RateParams,
};
use crate::fixedpoint::{solve_fixed_point, GridSpec};
use crate::montecarlo::{ks_statistic, ks_threshold_95, run_simulation, SimConfig, GENERATOR_ID};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "maxplus-growth",
    version,
    about = "Growth rate and stationary distributions of a 2x2 stochastic max-plus system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the closed-form mean growth rate.
    Lambda {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true)]
        nu: f64,
        /// Emit a JSON object instead of a bare number.
        #[arg(long)]
        json: bool,
    },
    /// Emit the difference CDF as CSV (columns t,psi).
    Psi {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true)]
        nu: f64,
        /// Step index k >= 1 of the finite-step CDF.
        #[arg(long, conflicts_with = "limit")]
        k: Option<u32>,
        /// Use the stationary (limiting) CDF.
        #[arg(long)]
        limit: bool,
        #[arg(long, allow_negative_numbers = true)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        /// Output file (default stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the increment CDF and density as CSV (columns t,phi_cdf,phi_pdf).
    Phi {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true)]
        nu: f64,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded Monte Carlo simulation and print a JSON report.
    Simulate {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true)]
        nu: f64,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Record Y(k) at this step index (required for --ks-against psi/psik).
        #[arg(long)]
        record_y_at: Option<usize>,
        /// Record norm increments (required for --ks-against phi).
        #[arg(long)]
        record_z: bool,
        /// Compare recorded samples against an analytic CDF.
        #[arg(long, value_enum)]
        ks_against: Option<KsTarget>,
    },
    /// Run the cross-validation battery and report pass/fail per check.
    Verify {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true)]
        nu: f64,
        /// Relative tolerance for the lambda quadrature check.
        #[arg(long, default_value_t = 1e-6)]
        tol_lambda: f64,
        /// Sup-norm tolerance for the grid-solver check.
        #[arg(long, default_value_t = 1e-4)]
        tol_grid: f64,
        /// Sup-norm tolerance for the phi quadrature check.
        #[arg(long, default_value_t = 1e-8)]
        tol_phi: f64,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum KsTarget {
    /// Stationary difference CDF.
    Psi,
    /// Finite-step difference CDF at the recorded step.
    Psik,
    /// Limiting increment CDF.
    Phi,
}

#[derive(Serialize)]
struct RunMetadata {
    tool_version: &'static str,
    command: String,
    mu: f64,
    nu: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    record_y_at: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    record_z: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generator: Option<&'static str>,
    timestamp: String,
    schema: &'static str,
}

impl RunMetadata {
    fn analytic(command: &str, p: &RateParams, schema: &'static str) -> Self {
        RunMetadata {
            tool_version: VERSION,
            command: command.into(),
            mu: p.mu(),
            nu: p.nu(),
            steps: None,
            trials: None,
            seed: None,
            record_y_at: None,
            record_z: None,
            generator: None,
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
            schema,
        }
    }
}

/// Parses the process arguments, dispatches, and returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn rates(mu: f64, nu: f64) -> Result<RateParams, String> {
    if !mu.is_finite() || mu <= 0.0 {
        return Err(format!("mu must be > 0, got {mu}"));
    }
    if !nu.is_finite() || nu <= 0.0 {
        return Err(format!("nu must be > 0, got {nu}"));
    }
    RateParams::new(mu, nu).map_err(|e| e.to_string())
}

fn dispatch(cmd: Command) -> Result<i32, String> {
    match cmd {
        Command::Lambda { mu, nu, json } => cmd_lambda(mu, nu, json),
        Command::Psi {
            mu,
            nu,
            k,
            limit,
            t_min,
            t_max,
            step,
            out,
        } => cmd_psi(mu, nu, k, limit, t_min, t_max, step, out),
        Command::Phi {
            mu,
            nu,
            t_max,
            step,
            out,
        } => cmd_phi(mu, nu, t_max, step, out),
        Command::Simulate {
            mu,
            nu,
            steps,
            trials,
            seed,
            record_y_at,
            record_z,
            ks_against,
        } => cmd_simulate(
            mu,
            nu,
            steps,
            trials,
            seed,
            record_y_at,
            record_z,
            ks_against,
        ),
        Command::Verify {
            mu,
            nu,
            tol_lambda,
            tol_grid,
            tol_phi,
        } => cmd_verify(mu, nu, tol_lambda, tol_grid, tol_phi),
    }
}

fn cmd_lambda(mu: f64, nu: f64, json: bool) -> Result<i32, String> {
    let p = rates(mu, nu)?;
    let lambda = lambda_closed(&p);
    if json {
        #[derive(Serialize)]
        struct Output {
            lambda: f64,
            meta: RunMetadata,
        }
        let out = Output {
            lambda,
            meta: RunMetadata::analytic("lambda", &p, "maxplus-growth.lambda.v1"),
        };
        println!("{}", serde_json::to_string_pretty(&out).unwrap());
    } else {
        println!("{lambda:.12}");
    }
    Ok(0)
}

fn open_out(out: Option<PathBuf>) -> Result<Box<dyn Write>, String> {
    match out {
        Some(path) => File::create(&path)
            .map(|f| Box::new(f) as Box<dyn Write>)
            .map_err(|e| format!("cannot create {}: {e}", path.display())),
        None => Ok(Box::new(io::stdout())),
    }
}

fn curve_grid(
    p: &RateParams,
    t_min: Option<f64>,
    t_max: Option<f64>,
    step: Option<f64>,
) -> Result<GridSpec, String> {
    let default = GridSpec::default_for(p);
    GridSpec::new(
        t_min.unwrap_or(default.t_min()),
        t_max.unwrap_or(default.t_max()),
        step.unwrap_or(default.step()),
        default.tol(),
        default.max_iter(),
    )
    .map_err(|e| e.to_string())
}

fn write_meta_comments(w: &mut dyn Write, meta: &RunMetadata) -> io::Result<()> {
    writeln!(w, "# tool_version: {}", meta.tool_version)?;
    writeln!(w, "# command: {}", meta.command)?;
    writeln!(w, "# mu={} nu={}", meta.mu, meta.nu)?;
    if let Some(seed) = meta.seed {
        writeln!(w, "# seed: {seed}")?;
    }
    if let Some(generator) = meta.generator {
        writeln!(w, "# generator: {generator}")?;
    }
    writeln!(w, "# timestamp: {}", meta.timestamp)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_psi(
    mu: f64,
    nu: f64,
    k: Option<u32>,
    limit: bool,
    t_min: Option<f64>,
    t_max: Option<f64>,
    step: Option<f64>,
    out: Option<PathBuf>,
) -> Result<i32, String> {
    let p = rates(mu, nu)?;
    let (label, coeffs) = match (k, limit) {
        (None, true) => ("limit".to_string(), psi_limit(&p)),
        (Some(0), _) => return Err("k must be >= 1".into()),
        (Some(k), false) => {
            let mut c = psi1(&p);
            for _ in 1..k {
                c = psi_next(&p, &c);
            }
            (format!("k={k}"), c)
        }
        (None, false) => return Err("specify either --k <K> or --limit".into()),
        (Some(_), true) => unreachable!("clap rejects --k with --limit"),
    };
    let spec = curve_grid(&p, t_min, t_max, step)?;
    let meta = RunMetadata::analytic("psi", &p, "maxplus-growth.curve.v1");
    let mut w = open_out(out)?;
    let io_err = |e: io::Error| format!("write failed: {e}");
    write_meta_comments(&mut *w, &meta).map_err(io_err)?;
    writeln!(w, "# {label} c1={:.12} c2={:.12}", coeffs.c1(), coeffs.c2()).map_err(io_err)?;
    writeln!(w, "t,psi").map_err(io_err)?;
    for i in 0..spec.num_points() {
        let t = spec.t(i);
        writeln!(w, "{t:.6},{:.12}", psi_eval(&p, &coeffs, t)).map_err(io_err)?;
    }
    Ok(0)
}

fn cmd_phi(
    mu: f64,
    nu: f64,
    t_max: Option<f64>,
    step: Option<f64>,
    out: Option<PathBuf>,
) -> Result<i32, String> {
    let p = rates(mu, nu)?;
    let default = GridSpec::default_for(&p);
    let t_max = t_max.unwrap_or(default.t_max());
    let step = step.unwrap_or(default.step());
    if !t_max.is_finite() || t_max <= 0.0 || !step.is_finite() || step <= 0.0 || t_max / step < 10.0
    {
        return Err(format!(
            "invalid grid: need t_max > 0, step > 0 and at least 10 points, got t_max={t_max} step={step}"
        ));
    }
    let n = (t_max / step).floor() as usize;
    let meta = RunMetadata::analytic("phi", &p, "maxplus-growth.curve.v1");
    let mut w = open_out(out)?;
    let io_err = |e: io::Error| format!("write failed: {e}");
    write_meta_comments(&mut *w, &meta).map_err(io_err)?;
    writeln!(w, "t,phi_cdf,phi_pdf").map_err(io_err)?;
    for i in 0..=n {
        let t = i as f64 * step;
        writeln!(w, "{t:.6},{:.12},{:.12}", phi_cdf(&p, t), phi_pdf(&p, t)).map_err(io_err)?;
    }
    Ok(0)
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>, String> {
    match std::env::var("MAXPLUS_THREADS") {
        Ok(v) => {
            let n: usize =
                v.parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
                    format!("MAXPLUS_THREADS must be a positive integer, got {v:?}")
                })?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map(Some)
                .map_err(|e| format!("cannot build thread pool: {e}"))
        }
        Err(_) => Ok(None),
    }
}

#[derive(Serialize)]
struct KsReport {
    against: String,
    at_step: usize,
    d: f64,
    threshold_95: f64,
}

#[derive(Serialize)]
struct SimulateReport {
    lambda_mean: f64,
    std_error: f64,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    ks: Option<KsReport>,
    meta: RunMetadata,
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    mu: f64,
    nu: f64,
    steps: usize,
    trials: usize,
    seed: u64,
    record_y_at: Option<usize>,
    record_z: bool,
    ks_against: Option<KsTarget>,
) -> Result<i32, String> {
    let p = rates(mu, nu)?;
    let cfg = SimConfig {
        params: p,
        steps,
        trials,
        base_seed: seed,
        record_y_at: record_y_at.into_iter().collect(),
        record_z,
    };
    cfg.validate().map_err(|e| e.to_string())?;

    // Inconsistent flag combinations are exit code 3, not 2.
    if let Some(target) = ks_against {
        let consistent = match target {
            KsTarget::Psi | KsTarget::Psik => record_y_at.is_some(),
            KsTarget::Phi => record_z,
        };
        if !consistent {
            eprintln!(
                "error: --ks-against {} requires {}",
                match target {
                    KsTarget::Psi => "psi",
                    KsTarget::Psik => "psik",
                    KsTarget::Phi => "phi",
                },
                match target {
                    KsTarget::Phi => "--record-z",
                    _ => "--record-y-at <K>",
                }
            );
            return Ok(3);
        }
    }

    let pool = thread_pool()?;
    let out = match &pool {
        Some(pool) => pool.install(|| run_simulation(&cfg)),
        None => run_simulation(&cfg),
    }
    .map_err(|e| e.to_string())?;

    let ks = match ks_against {
        None => None,
        Some(target) => {
            let (against, at_step, d) = match target {
                KsTarget::Psi => {
                    let k = record_y_at.unwrap();
                    let c = psi_limit(&p);
                    let d = ks_statistic(&out.y_samples[&k], |t| psi_eval(&p, &c, t))
                        .map_err(|e| e.to_string())?;
                    ("psi", k, d)
                }
                KsTarget::Psik => {
                    let k = record_y_at.unwrap();
                    let mut c = psi1(&p);
                    for _ in 1..k {
                        c = psi_next(&p, &c);
                    }
                    let d = ks_statistic(&out.y_samples[&k], |t| psi_eval(&p, &c, t))
                        .map_err(|e| e.to_string())?;
                    ("psik", k, d)
                }
                KsTarget::Phi => {
                    let samples = out.final_z.as_ref().unwrap();
                    let d = ks_statistic(samples, |t| phi_cdf(&p, t)).map_err(|e| e.to_string())?;
                    ("phi", steps, d)
                }
            };
            Some(KsReport {
                against: against.into(),
                at_step,
                d,
                threshold_95: ks_threshold_95(trials),
            })
        }
    };

    let report = SimulateReport {
        lambda_mean: out.estimate.mean,
        std_error: out.estimate.std_error,
        n: out.estimate.n,
        ks,
        meta: RunMetadata {
            tool_version: VERSION,
            command: "simulate".into(),
            mu: p.mu(),
            nu: p.nu(),
            steps: Some(steps),
            trials: Some(trials),
            seed: Some(seed),
            record_y_at,
            record_z: Some(record_z),
            generator: Some(GENERATOR_ID),
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
            schema: "maxplus-growth.simulate.v1",
        },
    };
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(0)
}

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn cmd_verify(
    mu: f64,
    nu: f64,
    tol_lambda: f64,
    tol_grid: f64,
    tol_phi: f64,
) -> Result<i32, String> {
    let p = rates(mu, nu)?;
    let mut checks = Vec::new();

    // 1. Closed-form lambda vs quadrature of t*phi(t).
    let exact = lambda_closed(&p);
    match lambda_by_quadrature(&p, (tol_lambda / 10.0).min(1e-8)) {
        Ok(quad) => {
            let rel = (quad - exact).abs() / exact;
            checks.push(Check {
                name: "lambda closed form vs quadrature",
                passed: rel <= tol_lambda,
                detail: format!("rel delta {rel:.3e}"),
            });
        }
        Err(e) => checks.push(Check {
            name: "lambda closed form vs quadrature",
            passed: false,
            detail: e.to_string(),
        }),
    }

    // 2. One recursion step vs the second-step closed form.
    let s = p.mu() + p.nu();
    let c2_step = psi_next(&p, &psi1(&p));
    let expected_c1 = p.nu() * p.nu() * (3.0 * p.mu() + p.nu()) / (s * s * s);
    let delta = (c2_step.c1() - expected_c1).abs();
    checks.push(Check {
        name: "recursion step vs second-step closed form",
        passed: delta <= 1e-12,
        detail: format!("delta {delta:.3e}"),
    });

    // 3. Coefficient iteration reaches the stationary limit.
    let star = psi_limit(&p);
    let mut c = psi1(&p);
    let mut reached = None;
    for i in 1..=100 {
        c = psi_next(&p, &c);
        if (c.c1() - star.c1()).abs() <= 1e-10 {
            reached = Some(i);
            break;
        }
    }
    checks.push(Check {
        name: "coefficient iteration vs stationary limit",
        passed: reached.is_some(),
        detail: match reached {
            Some(i) => format!(
                "converged in {i} iterations, delta {:.3e}",
                (c.c1() - star.c1()).abs()
            ),
            None => format!(
                "not within 1e-10 after 100 iterations, delta {:.3e}",
                (c.c1() - star.c1()).abs()
            ),
        },
    });

    // 4. Ansatz-free grid solver vs the analytic stationary CDF.
    match solve_fixed_point(&p, GridSpec::default_for(&p)) {
        Ok((grid, iterations)) => {
            let sup = grid.sup_distance_to(|t| psi_eval(&p, &star, t));
            checks.push(Check {
                name: "grid solver vs analytic stationary cdf",
                passed: sup <= tol_grid,
                detail: format!("sup delta {sup:.3e} after {iterations} iterations"),
            });
        }
        Err(e) => checks.push(Check {
            name: "grid solver vs analytic stationary cdf",
            passed: false,
            detail: e.to_string(),
        }),
    }

    // 5. Phi is a CDF: zero at the origin and nondecreasing.
    let t_span = 20.0 / p.min_rate();
    let n_grid = 10_000;
    let origin_ok = phi_cdf(&p, 0.0) == 0.0;
    let mut monotone = true;
    let mut prev = 0.0;
    for i in 0..=n_grid {
        let v = phi_cdf(&p, i as f64 * t_span / n_grid as f64);
        if v < prev {
            monotone = false;
            break;
        }
        prev = v;
    }
    checks.push(Check {
        name: "phi boundary and monotonicity",
        passed: origin_ok && monotone,
        detail: format!("phi(0)={}, monotone={monotone}", phi_cdf(&p, 0.0)),
    });

    // 6. Corrected phi CDF vs quadrature of its integral representation.
    let span = 60.0 / p.min_rate();
    let j_plus = simpson(
        &|u| psi_eval(&p, &star, u) * (-p.mu() * u).exp(),
        0.0,
        span,
        1 << 15,
    );
    let j_minus = simpson(
        &|u| psi_eval(&p, &star, -u) * (-p.nu() * u).exp(),
        0.0,
        span,
        1 << 15,
    );
    let phi_quad =
        |t: f64| p.g_cdf(t) * (1.0 - p.f_pdf(t) * j_plus) + p.f_cdf(t) * p.g_pdf(t) * j_minus;
    let mut sup: f64 = 0.0;
    for i in 0..=1000 {
        let t = i as f64 * t_span / 1000.0;
        sup = sup.max((phi_cdf(&p, t) - phi_quad(t)).abs());
    }
    checks.push(Check {
        name: "phi closed form vs integral-equation quadrature",
        passed: sup <= tol_phi,
        detail: format!("sup delta {sup:.3e}"),
    });

    let mut all_passed = true;
    for check in &checks {
        let verdict = if check.passed { "PASS" } else { "FAIL" };
        println!("{}: {verdict} ({})", check.name, check.detail);
        all_passed &= check.passed;
    }
    Ok(if all_passed { 0 } else { 1 })
}
