//! Command-line front end for the circle-domain pseudospectral laboratory.
//!
//! Exit codes: 0 success, 2 validation error, 3 numerical blow-up,
//! 4 experiment verdict FAIL.

// `!(x > 0)` style checks reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hmch::approx::residual_decay_rate;
use hmch::dynamics::{integrate, SimConfig};
use hmch::muop::{green_closed, green_series_grid};
use hmch::nonuniform::{nonuniform_experiment, NonuniformConfig};
use hmch::peakon::{peakon_error, peakon_profile, PeakonSpec};

use config::RunConfig;
use io::fmt_f64;

const EXIT_VALIDATION: u8 = 2;
const EXIT_BLOW_UP: u8 = 3;
const EXIT_VERDICT_FAIL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "hmch",
    about = "Pseudospectral simulation and experiment runner for a fourth-order \
             nonlocal shallow-water equation on the unit circle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Path to a flat key=value configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the inviscid equation; emits diagnostics and state snapshots
    Simulate(ConfigArgs),
    /// Integrate the viscous regularization (requires epsilon > 0)
    Viscous(ConfigArgs),
    /// Evaluate the configured initial state without time stepping
    Diagnose(ConfigArgs),
    /// Track the peaked traveling wave and report its error
    Peakon {
        /// Wave speed (> 0)
        #[arg(long)]
        c: f64,
        /// Grid size
        #[arg(long = "N", default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value_t = 5e-5)]
        dt: f64,
        /// Horizon
        #[arg(long = "T", default_value_t = 0.1)]
        t_end: f64,
        #[arg(long, default_value_t = 100)]
        output_every: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate the kernel: closed form vs truncated series
    Greens {
        /// Grid size
        #[arg(long = "N", default_value_t = 1024)]
        n: usize,
        /// Number of series terms
        #[arg(long = "K", default_value_t = 10_000)]
        k_terms: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Residual decay of the oscillatory approximate-solution family
    Residual {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        sigma: f64,
        /// Comma-separated strictly increasing modes (at least 3)
        #[arg(long = "n-list", value_delimiter = ',')]
        n_list: Vec<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Two-wave separation experiment (non-uniform data dependence)
    Nonuniform {
        #[arg(long, default_value_t = 4.0)]
        s: f64,
        /// Comma-separated strictly increasing modes
        #[arg(long = "n-list", value_delimiter = ',')]
        n_list: Vec<u32>,
        /// Grid size
        #[arg(long = "N", default_value_t = 512)]
        n: usize,
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        /// De-phasing angles at which to sample the separation
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 1.5])]
        phases: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Failure carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

type RunResult = Result<(), Failure>;

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

impl From<config::ConfigError> for Failure {
    fn from(e: config::ConfigError) -> Self {
        fail(EXIT_VALIDATION, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        fail(EXIT_VALIDATION, format!("io error: {e}"))
    }
}

impl From<hmch::Error> for Failure {
    fn from(e: hmch::Error) -> Self {
        let code = match e {
            hmch::Error::BlowUp { .. } => EXIT_BLOW_UP,
            _ => EXIT_VALIDATION,
        };
        fail(code, e.to_string())
    }
}

fn ensure_out_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| fail(EXIT_VALIDATION, format!("cannot create {}: {e}", dir.display())))
}

fn sim_config(cfg: &RunConfig, u0: &hmch::PeriodicField) -> Result<SimConfig, Failure> {
    Ok(SimConfig::new(
        u0,
        cfg.dt,
        cfg.t_end,
        cfg.scheme,
        cfg.epsilon,
        cfg.dealias,
        cfg.output_every,
        false,
    )?)
}

fn run_trajectory(args: &ConfigArgs, viscous: bool) -> RunResult {
    let cfg = config::parse_config_file(&args.config)?;
    if viscous && cfg.epsilon <= 0.0 {
        return Err(fail(
            EXIT_VALIDATION,
            "config key `epsilon`: viscous run needs epsilon > 0",
        ));
    }
    if !viscous && cfg.epsilon != 0.0 {
        return Err(fail(
            EXIT_VALIDATION,
            "config key `epsilon`: inviscid run needs epsilon = 0 (use `viscous`)",
        ));
    }
    ensure_out_dir(&args.out)?;
    let u0 = cfg.initial_field()?;
    let sim = sim_config(&cfg, &u0)?;
    let traj = match integrate(&u0, &sim) {
        Ok(t) => t,
        Err(hmch::Error::BlowUp { time, last_state }) => {
            // leave the last finite state on disk for post-mortem
            io::write_field_csv(&io::snapshot_path(&args.out, time), &last_state)?;
            return Err(fail(
                EXIT_BLOW_UP,
                format!("solution blew up at t = {time}; last state written"),
            ));
        }
        Err(e) => return Err(e.into()),
    };
    io::write_diagnostics_csv(&args.out.join("diagnostics.csv"), &traj.diagnostics)?;
    for (t, u) in &traj.states {
        io::write_field_csv(&io::snapshot_path(&args.out, *t), u)?;
    }
    Ok(())
}

fn run_diagnose(args: &ConfigArgs) -> RunResult {
    let cfg = config::parse_config_file(&args.config)?;
    ensure_out_dir(&args.out)?;
    let u0 = cfg.initial_field()?;
    let record = hmch::dynamics::diagnostics(
        &u0,
        0.0,
        u0.mean(),
        hmch::dynamics::energy_e1(&u0)?.sqrt(),
        0.0,
    )?;
    io::write_field_csv(&args.out.join("u0.csv"), &u0)?;
    io::write_spectrum_csv(&args.out.join("u0_spectrum.csv"), &u0.to_spectrum()?)?;
    io::write_diagnostics_csv(&args.out.join("diagnostics.csv"), &[record])?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_peakon(
    c: f64,
    n: usize,
    dt: f64,
    t_end: f64,
    output_every: usize,
    out: &Path,
) -> RunResult {
    ensure_out_dir(out)?;
    let spec = PeakonSpec::new(c)?;
    let phi = peakon_profile(&spec, 0.0, n)?;
    let sim = SimConfig::new(&phi, dt, t_end, hmch::dynamics::Scheme::Rk4, 0.0, true, output_every, false)?;
    let traj = integrate(&phi, &sim)?;
    let errors = peakon_error(&traj, &spec)?;
    let mut text = String::from("t,L2_error,Linf_error\n");
    for (t, l2, linf) in &errors {
        text += &format!("{},{},{}\n", fmt_f64(*t), fmt_f64(*l2), fmt_f64(*linf));
    }
    std::fs::write(out.join("peakon_error.csv"), text)?;
    let reference = phi.l2_norm();
    let worst = errors.iter().map(|(_, l2, _)| l2 / reference).fold(0.0, f64::max);
    if worst > 1e-2 {
        return Err(fail(
            EXIT_VERDICT_FAIL,
            format!("relative L2 tracking error {worst:e} exceeds 1e-2"),
        ));
    }
    Ok(())
}

fn run_greens(n: usize, k_terms: u64, out: &Path) -> RunResult {
    ensure_out_dir(out)?;
    let series = green_series_grid(n, k_terms);
    let mut text = String::from("x,g_closed,g_series_K,abs_diff\n");
    for (i, &s) in series.iter().enumerate() {
        let x = i as f64 / n as f64;
        let closed = green_closed(x);
        text += &format!(
            "{},{},{},{}\n",
            fmt_f64(x),
            fmt_f64(closed),
            fmt_f64(s),
            fmt_f64((closed - s).abs())
        );
    }
    std::fs::write(out.join("greens.csv"), text)?;
    Ok(())
}

fn run_residual(s: f64, sigma: f64, n_list: &[u32], out: &Path) -> RunResult {
    ensure_out_dir(out)?;
    let report = residual_decay_rate(s, sigma, n_list)?;
    let mut text = String::from("n,Hsigma_norm\n");
    for (n, norm) in report.n_list.iter().zip(&report.norms) {
        text += &format!("{n},{}\n", fmt_f64(*norm));
    }
    text += &format!("slope,{}\n", fmt_f64(report.fitted_slope));
    std::fs::write(out.join("residual.csv"), text)?;
    println!(
        "fitted slope {} (expected -{}, tolerance 0.3)",
        report.fitted_slope, report.r_expected
    );
    if !report.pass {
        return Err(fail(
            EXIT_VERDICT_FAIL,
            format!(
                "fitted slope {} is not within 0.3 of -{}",
                report.fitted_slope, report.r_expected
            ),
        ));
    }
    Ok(())
}

fn run_nonuniform(
    s: f64,
    n_list: Vec<u32>,
    grid: usize,
    dt: f64,
    phases: Vec<f64>,
    out: &Path,
) -> RunResult {
    ensure_out_dir(out)?;
    let cfg = NonuniformConfig {
        s,
        n_list,
        grid,
        dt,
        phases,
        dealias: true,
    };
    let report = nonuniform_experiment(&cfg)?;
    let curves: Vec<serde_json::Value> = report
        .curves
        .iter()
        .map(|c| {
            serde_json::json!({
                "n": c.n,
                "d0": c.d0,
                "approx_gap": c.approx_gap,
                "samples": c.samples.iter().map(|smp| {
                    serde_json::json!({"phase": smp.phase, "t": smp.t, "d": smp.d})
                }).collect::<Vec<_>>(),
            })
        })
        .collect();
    let doc = serde_json::json!({
        "s": report.s,
        "kappa": report.kappa,
        "kappa_stable": report.kappa_stable,
        "no_shrinkage": report.no_shrinkage,
        "verdict": if report.pass { "PASS" } else { "FAIL" },
        "curves": curves,
    });
    std::fs::write(
        out.join("nonuniform.json"),
        serde_json::to_string_pretty(&doc).expect("report serializes"),
    )?;
    println!(
        "separation envelope kappa = {}, verdict {}",
        report.kappa,
        if report.pass { "PASS" } else { "FAIL" }
    );
    if !report.pass {
        return Err(fail(
            EXIT_VERDICT_FAIL,
            "separation experiment verdict FAIL (see nonuniform.json)",
        ));
    }
    Ok(())
}

fn run(cli: Cli) -> RunResult {
    match cli.command {
        Command::Simulate(args) => run_trajectory(&args, false),
        Command::Viscous(args) => run_trajectory(&args, true),
        Command::Diagnose(args) => run_diagnose(&args),
        Command::Peakon {
            c,
            n,
            dt,
            t_end,
            output_every,
            out,
        } => run_peakon(c, n, dt, t_end, output_every, &out),
        Command::Greens { n, k_terms, out } => run_greens(n, k_terms, &out),
        Command::Residual {
            s,
            sigma,
            n_list,
            out,
        } => run_residual(s, sigma, &n_list, &out),
        Command::Nonuniform {
            s,
            n_list,
            n,
            dt,
            phases,
            out,
        } => run_nonuniform(s, n_list, n, dt, phases, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
