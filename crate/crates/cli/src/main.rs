//! `qsync`: steady states, Q functions, phase distributions and sweeps
//! from the command line.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 numerical failure.

mod check;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qsync::io::{
    emit_qgrid, emit_sdist, emit_steady, emit_sweep, parse_config, write_heatmap, ConfigError,
    Format, RunConfig,
};
use qsync::linalg::DensityMatrix;
use qsync::model::Liouvillian;
use qsync::phase::{partial_trace_a, q_grid, s_distribution, PhaseError};
use qsync::steady::{residual, solve, uniqueness_report, SteadyError};
use qsync::sweep::{
    run_sweep, run_sweep_with_jobs, AxisRange, SecondAxis, SweepError, SweepParam, SweepResult,
    SweepSpec,
};

#[derive(Parser, Debug)]
#[command(
    name = "qsync",
    version,
    about = "Indirect phase locking of two coupled dissipative two-level systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// `key = value` configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format (csv or json).
    #[arg(long, global = true, value_name = "FORMAT")]
    format: Option<String>,
    /// Override a configuration key, e.g. `--set g=0`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads for sweeps. Does not affect the output.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Also write the main matrix as a binary PPM heatmap.
    #[arg(long, global = true, value_name = "PATH")]
    heatmap: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Steady state of the pair and the reduced state of B.
    Steady,
    /// Husimi Q function of B on the (θ, φ) grid.
    Qfunc,
    /// Phase distribution S(φ) of B.
    Sdist,
    /// S(φ) map over delta2, epsilon or g (key `axis1`).
    Sweep,
    /// Peak S over (epsilon or g) × delta2.
    Tongue,
    /// Run the invariant suite and print a pass/fail report.
    Check,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<SteadyError> for Failure {
    fn from(e: SteadyError) -> Self {
        Failure::Numerical(e.to_string())
    }
}

impl From<PhaseError> for Failure {
    fn from(e: PhaseError) -> Self {
        match e {
            PhaseError::BadResolution(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn load_config(common: &CommonArgs) -> Result<RunConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("--config {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    for (k, assignment) in common.set.iter().enumerate() {
        let Some((key, value)) = assignment.split_once('=') else {
            return Err(Failure::Usage(format!(
                "--set {assignment}: expected KEY=VALUE"
            )));
        };
        cfg.set(key.trim(), value.trim(), k + 1)
            .map_err(|e| Failure::Usage(format!("--set {assignment}: {e}")))?;
    }
    cfg.check_consistency()?;
    if let Some(f) = &common.format {
        cfg.format = f
            .parse::<Format>()
            .map_err(|e| Failure::Usage(format!("--format {f}: {e}")))?;
    }
    Ok(cfg)
}

fn write_output(bytes: &[u8], common: &CommonArgs, cfg: &RunConfig) -> Result<(), Failure> {
    let target = common
        .out
        .clone()
        .or_else(|| cfg.output_path.as_ref().map(PathBuf::from));
    match target {
        Some(path) => fs::write(&path, bytes)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::Usage(format!("cannot write to stdout: {e}"))),
    }
}

fn write_heatmap_if_requested(matrix: &[Vec<f64>], common: &CommonArgs) -> Result<(), Failure> {
    if let Some(path) = &common.heatmap {
        write_heatmap(matrix, path)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn steady_pair(cfg: &RunConfig) -> Result<(Liouvillian, DensityMatrix, DensityMatrix), Failure> {
    let l = Liouvillian::new(cfg.params);
    let rho = solve(&l, cfg.solver())?;
    let rho_b = partial_trace_a(&rho)?;
    Ok((l, rho, rho_b))
}

fn sweep_spec(cfg: &RunConfig, tongue: bool) -> Result<SweepSpec, Failure> {
    let s = &cfg.sweep;
    let mut spec = if tongue {
        let axis1 = s.axis1.unwrap_or(SweepParam::Epsilon);
        if axis1 == SweepParam::Delta2 {
            return Err(Failure::Usage(
                "tongue needs axis1 = epsilon or g (delta2 is the second axis)".into(),
            ));
        }
        SweepSpec::tongue(cfg.params, axis1)
    } else {
        SweepSpec::phase_map(cfg.params, s.axis1.unwrap_or(SweepParam::Delta2))
    };
    let r = spec.axis1_range;
    spec.axis1_range = AxisRange::new(
        s.axis1_min.unwrap_or(r.min),
        s.axis1_max.unwrap_or(r.max),
        s.axis1_count.unwrap_or(r.count),
    );
    if let SecondAxis::Delta2(r) = spec.axis2 {
        spec.axis2 = SecondAxis::Delta2(AxisRange::new(
            s.delta2_min.unwrap_or(r.min),
            s.delta2_max.unwrap_or(r.max),
            s.delta2_count.unwrap_or(r.count),
        ));
    }
    spec.n_theta = cfg.n_theta;
    spec.n_phi = cfg.n_phi;
    spec.baseline = cfg.baseline;
    spec.validate()?;
    Ok(spec)
}

fn run_spec(spec: &SweepSpec, jobs: Option<usize>) -> Result<SweepResult, Failure> {
    Ok(match jobs {
        Some(n) => run_sweep_with_jobs(spec, n)?,
        None => run_sweep(spec)?,
    })
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let common = &cli.common;
    if common.jobs == Some(0) {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    let cfg = load_config(common)?;
    match cli.command {
        Command::Steady => {
            let (l, rho, rho_b) = steady_pair(&cfg)?;
            let report = uniqueness_report(&l);
            let bytes = emit_steady(&rho, &rho_b, &report, residual(&l, &rho), cfg.format);
            write_output(&bytes, common, &cfg)
        }
        Command::Qfunc => {
            let (_, _, rho_b) = steady_pair(&cfg)?;
            let grid = q_grid(&rho_b, cfg.n_theta, cfg.n_phi)?;
            write_heatmap_if_requested(&grid.values, common)?;
            write_output(&emit_qgrid(&grid, cfg.format), common, &cfg)
        }
        Command::Sdist => {
            let (_, _, rho_b) = steady_pair(&cfg)?;
            let dist = s_distribution(&rho_b, cfg.n_phi, cfg.n_theta, cfg.baseline)?;
            write_heatmap_if_requested(std::slice::from_ref(&dist.s_values), common)?;
            write_output(&emit_sdist(&dist, cfg.format), common, &cfg)
        }
        Command::Sweep | Command::Tongue => {
            let spec = sweep_spec(&cfg, matches!(cli.command, Command::Tongue))?;
            let result = run_spec(&spec, common.jobs)?;
            write_heatmap_if_requested(&result.values, common)?;
            write_output(&emit_sweep(&result, cfg.format), common, &cfg)?;
            let flagged = result.flagged();
            if !flagged.is_empty() {
                eprintln!(
                    "warning: {} grid point(s) without a unique steady state",
                    flagged.len()
                );
            }
            Ok(())
        }
        Command::Check => {
            let report = check::run(&cfg);
            let text = report.render();
            write_output(text.as_bytes(), common, &cfg)?;
            if report.all_passed() {
                Ok(())
            } else {
                Err(Failure::Numerical(format!(
                    "{} check(s) failed",
                    report.failures()
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical error: {msg}");
            ExitCode::from(2)
        }
    }
}
