//! `whitham`: command-line driver for the solitary-wave library.
//!
//! Every subcommand writes a JSON run manifest `{cmd, params, version,
//! duration_s, outputs, status, message}`, next to its outputs or at
//! `--manifest`. When all output goes to stdout and no `--manifest` is given,
//! the manifest is printed to stderr instead.

mod manifest;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use whitham_core::defaults;

use crate::manifest::{Manifest, Status};

#[derive(Debug, Parser)]
#[command(name = "whitham", version, about = "Solitary waves of the Whitham equation", arg_required_else_help = true)]
struct Cli {
    /// Where to write the run manifest.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
enum Command {
    /// Tabulate m(ξ) on the real line, or m(θ − iη) when --eta is given.
    Symbol(SymbolArgs),
    /// Tabulate K, its regular part and the tail ratio.
    Kernel(KernelArgs),
    /// Continue the solitary-wave branch toward the extreme wave.
    Branch(BranchArgs),
    /// Reduced ODE: phase portrait or exact coefficients.
    #[command(subcommand)]
    Reduced(ReducedCommand),
    /// Argument increase and Fredholm index of the boundary symbol.
    Winding(WindingArgs),
    /// Run the diagnostics on a stored profile.
    Verify(VerifyArgs),
    /// Quick invariant suite.
    Selftest,
}

#[derive(Debug, Args, Serialize)]
struct SymbolArgs {
    #[arg(long, allow_hyphen_values = true)]
    xi_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    xi_max: f64,
    #[arg(long)]
    samples: usize,
    /// Evaluate at θ − iη instead of on the real axis.
    #[arg(long)]
    eta: Option<f64>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct KernelArgs {
    #[arg(long)]
    x_min: f64,
    #[arg(long)]
    x_max: f64,
    #[arg(long)]
    samples: usize,
    #[arg(long)]
    log_spacing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct BranchArgs {
    #[arg(long, default_value_t = defaults::NU0)]
    nu0: f64,
    /// Initial and maximal amplitude step.
    #[arg(long, default_value_t = defaults::AMPLITUDE_STEP)]
    da: f64,
    #[arg(long, default_value_t = defaults::EPS_STOP)]
    eps_stop: f64,
    /// Half period; derived from nu0 when absent.
    #[arg(long = "L")]
    half_period: Option<f64>,
    /// Number of cosine modes.
    #[arg(long = "N", default_value_t = defaults::MODES)]
    modes: usize,
    #[arg(long, default_value_t = defaults::NEWTON_TOL)]
    newton_tol: f64,
    #[arg(long, default_value_t = defaults::NEWTON_MAX_ITERS)]
    newton_max_iters: usize,
    #[arg(long, default_value_t = defaults::MAX_HALVINGS)]
    max_halvings: u32,
    #[arg(long, default_value_t = defaults::MAX_POINTS)]
    max_points: usize,
    /// Keep converged points that fail the diagnostics and report them.
    #[arg(long)]
    record_failures: bool,
    /// Leave the sigma_min column empty (it costs a dense eigensolve per point).
    #[arg(long)]
    skip_sigma_min: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
enum ReducedCommand {
    /// Vector field samples and sample trajectories of the rescaled field.
    Phase(PhaseArgs),
    /// The five polynomial coefficients as exact rationals.
    Coeffs,
}

#[derive(Debug, Args, Serialize)]
struct PhaseArgs {
    #[arg(long)]
    nu: f64,
    /// Lattice points per axis.
    #[arg(long, default_value_t = 21)]
    grid: usize,
    /// Output directory; receives field.csv and trajectories.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct WindingArgs {
    #[arg(long)]
    eta: f64,
    #[arg(long, default_value_t = defaults::THETA_MAX)]
    theta_max: f64,
    #[arg(long, default_value_t = defaults::WINDING_SAMPLES)]
    samples: usize,
    /// Quadrant trace CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    profile: PathBuf,
    /// The same wave on a finer grid; enables the cusp fit.
    #[arg(long)]
    refined: Option<PathBuf>,
    /// Also compute the smallest singular value of the linearization.
    #[arg(long)]
    sigma_min: bool,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Symbol(_) => "symbol",
            Command::Kernel(_) => "kernel",
            Command::Branch(_) => "branch",
            Command::Reduced(ReducedCommand::Phase(_)) => "reduced phase",
            Command::Reduced(ReducedCommand::Coeffs) => "reduced coeffs",
            Command::Winding(_) => "winding",
            Command::Verify(_) => "verify",
            Command::Selftest => "selftest",
        }
    }

    /// Default manifest location, if the command writes files.
    fn manifest_path(&self) -> Option<PathBuf> {
        let beside = |p: &PathBuf| {
            let mut s = p.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        };
        match self {
            Command::Symbol(a) => a.out.as_ref().map(beside),
            Command::Kernel(a) => a.out.as_ref().map(beside),
            Command::Branch(a) => Some(a.out.join("manifest.json")),
            Command::Reduced(ReducedCommand::Phase(a)) => Some(a.out.join("manifest.json")),
            Command::Winding(a) => Some(beside(&a.out)),
            _ => None,
        }
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors and when called without arguments
    let cli = Cli::parse();
    let mut manifest = Manifest::start(cli.command.name(), &cli.command);
    let status = match run::dispatch(&cli.command, &mut manifest) {
        Ok(true) => Status::Ok,
        Ok(false) => Status::CheckFailed,
        Err(e) => {
            eprintln!("error: {e:#}");
            if run::is_usage_error(&e) {
                Status::UsageError(format!("{e:#}"))
            } else {
                Status::Error(format!("{e:#}"))
            }
        }
    };
    let code = status.exit_code();
    let path = cli.manifest.or_else(|| cli.command.manifest_path());
    if let Err(e) = manifest.finish(status, path.as_deref()) {
        eprintln!("error: could not write manifest: {e:#}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
