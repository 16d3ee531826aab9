//! Command-line front end: spectra, eigenstate profiles, dissipation
//! dynamics, impurity-strength scans, and the validation suite, with
//! reproducible CSV outputs and per-run manifests.
//!
//! Exit codes: 0 success, 1 validation-suite failure, 2 usage/config error,
//! 3 numerical failure.

mod commands;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "skinburst",
    version,
    about = "Dissipative cross-stitch lattice: spectra, scale-free eigenstates, loss bursts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Cross,
    Ssh,
}

#[derive(Clone, Copy, ValueEnum)]
enum LimitArg {
    EtaZero,
    EtaInf,
    Pbc,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Right,
    Left,
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectArg {
    MaxIm,
    MinIm,
    MaxRe,
    SmallPosRe,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Diagonalize the model and export the spectrum.
    Spectrum {
        /// TOML config with a [lattice] block.
        #[arg(long)]
        config: String,
        /// Basis to build and diagonalize in.
        #[arg(long, value_enum, default_value = "cross")]
        basis: BasisArg,
        /// Also export an analytic limit spectrum.
        #[arg(long, value_enum)]
        limit: Option<LimitArg>,
        /// Tag eigenvalues as loop/detached sectors.
        #[arg(long)]
        classify: bool,
        /// Dump the Hamiltonian entries for debugging.
        #[arg(long)]
        dump_hamiltonian: bool,
        /// Output directory (created if missing).
        #[arg(long)]
        out: String,
    },
    /// Export a selected eigenstate profile and the loop Lyapunov table.
    Eigenstates {
        #[arg(long)]
        config: String,
        /// Which spectral loop to select from.
        #[arg(long, value_enum, default_value = "right")]
        side: SideArg,
        /// Deterministic state-selection rule.
        #[arg(long, value_enum, default_value = "max-im")]
        select: SelectArg,
        #[arg(long)]
        out: String,
    },
    /// Integrate the dissipative dynamics: single release or an eta scan.
    Dynamics {
        #[arg(long)]
        config: String,
        /// Initial unit cell (walker starts on its A site); overrides the
        /// [dynamics] block.
        #[arg(long)]
        n0: Option<usize>,
        /// Scan range `lo:hi:steps` in ln(eta); overrides the [scan] block.
        #[arg(long, allow_hyphen_values = true)]
        scan: Option<String>,
        /// Comma-separated monitored sites for the scan.
        #[arg(long)]
        sites: Option<String>,
        /// Fixed integration step (default: stability-bound heuristic).
        #[arg(long)]
        dt: Option<f64>,
        /// Time horizon (default: 50 N).
        #[arg(long)]
        t_max: Option<f64>,
        /// Early-stop survival threshold (default 1e-10).
        #[arg(long)]
        eps_stop: Option<f64>,
        #[arg(long)]
        out: String,
    },
    /// Run the validation suite and print a pass/fail table.
    Validate {
        #[arg(long, value_enum, default_value = "quick")]
        suite: SuiteArg,
        /// Optional directory for the report CSV.
        #[arg(long)]
        out: Option<String>,
    },
}

/// Machine-readable failure record, one JSON object on stderr.
pub(crate) fn emit_error(code: &str, message: &str) {
    let record = serde_json::json!({ "error": code, "message": message });
    eprintln!("{record}");
}

fn error_slug(e: &skinburst_core::Error) -> (&'static str, u8) {
    use skinburst_core::Error::*;
    match e {
        AdjacentImpurities(..) | BadSize(..) | NegativeParameter { .. } | Config(..)
        | GridTooCoarse(..) | WindowTooSmall(..) | WindowCrossesImpurity(..)
        | IncompatibleConfigs(..) | Io(..) => ("config_error", 2),
        MappingMismatch(..) | NoConvergence | SingularTransfer(..) | ZeroEta
        | NotAnEigenvalue(..) | StepTooLarge(..) | NonFiniteState(..) => ("numerical_failure", 3),
    }
}

fn init_threads() {
    if let Ok(v) = std::env::var("SKINBURST_THREADS") {
        if let Ok(k) = v.trim().parse::<usize>() {
            if k > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Spectrum { config, basis, limit, classify, dump_hamiltonian, out } => {
            commands::spectrum(&config, basis, limit, classify, dump_hamiltonian, &out)
        }
        Command::Eigenstates { config, side, select, out } => {
            commands::eigenstates(&config, side, select, &out)
        }
        Command::Dynamics { config, n0, scan, sites, dt, t_max, eps_stop, out } => commands::dynamics(
            &config,
            n0,
            scan.as_deref(),
            sites.as_deref(),
            dt,
            t_max,
            eps_stop,
            &out,
        ),
        Command::Validate { suite, out } => return commands::validate(suite, out.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            emit_error(failure.slug, &failure.message);
            ExitCode::from(failure.exit)
        }
    }
}

/// A command failure carrying its exit classification.
pub(crate) struct Failure {
    pub slug: &'static str,
    pub message: String,
    pub exit: u8,
}

impl Failure {
    pub fn usage(slug: &'static str, message: impl Into<String>) -> Self {
        Self { slug, message: message.into(), exit: 2 }
    }
}

impl From<skinburst_core::Error> for Failure {
    fn from(e: skinburst_core::Error) -> Self {
        let (slug, exit) = error_slug(&e);
        Self { slug, message: e.to_string(), exit }
    }
}
