//! `steerkit` command-line driver. Results are JSON on stdout (or `--out`);
//! sweeps emit CSV.
//!
//! Exit codes: 0 computed, 1 usage error, 2 invalid input data, 3 solver
//! failure.

pub mod error;
pub mod format;
mod commands;
mod sweep;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand};
use steerkit_core::conic::{backend_by_name, ConicSolver};
use steerkit_core::SdpConfig;

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "steerkit", version, about = "Quantum steering and joint measurability toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Verdict and solver tolerance.
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub tol: f64,
    /// Seed for randomized inputs; reported in every output.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Conic backend.
    #[arg(long, global = true, env = "STEERKIT_SOLVER", default_value = "ipm")]
    pub solver: String,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<String>,
}

/// An assemblage file, or a state file with a measurement shorthand.
#[derive(Debug, Args, Clone)]
pub struct AssemblageInput {
    #[arg(long)]
    pub assemblage: Option<String>,
    #[arg(long)]
    pub state: Option<String>,
    /// `paulis:xz`, `paulis:xyz`, `axes:icosa6`, `axes:dodeca-icosa-15`,
    /// `axes:fib:N`, or a measurements file.
    #[arg(long)]
    pub measurements: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// LHS feasibility: verdict with model or steering inequality.
    Detect(AssemblageInput),
    /// Steering weight or robustness.
    Quantify {
        #[command(flatten)]
        input: AssemblageInput,
        #[arg(long, value_parser = ["weight", "robustness"], default_value = "weight")]
        measure: String,
    },
    /// Optimal steering inequality for an assemblage.
    Inequality(AssemblageInput),
    /// Joint measurability verdict, robustness and critical visibility.
    Jm {
        #[arg(long)]
        measurements: String,
    },
    /// Critical-radius bracket for a two-qubit state.
    Radius {
        #[arg(long)]
        state: String,
        /// `paulis`, `icosa6`, `dodeca-icosa-15` or `fib:N`.
        #[arg(long, default_value = "icosa6")]
        dirs: String,
        /// Quadrature points for the T-state closed form.
        #[arg(long, default_value_t = 10_000)]
        quad: usize,
    },
    /// Closed-form criteria battery.
    Criteria {
        #[arg(long, conflicts_with = "covariance")]
        state: Option<String>,
        #[arg(long)]
        covariance: Option<String>,
        /// Local uncertainty bound for the LUR check.
        #[arg(long, default_value_t = 2.0)]
        lur_bound: f64,
    },
    /// Write a benchmark state, assemblage or covariance document.
    Make(commands::MakeArgs),
    /// Closed-form unsteerability thresholds.
    Thresholds {
        #[arg(long)]
        family: steerkit_core::Family,
        #[arg(long)]
        class: steerkit_core::MeasurementClass,
        #[arg(long)]
        d: usize,
    },
    /// Parameter sweep to CSV.
    Sweep(sweep::SweepArgs),
}

pub struct Ctx {
    pub tol: f64,
    pub seed: u64,
    solver: Box<dyn ConicSolver>,
}

impl Ctx {
    pub fn new(g: &GlobalOpts) -> Result<Self, CliError> {
        if !(g.tol > 0.0 && g.tol.is_finite()) {
            return Err(CliError::Usage(format!("tolerance {} must be positive", g.tol)));
        }
        let solver = backend_by_name(&g.solver).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Self {
            tol: g.tol,
            seed: g.seed,
            solver,
        })
    }

    pub fn cfg(&self) -> SdpConfig<'_> {
        SdpConfig {
            tol: self.tol,
            solver: &*self.solver,
        }
    }
}

/// Runs the CLI on `argv` (program name first), writing results to `out`
/// and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    match execute(&cli) {
        Ok(text) => match &cli.global.out {
            Some(path) => match std::fs::write(path, text) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "error: {path}: {e}");
                    2
                }
            },
            None => {
                let _ = out.write_all(text.as_bytes());
                0
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let ctx = Ctx::new(&cli.global)?;
    match &cli.command {
        Command::Detect(input) => commands::detect(&ctx, input),
        Command::Quantify { input, measure } => commands::quantify(&ctx, input, measure),
        Command::Inequality(input) => commands::inequality(&ctx, input),
        Command::Jm { measurements } => commands::jm(&ctx, measurements),
        Command::Radius { state, dirs, quad } => commands::radius(&ctx, state, dirs, *quad),
        Command::Criteria {
            state,
            covariance,
            lur_bound,
        } => commands::criteria(&ctx, state.as_deref(), covariance.as_deref(), *lur_bound),
        Command::Make(args) => commands::make(&ctx, args),
        Command::Thresholds { family, class, d } => commands::thresholds(&ctx, *family, *class, *d),
        Command::Sweep(args) => sweep::sweep(&ctx, args),
    }
}
