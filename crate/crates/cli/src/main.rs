//! Command-line front end: `check`, `derive`, `solve` and `gevrey`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

#[derive(Parser)]
#[command(
    name = "nilgevrey",
    version,
    about = "Induced-representation pipeline for sums of squares on nilpotent groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the algebra, the covector assumptions and the characteristic set.
    Check(RunArgs),
    /// Derive the Schrodinger operator of the induced representation.
    Derive(RunArgs),
    /// Solve the reduced spectral problem.
    Solve(RunArgs),
    /// Fit the Gevrey order of the synthesized solution.
    Gevrey(RunArgs),
    /// List the bundled presets.
    Presets,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Finite-difference eigenproblem on a square grid.
    Grid,
    /// Separated solution from the one-dimensional ground state.
    Ode,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Bundled problem name.
    #[arg(long, conflicts_with = "input")]
    pub preset: Option<String>,
    /// Problem document (JSON).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output directory for reports.
    #[arg(long, default_value = "nilgevrey-out")]
    pub out: PathBuf,
    /// Cutoff radius.
    #[arg(long = "N")]
    pub n: Option<f64>,
    /// Half-width of the grid.
    #[arg(long = "L")]
    pub l: Option<f64>,
    /// Grid spacing.
    #[arg(long)]
    pub hg: Option<f64>,
    /// Eigensolver tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Largest derivative order in the Gevrey fit.
    #[arg(long, default_value_t = 40)]
    pub sigma_max: u32,
    /// direct, bisect or both.
    #[arg(long)]
    pub route: Option<String>,
    /// Solver configuration document (JSON); flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Keep going after failed checks.
    #[arg(long)]
    pub force: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Potentials as "q,p" in t1, t2.
    #[arg(long)]
    pub qp: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Grid)]
    pub mode: Mode,
    /// Value f(0) used by the Gevrey synthesis.
    #[arg(long)]
    pub f0: Option<f64>,
    /// Spectral parameter for the separated solution, or lambda_{m+1} for `gevrey`.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Degree m for a closed-form Gevrey run.
    #[arg(long)]
    pub m: Option<u32>,
    /// Degree s for a closed-form Gevrey run.
    #[arg(long)]
    pub s: Option<u32>,
    /// Damping constant M.
    #[arg(long)]
    pub damping: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check(a) => commands::check(a),
        Command::Derive(a) => commands::derive(a),
        Command::Solve(a) => commands::solve(a),
        Command::Gevrey(a) => commands::gevrey(a),
        Command::Presets => {
            for name in nilgevrey::presets::PRESET_NAMES {
                println!("{name}");
            }
            Ok(commands::Outcome::Success)
        }
    };
    match result {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::Outcome::from_error(&err).code())
        }
    }
}
