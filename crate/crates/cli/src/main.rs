//! `multicurve` command-line tool: curve inspection, swaption pricing,
//! calibration, Monte Carlo checks and report generation.

mod commands;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::{CliError, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(name = "multicurve", version, about = "Multi-curve HJM engine: curves, swaption pricing, calibration and Monte Carlo checks")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

/// Curve input shared by every command.
#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    /// Curve CSV (`date,kind,tenor,rate`); the bundled 12-Aug-2010 dataset when omitted.
    #[arg(long)]
    pub curves: Option<PathBuf>,

    /// Anchor date overriding the file's `# anchor:` directive.
    #[arg(long)]
    pub anchor: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print pillars and interpolated samples of a curve file.
    Curves(commands::curves::CurvesArgs),
    /// Price one swaption with the analytic formula.
    Price(commands::price::PriceArgs),
    /// Fit a model variant to swaption premia.
    Calibrate(commands::calibrate::CalibrateArgs),
    /// Run Monte Carlo martingale checks.
    Simulate(commands::simulate::SimulateArgs),
    /// Build plotting data from calibration runs.
    Report(commands::report::ReportArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("cannot configure {n} threads: {e}")))?;
    }
    match cli.command {
        Command::Curves(a) => commands::curves::run(a),
        Command::Price(a) => commands::price::run(a),
        Command::Calibrate(a) => commands::calibrate::run(a),
        Command::Simulate(a) => commands::simulate::run(a),
        Command::Report(a) => commands::report::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
