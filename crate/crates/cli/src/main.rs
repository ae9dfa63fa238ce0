//! `electoral`: batch front end for the electoral competition model.
//!
//! Exit codes: 0 success, 1 configuration or argument error, 2 equilibrium
//! iteration did not converge, 3 an assumption certificate found a witness.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use electoral_core::VaryIdeal;

use commands::{AssumptionArg, EXIT_CONFIG};
use report::RegimeArg;

#[derive(Parser)]
#[command(name = "electoral", version, about = "Equilibrium platforms and expected policy under median-voter uncertainty")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VaryArg {
    Tl,
    Tr,
}

#[derive(Subcommand)]
enum Command {
    /// Compute equilibrium platforms, win probability and expected policy.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "commitment")]
        regime: RegimeArg,
        /// Output file (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep one ideal policy and write one CSV row per value and regime.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        vary: VaryArg,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        /// Number of values, endpoints included.
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value = "commitment")]
        regime: RegimeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numerically certify a modelling assumption on a tuple grid.
    Check {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        assumption: AssumptionArg,
        /// Minimum number of tuples to test.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// No-commitment sweep for quadratic payoffs and a triangular(1/2) belief,
    /// with closed-form columns.
    Counterexample {
        #[arg(long = "t_r", visible_alias = "t-r", allow_negative_numbers = true)]
        t_r: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Solve { config, regime, out } => commands::solve(&config, regime, out.as_ref()),
        Command::Sweep { config, vary, from, to, steps, regime, out } => {
            let vary = match vary {
                VaryArg::Tl => VaryIdeal::Tl,
                VaryArg::Tr => VaryIdeal::Tr,
            };
            commands::sweep_values(from, to, steps)
                .and_then(|values| commands::sweep(&config, vary, &values, regime, out.as_ref()))
        }
        Command::Check { config, assumption, samples, out } => {
            commands::check(&config, assumption, samples, out.as_ref())
        }
        Command::Counterexample { t_r, out } => commands::counterexample(t_r, out.as_ref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
