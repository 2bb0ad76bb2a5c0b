use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use platoon_core::commands::{
    cmd_compare, cmd_simulate, cmd_sweep, cmd_validate, CliError, Overrides,
};
use platoon_core::validate::ValidateOptions;

#[derive(Parser)]
#[command(
    name = "platoon",
    version,
    about = "Delay-based platoon simulation and string-stability checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Integration step override (m for spatial runs, s for temporal runs).
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            step: self.step,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write trajectory.csv and meta.json.
    Simulate(RunArgs),
    /// Run the delay-based and headway controllers on the same scenario.
    Compare(RunArgs),
    /// Sweep platoon length and leader weight; write sweep.csv.
    Sweep(RunArgs),
    /// Run the built-in oracle checks.
    Validate {
        #[arg(long, hide = true, default_value_t = 1.0)]
        step_scale: f64,
        /// Leader weight used by the platoon and chain checks.
        #[arg(long)]
        kappa0: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => cmd_simulate(&a.config, &a.out, &a.overrides()).map(|_| ()),
        Command::Compare(a) => cmd_compare(&a.config, &a.out, &a.overrides()).map(|_| ()),
        Command::Sweep(a) => cmd_sweep(&a.config, &a.out, &a.overrides()).map(|_| ()),
        Command::Validate { step_scale, kappa0 } => cmd_validate(&ValidateOptions {
            step_scale: *step_scale,
            kappa0: *kappa0,
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &CliError) -> ExitCode {
    ExitCode::from(e.exit_code() as u8)
}
