use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flexinfo_cli::commands::{self, Outcome};
use flexinfo_cli::config::DEFAULT_SEED;
use flexinfo_cli::{CliError, RunConfig, EXIT_PROPERTY_VIOLATED};
use flexinfo_core::ArithmeticMode;

#[derive(Parser)]
#[command(name = "flexinfo", version, about = "Value of flexible information under changes to a decision problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Args)]
struct Common {
    /// Arithmetic: exact rationals or f64 with tolerances.
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    /// Grid resolution for acquisition problems.
    #[arg(long)]
    grid: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Prior as comma-separated probabilities, e.g. `3/10,7/10`; repeatable.
    #[arg(long = "prior")]
    priors: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Value function and optimal-action cells of a problem.
    Analyze {
        problem: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compares a problem with its transformation.
    Compare {
        original: PathBuf,
        transformed: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Optimal information acquisition under a cost.
    Acquire {
        problem: PathBuf,
        /// Cost JSON file, or inline JSON starting with `{`.
        #[arg(long)]
        cost: String,
        #[command(flatten)]
        common: Common,
    },
    /// First- and second-best contracts for a screening instance.
    Screen {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// A cost under which a target distribution is optimal.
    SynthCost {
        problem: PathBuf,
        target: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Runs a seeded property suite, or `all`.
    Verify {
        suite: String,
        #[command(flatten)]
        common: Common,
    },
}

fn config(name: &str, inputs: Vec<PathBuf>, c: Common) -> RunConfig {
    let mut cfg = RunConfig::new(name, c.out);
    cfg.inputs = inputs;
    cfg.mode = match c.mode {
        Mode::Exact => ArithmeticMode::Exact,
        Mode::Float => ArithmeticMode::Float,
    };
    cfg.grid = c.grid;
    cfg.seed = c.seed;
    cfg.priors = c.priors;
    cfg
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Analyze { problem, common } => commands::analyze(&config("analyze", vec![problem], common)),
        Command::Compare { original, transformed, common } => {
            commands::compare(&config("compare", vec![original, transformed], common))
        }
        Command::Acquire { problem, cost, common } => commands::acquire(&config("acquire", vec![problem], common), &cost),
        Command::Screen { instance, common } => commands::screen(&config("screen", vec![instance], common)),
        Command::SynthCost { problem, target, common } => {
            commands::synth_cost(&config("synth-cost", vec![problem, target], common))
        }
        Command::Verify { suite, common } => {
            let cfg = config("verify", Vec::new(), common);
            commands::verify(&cfg, &suite)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(o) => {
            println!("{}", o.summary);
            for p in &o.written {
                println!("wrote {}", p.display());
            }
            if o.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_PROPERTY_VIOLATED as u8)
            }
        }
        Err(e) => {
            eprintln!("flexinfo: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
