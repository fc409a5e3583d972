use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use cavitylink::runner::{exit_code, parse_config, run, OutputFormat, Overrides, Scenario};

/// Steady states, dynamics and parameter sweeps for two driven cavities sharing a lossy fiber.
#[derive(Parser, Debug)]
#[command(name = "cavitylink", version)]
struct Cli {
    scenario: Scenario,
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `[output] dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = parse_config(&cli.config, Some(cli.scenario)).and_then(|mut config| {
        config.apply(&Overrides {
            out: cli.out,
            seed: cli.seed,
            format: cli.format,
            workers: cli.workers,
        });
        run(&config)
    });
    match result {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("cavitylink: some validation checks failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("cavitylink: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
