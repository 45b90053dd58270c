use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cxbody_cli::{apply_overrides, run, ExperimentConfig};

#[derive(Parser)]
#[command(name = "cxbody", version, about = "Experiments on complex intersection bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Section rule level.
        #[arg(long)]
        level: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => match ExperimentConfig::load(&config) {
            Ok(_) => {
                println!("{}: ok", config.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(1)
            }
        },
        Command::Run { config, level, seed, out } => {
            let mut cfg = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(1);
                }
            };
            apply_overrides(&mut cfg, level, seed, out);
            match run(&cfg) {
                Ok((outcome, dir)) => {
                    for r in &outcome.rows {
                        if !r.quantity.contains('[') || outcome.rows.len() <= 12 {
                            println!("{} {} = {:.10}", r.experiment, r.quantity, r.value);
                        }
                    }
                    println!("wrote {}", dir.display());
                    if outcome.violation {
                        eprintln!("inequality violated beyond tolerance");
                        ExitCode::from(2)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
