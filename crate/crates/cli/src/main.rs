use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sommerfeld_core::harness::{emit_plots, read_bundle, run_experiment, write_bundle, ExperimentConfig, Status};

#[derive(Parser)]
#[command(name = "sommerfeld", version, about = "Radiation-condition experiments for long-range potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check in a config and write the report bundle.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Bundle directory; defaults to `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads, 0 for machine parallelism.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Parse and validate a config without computing anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Re-emit plot CSVs and the gnuplot script from a bundle.
    Plots {
        #[arg(long)]
        bundle: PathBuf,
        /// Curve ids to emit; all curves when omitted.
        #[arg(long = "curve")]
        curves: Vec<String>,
        /// Output directory, `<bundle>/plots` by default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_CONFIG)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Validate { config } => {
            match ExperimentConfig::load(&config).and_then(|c| c.validate()) {
                Ok(()) => {
                    println!("{}: ok", config.display());
                    ExitCode::SUCCESS
                }
                Err(e) => config_error(e),
            }
        }
        Command::Run { config, out, workers } => {
            let mut cfg = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return config_error(e),
            };
            if let Some(w) = workers {
                cfg.workers = w;
            }
            let Some(out) = out.or_else(|| cfg.output_dir.clone()) else {
                return config_error("no output directory: pass --out or set output_dir");
            };
            let bundle = match run_experiment(&cfg) {
                Ok(b) => b,
                Err(e) => return config_error(e),
            };
            if let Err(e) = write_bundle(&bundle, &out) {
                return config_error(format!("cannot write bundle to {}: {e}", out.display()));
            }
            for c in &bundle.summary.checks {
                let status = match c.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Error => "ERROR",
                };
                match &c.message {
                    Some(m) => println!("{status:5} {}: {m}", c.check),
                    None => println!("{status:5} {}", c.check),
                }
            }
            println!("bundle written to {}", out.display());
            if bundle.summary.all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Command::Plots { bundle, curves, out } => {
            let b = match read_bundle(&bundle) {
                Ok(b) => b,
                Err(e) => return config_error(format!("cannot read bundle {}: {e}", bundle.display())),
            };
            let dir = out.unwrap_or_else(|| bundle.join("plots"));
            let which = if curves.is_empty() { None } else { Some(curves.as_slice()) };
            match emit_plots(&b, which, &dir) {
                Ok(files) => {
                    for f in files {
                        println!("{}", f.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => config_error(e),
            }
        }
    }
}
