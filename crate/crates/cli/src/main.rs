use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spinwig_cli::{exit_code, execute, Overrides, RunOptions, EXIT_CONFIG, EXIT_NUMERICAL};
use spinwig_core::output::DEFAULT_PRECISION;
use spinwig_core::Scenario;

#[derive(Parser)]
#[command(name = "spinwig", version, about = "Spin-resolved phase-space transport solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation from a configuration file.
    Run {
        config: PathBuf,
        /// Start from a named preset (overrides `run.scenario`).
        #[arg(long)]
        scenario: Option<Scenario>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
        /// Reserved; every preset is deterministic.
        #[arg(long)]
        seed: Option<u64>,
        /// Significant digits in CSV output.
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: usize,
        /// Write snapshots as raw little-endian float64 instead of CSV.
        #[arg(long)]
        binary: bool,
    },
    /// Run the limit checks and print one line per check.
    Limits,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // Usage errors count as configuration errors; exit code 2 is reserved
    // for numerical failures.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let code = match cli.command {
        Command::Run {
            config,
            scenario,
            out,
            steps,
            dt,
            seed,
            precision,
            binary,
        } => {
            let opts = RunOptions {
                config,
                overrides: Overrides {
                    scenario,
                    n_steps: steps,
                    dt,
                    seed,
                },
                out,
                precision,
                binary,
            };
            match execute(&opts) {
                Ok(series) => {
                    println!(
                        "wrote {} observable rows and {} snapshots to {}",
                        series.observables.len(),
                        series.snapshots.len(),
                        opts.out.display()
                    );
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_code(&e)
                }
            }
        }
        Command::Limits => {
            let reports = spinwig_core::limits::run_all();
            for r in &reports {
                println!("{r}");
            }
            if reports.iter().all(|r| r.passed()) {
                0
            } else {
                EXIT_NUMERICAL
            }
        }
    };
    ExitCode::from(code as u8)
}
