//! Command-line driver: configuration files, run orchestration and output.

pub mod config;

use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use spinwig_core::output::{
    write_observables_file, write_snapshot_binary, write_snapshot_file, DEFAULT_PRECISION,
};
use spinwig_core::{run, Error, PhaseSpaceGrid, Result, SnapshotSeries, SpinChargeState};

pub use config::{parse_config, parse_str, resolved_config, CliConfig, Overrides};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

pub const RESOLVED_FILE: &str = "resolved.cfg";
pub const OBSERVABLES_FILE: &str = "observables.csv";

/// Exit code for a failed command.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub config: PathBuf,
    pub overrides: Overrides,
    pub out: PathBuf,
    pub precision: usize,
    pub binary: bool,
}

impl RunOptions {
    pub fn new(config: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        RunOptions {
            config: config.into(),
            overrides: Overrides::default(),
            out: out.into(),
            precision: DEFAULT_PRECISION,
            binary: false,
        }
    }
}

/// Parses the configuration, writes the resolved echo, runs, and writes
/// observables and snapshots. A run that fails part way still writes what
/// it produced before returning the error.
pub fn execute(opts: &RunOptions) -> Result<SnapshotSeries> {
    let cfg = parse_config(&opts.config, &opts.overrides)?;
    fs::create_dir_all(&opts.out)?;
    fs::write(opts.out.join(RESOLVED_FILE), resolved_config(&cfg))?;
    info!(
        "scenario {}: {} steps of dt = {}",
        cfg.run.scenario, cfg.run.n_steps, cfg.run.dt
    );
    match run(&cfg.run) {
        Ok(series) => {
            for w in &series.warnings {
                warn!("{w}");
            }
            write_series(&series, opts)?;
            Ok(series)
        }
        Err(failure) => {
            if let Some(partial) = &failure.partial {
                write_series(partial, opts)?;
            }
            Err(failure.error)
        }
    }
}

fn write_series(series: &SnapshotSeries, opts: &RunOptions) -> Result<()> {
    write_observables_file(
        &series.observables,
        &opts.out.join(OBSERVABLES_FILE),
        opts.precision,
    )?;
    for (k, snap) in series.snapshots.iter().enumerate() {
        write_state(snap, &series.grid, &opts.out, &format!("snapshot_{k:05}"), opts)?;
    }
    write_state(&series.final_state, &series.grid, &opts.out, "final", opts)
}

fn write_state(
    state: &SpinChargeState,
    grid: &PhaseSpaceGrid,
    dir: &Path,
    stem: &str,
    opts: &RunOptions,
) -> Result<()> {
    if opts.binary {
        let file = fs::File::create(dir.join(format!("{stem}.bin")))?;
        write_snapshot_binary(state, grid, std::io::BufWriter::new(file))
    } else {
        write_snapshot_file(state, grid, &dir.join(format!("{stem}.csv")), opts.precision)
    }
}
