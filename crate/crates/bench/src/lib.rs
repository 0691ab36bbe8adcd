//! Benchmark harness for the parallel AAMR schemes on random
//! ball-intersection problems: find the point of `B_1 ∩ ... ∩ B_N` closest
//! to the origin, sweeping β for both variants.

pub mod config;
pub mod demo;
pub mod instance;
pub mod report;
pub mod rng;
pub mod svg;
pub mod sweep;
pub mod verify;

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

pub use config::{BetaGrid, BetaRange, ExperimentConfig};
pub use report::{emit_report, SummaryRow};
pub use sweep::{run_sweep, SweepRecord, VariantName};

/// Sweeps `config` and writes the config, CSVs and plots to `out_dir`.
pub fn run_to_dir(config: &ExperimentConfig, out_dir: &Path, jobs: usize) -> Result<Vec<SummaryRow>> {
    let records = run_sweep(config, jobs)?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let path = out_dir.join(verify::CONFIG_FILE);
    fs::write(&path, config.to_json()).with_context(|| format!("writing {}", path.display()))?;
    emit_report(&records, out_dir)
}
