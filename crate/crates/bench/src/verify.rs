//! Re-validation of a results directory written by `bench run`.

use std::fs;
use std::path::Path;

use aamr_core::parallel::Variant;
use anyhow::{Context, Result};

use crate::config::ExperimentConfig;
use crate::report::{read_records, records_to_csv, summarize, summary_to_csv, RESULTS_FILE, SUMMARY_FILE};
use crate::sweep::{run_sweep, VariantName};

pub const CONFIG_FILE: &str = "config.json";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub records: usize,
    pub converged: usize,
    pub problems: Vec<String>,
    /// Whether a fresh sweep reproduced `results.csv` byte for byte; `None`
    /// when no rerun was requested.
    pub rerun_identical: Option<bool>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.problems.is_empty() && self.rerun_identical != Some(false)
    }
}

pub fn verify_dir(dir: &Path, rerun: bool, jobs: usize) -> Result<VerifyReport> {
    let config = ExperimentConfig::load(&dir.join(CONFIG_FILE))?;
    let results_path = dir.join(RESULTS_FILE);
    let records = read_records(&results_path)?;
    let mut problems = Vec::new();

    let betas = config.betas()?;
    let expected: Vec<(usize, usize, u64, VariantName)> = config
        .constraint_counts
        .iter()
        .flat_map(|&n| {
            let betas = &betas;
            (0..config.instances_per_count).flat_map(move |id| {
                betas
                    .iter()
                    .flat_map(move |b| Variant::ALL.map(|v| (n, id, b.to_bits(), v.into())))
            })
        })
        .collect();
    let found: Vec<_> = records
        .iter()
        .map(|r| (r.n, r.instance_id, r.beta.to_bits(), r.variant))
        .collect();
    if found != expected {
        problems.push(format!(
            "{} records do not match the {} cells the config describes",
            found.len(),
            expected.len()
        ));
    }

    for (line, r) in records.iter().enumerate() {
        let at = format!("{RESULTS_FILE} row {}", line + 1);
        if r.iterations > config.max_iter {
            problems.push(format!("{at}: {} iterations exceed max_iter", r.iterations));
        }
        if !(r.final_error >= 0.0 && r.final_error.is_finite()) {
            problems.push(format!("{at}: invalid final_error {}", r.final_error));
        }
        if r.converged && (r.final_error.is_nan() || r.final_error >= config.tol) {
            problems.push(format!("{at}: converged with final_error {}", r.final_error));
        }
        if !r.converged && r.iterations != config.max_iter {
            problems.push(format!("{at}: censored before max_iter"));
        }
    }

    let summary_path = dir.join(SUMMARY_FILE);
    let stored = fs::read(&summary_path).with_context(|| format!("reading {}", summary_path.display()))?;
    if stored != summary_to_csv(&summarize(&records)?)? {
        problems.push(format!("{SUMMARY_FILE} does not match the recomputed summary"));
    }

    let rerun_identical = if rerun {
        let fresh = records_to_csv(&run_sweep(&config, jobs)?)?;
        let stored =
            fs::read(&results_path).with_context(|| format!("reading {}", results_path.display()))?;
        Some(fresh == stored)
    } else {
        None
    };

    Ok(VerifyReport {
        records: records.len(),
        converged: records.iter().filter(|r| r.converged).count(),
        problems,
        rerun_identical,
    })
}
