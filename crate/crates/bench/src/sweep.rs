//! The β-sweep over instances and parallel variants.

use aamr_core::parallel::{parallel_resolvent_of_sum, Variant};
use aamr_core::params::StopRule;
use aamr_core::{Relaxation, Stopping, TraceMode};
use anyhow::{ensure, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::instance::{generate_instance, ProblemInstance};

/// One solver run. Field order is the column order of `results.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub instance_id: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub beta: f64,
    pub variant: VariantName,
    pub iterations: usize,
    pub converged: bool,
    pub final_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VariantName {
    Original,
    Alternative,
}

impl From<Variant> for VariantName {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Original => VariantName::Original,
            Variant::Alternative => VariantName::Alternative,
        }
    }
}

impl From<VariantName> for Variant {
    fn from(v: VariantName) -> Self {
        match v {
            VariantName::Original => Variant::Original,
            VariantName::Alternative => Variant::Alternative,
        }
    }
}

/// Runs one variant on one instance at one β, stopping on the true error
/// against the instance's reference projection.
pub fn run_cell(
    config: &ExperimentConfig,
    inst: &ProblemInstance,
    beta: f64,
    variant: Variant,
) -> Result<SweepRecord> {
    let reference = inst.reference.point.clone();
    let stopping = Stopping::default()
        .with_tol(config.tol)
        .with_max_iter(config.max_iter)
        .with_rule(StopRule::TrueError(reference.clone()))
        .with_trace(TraceMode::LastOnly);
    let res = parallel_resolvent_of_sum(
        variant,
        &inst.operators(),
        &inst.q,
        beta,
        Relaxation::Constant(config.lambda),
        stopping,
        &inst.start_point(beta),
    )
    .with_context(|| {
        format!(
            "N={} id={} beta={beta} {}",
            inst.count(),
            inst.instance_id,
            variant.name()
        )
    })?;

    let final_error = res.shadow_limit.distance(&reference)?;
    let record = SweepRecord {
        instance_id: inst.instance_id,
        n: inst.count(),
        beta,
        variant: variant.into(),
        iterations: res.trace.iterations_used,
        converged: res.converged(),
        final_error,
    };
    if record.converged {
        // recomputed independently of the stop test inside the solver
        ensure!(
            final_error < 2.0 * config.tol,
            "converged run fails re-validation: {record:?}"
        );
    }
    Ok(record)
}

/// Generates every instance and runs every `(N, instance, beta, variant)`
/// cell on up to `jobs` worker threads (0 picks the rayon default).
/// Records come back in that lexicographic order regardless of scheduling.
pub fn run_sweep(config: &ExperimentConfig, jobs: usize) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    pool.install(|| sweep_in_pool(config))
}

fn sweep_in_pool(config: &ExperimentConfig) -> Result<Vec<SweepRecord>> {
    let betas = config.betas()?;
    let keys: Vec<(usize, usize)> = config
        .constraint_counts
        .iter()
        .flat_map(|&n| (0..config.instances_per_count).map(move |id| (n, id)))
        .collect();
    let instances = keys
        .par_iter()
        .map(|&(n, id)| generate_instance(config, n, id))
        .collect::<Result<Vec<_>>>()?;

    let cells: Vec<(&ProblemInstance, f64, Variant)> = instances
        .iter()
        .flat_map(|inst| {
            betas
                .iter()
                .flat_map(move |&b| Variant::ALL.into_iter().map(move |v| (inst, b, v)))
        })
        .collect();
    cells
        .par_iter()
        .map(|&(inst, beta, variant)| run_cell(config, inst, beta, variant))
        .collect()
}
