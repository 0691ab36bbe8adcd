//! Trajectory data for a few balls in low dimension, for plotting both
//! parallel schemes side by side.

use aamr_core::parallel::{parallel_solve_with, Dispatch, Variant};
use aamr_core::{IterationParams, Relaxation, Stopping, TraceMode};
use anyhow::{ensure, Result};

use crate::config::ExperimentConfig;
use crate::instance::{generate_instance, ProblemInstance};

pub const DEMO_BETA: f64 = 0.7;
pub const DEMO_LAMBDA: f64 = 0.4;

#[derive(Debug, Clone)]
pub struct DemoOptions {
    pub n: usize,
    pub dim: usize,
    pub seed: u64,
    pub iterations: usize,
}

impl Default for DemoOptions {
    fn default() -> Self {
        DemoOptions {
            n: 3,
            dim: 2,
            seed: ExperimentConfig::default().seed,
            iterations: 40,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DemoOutput {
    pub instance: ProblemInstance,
    /// `index,radius,c0,c1,...`
    pub balls_csv: String,
    /// `variant,n,role,index,x0,x1,...` where role is `block` (one row per
    /// block), `shadow` or `reference`.
    pub iterates_csv: String,
}

fn coords(header: &mut String, dim: usize, prefix: &str) {
    for k in 0..dim {
        header.push_str(&format!(",{prefix}{k}"));
    }
    header.push('\n');
}

fn push_row(out: &mut String, head: &str, v: &[f64]) {
    out.push_str(head);
    for t in v {
        out.push_str(&format!(",{t:?}"));
    }
    out.push('\n');
}

/// Runs both schemes with `q = 0`, `lambda = 0.4`, `beta = 0.7` and each
/// variant's default `gamma`, from the same random start.
pub fn run_demo(opts: &DemoOptions) -> Result<DemoOutput> {
    ensure!(
        opts.n >= 1 && opts.dim >= 1,
        "need at least one ball and one dimension"
    );
    let config = ExperimentConfig {
        dim: opts.dim,
        seed: opts.seed,
        ..ExperimentConfig::default()
    };
    let inst = generate_instance(&config, opts.n, 0)?;
    let ops = inst.operators();
    let x0 = inst.start_point(DEMO_BETA);

    let mut balls_csv = String::from("index,radius");
    coords(&mut balls_csv, opts.dim, "c");
    for (i, (c, r)) in inst.centers.iter().zip(&inst.radii).enumerate() {
        push_row(&mut balls_csv, &format!("{i},{r:?}"), c.as_slice());
    }

    let mut iterates_csv = String::from("variant,n,role,index");
    coords(&mut iterates_csv, opts.dim, "x");
    for variant in Variant::ALL {
        let params = IterationParams::new(DEMO_BETA, variant.default_gamma(opts.n, DEMO_BETA))
            .with_lambda(Relaxation::Constant(DEMO_LAMBDA))
            .with_stopping(
                Stopping::default()
                    .with_tol(f64::MIN_POSITIVE)
                    .with_max_iter(opts.iterations)
                    .with_trace(TraceMode::Full),
            );
        let res = parallel_solve_with(variant, &ops, &params, &inst.q, &x0, Dispatch::Serial)?;
        let name = variant.name();
        for rec in &res.trace.iterates {
            for (i, b) in rec.governing.components().iter().enumerate() {
                push_row(
                    &mut iterates_csv,
                    &format!("{name},{},block,{i}", rec.n),
                    b.as_slice(),
                );
            }
            push_row(
                &mut iterates_csv,
                &format!("{name},{},shadow,0", rec.n),
                rec.shadow.as_slice(),
            );
        }
        push_row(
            &mut iterates_csv,
            &format!("{name},{},reference,0", res.trace.iterations_used),
            inst.reference.point.as_slice(),
        );
    }
    Ok(DemoOutput {
        instance: inst,
        balls_csv,
        iterates_csv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_rows_cover_every_iterate() {
        let opts = DemoOptions {
            iterations: 5,
            ..DemoOptions::default()
        };
        let out = run_demo(&opts).unwrap();
        assert_eq!(out.balls_csv.lines().count(), 1 + 3);
        assert!(out.iterates_csv.starts_with("variant,n,role,index,x0,x1\n"));
        // per variant: 5 recorded iterates with 3 blocks + 1 shadow, plus the reference
        assert_eq!(out.iterates_csv.lines().count(), 1 + 2 * (5 * 4 + 1));
        assert!(out
            .iterates_csv
            .lines()
            .skip(1)
            .all(|l| l.split(',').count() == 6));
    }

    #[test]
    fn demo_shadows_approach_the_projection() {
        let opts = DemoOptions {
            iterations: 3000,
            ..DemoOptions::default()
        };
        let out = run_demo(&opts).unwrap();
        let reference = out.instance.reference.point.as_slice().to_vec();
        for variant in ["Original", "Alternative"] {
            let last = out
                .iterates_csv
                .lines()
                .rfind(|l| l.starts_with(variant) && l.contains(",shadow,"))
                .unwrap();
            let x: Vec<f64> = last.split(',').skip(4).map(|t| t.parse().unwrap()).collect();
            let err = x
                .iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(err < 1e-6, "{variant}: {err}");
        }
    }
}
