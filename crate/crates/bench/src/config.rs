//! Experiment configuration, read from JSON.

use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

/// Grid values are rounded to this many decimals so that `0.5 + k * 0.005`
/// prints as the value a reader expects.
const GRID_DECIMALS: f64 = 1e9;

/// Configuration of one β-sweep over random ball-intersection problems.
///
/// Missing keys fall back to the defaults; unknown keys are an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "defaults::dim")]
    pub dim: usize,
    #[serde(default = "defaults::constraint_counts")]
    pub constraint_counts: Vec<usize>,
    #[serde(default = "defaults::instances_per_count")]
    pub instances_per_count: usize,
    #[serde(default)]
    pub beta_grid: BetaGrid,
    #[serde(default = "defaults::lambda")]
    pub lambda: f64,
    #[serde(default = "defaults::tol")]
    pub tol: f64,
    #[serde(default = "defaults::max_iter")]
    pub max_iter: usize,
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    #[serde(default = "defaults::coord_range")]
    pub coord_range: [f64; 2],
    #[serde(default = "defaults::radius_pad")]
    pub radius_pad: [f64; 2],
}

mod defaults {
    pub fn dim() -> usize {
        10
    }
    pub fn constraint_counts() -> Vec<usize> {
        vec![2, 4, 6, 8, 10]
    }
    pub fn instances_per_count() -> usize {
        100
    }
    pub fn lambda() -> f64 {
        0.9
    }
    pub fn tol() -> f64 {
        1e-6
    }
    pub fn max_iter() -> usize {
        200_000
    }
    pub fn seed() -> u64 {
        2019
    }
    pub fn coord_range() -> [f64; 2] {
        [-5.0, 5.0]
    }
    pub fn radius_pad() -> [f64; 2] {
        [0.05, 0.1]
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dim: defaults::dim(),
            constraint_counts: defaults::constraint_counts(),
            instances_per_count: defaults::instances_per_count(),
            beta_grid: BetaGrid::default(),
            lambda: defaults::lambda(),
            tol: defaults::tol(),
            max_iter: defaults::max_iter(),
            seed: defaults::seed(),
            coord_range: defaults::coord_range(),
            radius_pad: defaults::radius_pad(),
        }
    }
}

/// β values, either listed or as an inclusive `min..=max` range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BetaGrid {
    List(Vec<f64>),
    Range(BetaRange),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Default for BetaGrid {
    fn default() -> Self {
        BetaGrid::Range(BetaRange {
            min: 0.5,
            max: 0.995,
            step: 0.005,
        })
    }
}

impl BetaGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            BetaGrid::List(v) => Ok(v.clone()),
            BetaGrid::Range(r) => {
                ensure!(
                    r.step > 0.0 && r.step.is_finite(),
                    "beta_grid step must be positive"
                );
                ensure!(r.min <= r.max, "beta_grid min exceeds max");
                // the small slack keeps `max` itself when it sits on the grid
                let count = ((r.max - r.min) / r.step + 1e-9).floor() as usize + 1;
                Ok((0..count)
                    .map(|k| {
                        let b = r.min + k as f64 * r.step;
                        (b * GRID_DECIMALS).round() / GRID_DECIMALS
                    })
                    .collect())
            }
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn betas(&self) -> Result<Vec<f64>> {
        self.beta_grid.values()
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.dim > 0, "dim must be positive");
        ensure!(!self.constraint_counts.is_empty(), "constraint_counts is empty");
        for &n in &self.constraint_counts {
            ensure!(
                n > 0 && n < crate::rng::MAX_COUNT,
                "constraint count {n} out of range"
            );
        }
        ensure!(
            self.instances_per_count > 0 && self.instances_per_count <= crate::rng::MAX_INSTANCES,
            "instances_per_count out of range"
        );
        let betas = self.betas()?;
        ensure!(!betas.is_empty(), "beta_grid is empty");
        for &b in &betas {
            ensure!(b > 0.0 && b < 1.0, "beta {b} outside (0, 1)");
        }
        ensure!((0.0..=1.0).contains(&self.lambda), "lambda must lie in [0, 1]");
        ensure!(self.tol > 0.0 && self.tol.is_finite(), "tol must be positive");
        ensure!(self.max_iter > 0, "max_iter must be positive");
        check_interval("coord_range", self.coord_range)?;
        check_interval("radius_pad", self.radius_pad)?;
        if self.radius_pad[0] <= 0.0 {
            bail!("radius_pad must be positive so z is interior to every ball");
        }
        Ok(())
    }
}

fn check_interval(name: &str, [lo, hi]: [f64; 2]) -> Result<()> {
    ensure!(
        lo.is_finite() && hi.is_finite() && lo <= hi,
        "{name} must be an ordered finite interval"
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_keys() {
        let c: ExperimentConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        let betas = c.betas().unwrap();
        assert_eq!(betas.len(), 100);
        assert_eq!(betas[0], 0.5);
        assert_eq!(betas[1], 0.505);
        assert_eq!(*betas.last().unwrap(), 0.995);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"dims": 3}"#).is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(
            r#"{"beta_grid": {"min": 0.5, "max": 0.9, "step": 0.1, "extra": 1}}"#
        )
        .is_err());
    }

    #[test]
    fn grid_accepts_list_or_range() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"beta_grid": [0.9]}"#).unwrap();
        assert_eq!(c.betas().unwrap(), vec![0.9]);
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"beta_grid": {"min": 0.5, "max": 0.99, "step": 0.02}}"#).unwrap();
        let betas = c.betas().unwrap();
        assert_eq!(betas.len(), 25);
        assert_eq!(betas[24], 0.98);
    }

    #[test]
    fn validation_catches_bad_values() {
        let bad = [
            r#"{"beta_grid": [1.0]}"#,
            r#"{"constraint_counts": [0]}"#,
            r#"{"coord_range": [5, -5]}"#,
            r#"{"radius_pad": [0, 0.1]}"#,
            r#"{"lambda": 1.5}"#,
            r#"{"tol": 0}"#,
        ];
        for text in bad {
            let c: ExperimentConfig = serde_json::from_str(text).unwrap();
            assert!(c.validate().is_err(), "{text}");
        }
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn json_round_trips() {
        let c = ExperimentConfig::default();
        let back: ExperimentConfig = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }
}
