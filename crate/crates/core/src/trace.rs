use alloc::vec::Vec;

use crate::vector::Vector;

/// One iteration of a fixed-point run.
///
/// Record `n` holds the governing point `x_n`, its shadow, the step length
/// `||x_{n+1} - x_n||` (max over blocks for block iterates) and, when a
/// reference is known, the distance from the shadow to it.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<G> {
    pub n: usize,
    pub governing: G,
    pub shadow: Vector,
    pub step_norm: f64,
    pub error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace<G> {
    pub iterates: Vec<StepRecord<G>>,
    pub converged: bool,
    pub iterations_used: usize,
}

impl<G> RunTrace<G> {
    pub fn last(&self) -> Option<&StepRecord<G>> {
        self.iterates.last()
    }

    pub fn final_step_norm(&self) -> Option<f64> {
        self.last().map(|r| r.step_norm)
    }

    pub fn final_error(&self) -> Option<f64> {
        self.last().and_then(|r| r.error)
    }
}
