//! Iteration parameters shared by the splitting solvers.

use alloc::sync::Arc;
use core::fmt;

use crate::error::{Error, Result};
use crate::vector::Vector;

/// Relaxation schedule `n -> lambda_n` with values in `[0, 1]`.
///
/// Convergence needs `sum lambda_n (1 - lambda_n) = +inf`; a constant in
/// `(0, 1)` always satisfies it. For custom schedules that condition is the
/// caller's responsibility, only the range is checked.
#[derive(Clone)]
pub enum Relaxation {
    Constant(f64),
    Schedule(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl Relaxation {
    pub fn schedule(f: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        Relaxation::Schedule(Arc::new(f))
    }

    pub fn at(&self, n: usize) -> Result<f64> {
        let lambda = match self {
            Relaxation::Constant(l) => *l,
            Relaxation::Schedule(f) => f(n),
        };
        if (0.0..=1.0).contains(&lambda) {
            Ok(lambda)
        } else {
            Err(Error::invalid("lambda", "relaxation values must lie in [0, 1]"))
        }
    }
}

impl Default for Relaxation {
    fn default() -> Self {
        Relaxation::Constant(0.9)
    }
}

impl fmt::Debug for Relaxation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relaxation::Constant(l) => write!(f, "Constant({l})"),
            Relaxation::Schedule(_) => f.write_str("Schedule(..)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StopRule {
    /// Stop once `||x_{n+1} - x_n|| < tol` (max over blocks for block schemes).
    FixedPointResidual,
    /// Stop once the shadow point is within `tol` of the reference.
    TrueError(Vector),
}

/// How much of the iteration history a run keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceMode {
    #[default]
    Full,
    /// Keep only the final record.
    LastOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stopping {
    pub tol: f64,
    pub max_iter: usize,
    pub rule: StopRule,
    pub trace: TraceMode,
}

impl Default for Stopping {
    fn default() -> Self {
        Stopping {
            tol: 1e-6,
            max_iter: 100_000,
            rule: StopRule::FixedPointResidual,
            trace: TraceMode::Full,
        }
    }
}

impl Stopping {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::invalid("tol", "must be positive and finite"));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter", "must be positive"));
        }
        Ok(())
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_rule(mut self, rule: StopRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_trace(mut self, trace: TraceMode) -> Self {
        self.trace = trace;
        self
    }

    pub(crate) fn reference(&self) -> Option<&Vector> {
        match &self.rule {
            StopRule::TrueError(r) => Some(r),
            StopRule::FixedPointResidual => None,
        }
    }
}

/// Parameters of an AAMR run: `beta` in `(0, 1)`, `gamma > 0`, the
/// relaxation schedule and the stopping configuration.
#[derive(Debug, Clone)]
pub struct IterationParams {
    pub beta: f64,
    pub gamma: f64,
    pub lambda: Relaxation,
    pub stopping: Stopping,
}

impl Default for IterationParams {
    fn default() -> Self {
        IterationParams {
            beta: 0.5,
            gamma: 1.0,
            lambda: Relaxation::default(),
            stopping: Stopping::default(),
        }
    }
}

impl IterationParams {
    pub fn new(beta: f64, gamma: f64) -> Self {
        IterationParams {
            beta,
            gamma,
            ..Default::default()
        }
    }

    pub fn with_lambda(mut self, lambda: Relaxation) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_stopping(mut self, stopping: Stopping) -> Self {
        self.stopping = stopping;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::invalid("beta", "must lie in (0, 1)"));
        }
        validate_gamma(self.gamma)?;
        if let Relaxation::Constant(l) = self.lambda {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::invalid("lambda", "relaxation values must lie in [0, 1]"));
            }
        }
        self.stopping.validate()
    }
}

pub(crate) fn validate_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("gamma", "must be positive and finite"))
    }
}
