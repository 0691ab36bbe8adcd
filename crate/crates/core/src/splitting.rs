//! Two-operator splitting: AAMR for `J_{A+B}(q)` and the Douglas-Rachford
//! baseline for `zer(A+B)`.
//!
//! The AAMR iteration is
//!
//! ```text
//! x_{n+1} = (1 - lambda_n) x_n
//!         + lambda_n (2 beta J_{gamma B_{-q}} - Id)(2 beta J_{gamma A_{-q}} - Id)(x_n)
//! ```
//!
//! with `J_{gamma A_{-q}}(x) = J_{gamma A}(x + q) - q`. Under the range
//! condition `q in ran(Id + gamma / (2 (1 - beta)) (A + B))`, which callers
//! must guarantee, the shadows `J_{gamma A}(q + x_n)` converge to
//! `J_{gamma / (2 (1 - beta)) (A + B)}(q)`.

use crate::error::{check_dim, Error, Result};
use crate::iterate;
use crate::operator::{reflected_step, MonotoneOperator};
use crate::params::{validate_gamma, IterationParams, Relaxation, Stopping};
use crate::sets::ConvexSet;
use crate::trace::RunTrace;
use crate::vector::Vector;

#[derive(Debug, Clone)]
pub struct AamrResult {
    /// The limit of the shadow sequence; for AAMR this approximates
    /// `J_{gamma / (2 (1 - beta)) (A + B)}(q)`.
    pub shadow_limit: Vector,
    /// The last governing iterate.
    pub governing_limit: Vector,
    pub trace: RunTrace<Vector>,
}

impl AamrResult {
    pub fn converged(&self) -> bool {
        self.trace.converged
    }

    fn from_outcome(out: iterate::Outcome<Vector>) -> Self {
        AamrResult {
            shadow_limit: out.shadow,
            governing_limit: out.governing,
            trace: out.trace,
        }
    }
}

fn check_pair(a: &MonotoneOperator, b: &MonotoneOperator) -> Result<usize> {
    check_dim(a.dim(), b.dim())?;
    Ok(a.dim())
}

/// `2 beta J_{gamma A_{-q}}(x) - x`.
fn shifted_modified_reflection(
    a: &MonotoneOperator,
    beta: f64,
    gamma: f64,
    q: &Vector,
    x: &Vector,
) -> Result<Vector> {
    let j = &a.resolvent(gamma, &(x + q))? - q;
    j.lincomb(2.0 * beta, x, -1.0)
}

/// One relaxed AAMR step with raw parameters. `beta = 1` is accepted here so
/// the Douglas-Rachford degeneration can be checked.
pub(crate) fn aamr_map(
    a: &MonotoneOperator,
    b: &MonotoneOperator,
    beta: f64,
    gamma: f64,
    lambda: f64,
    q: &Vector,
    x: &Vector,
) -> Result<Vector> {
    let y = shifted_modified_reflection(a, beta, gamma, q, x)?;
    let t = shifted_modified_reflection(b, beta, gamma, q, &y)?;
    x.lincomb(1.0 - lambda, &t, lambda)
}

/// `x_{n+1}` of the AAMR iteration from `x_n = x`, using `lambda_n`.
pub fn aamr_step(
    a: &MonotoneOperator,
    b: &MonotoneOperator,
    params: &IterationParams,
    q: &Vector,
    x: &Vector,
    n: usize,
) -> Result<Vector> {
    params.validate()?;
    let dim = check_pair(a, b)?;
    q.check_dim(dim)?;
    x.check_dim(dim)?;
    let lambda = params.lambda.at(n)?;
    aamr_map(a, b, params.beta, params.gamma, lambda, q, x)
}

/// Iterates AAMR from `x0` until the stop rule fires or `max_iter` runs out.
///
/// The shadow of `x_n` is `J_{gamma A}(q + x_n)`; `shadow_limit` claims
/// `J_{gamma / (2 (1 - beta)) (A + B)}(q)`.
pub fn aamr_solve(
    a: &MonotoneOperator,
    b: &MonotoneOperator,
    params: &IterationParams,
    q: &Vector,
    x0: &Vector,
) -> Result<AamrResult> {
    params.validate()?;
    let dim = check_pair(a, b)?;
    q.check_dim(dim)?;
    x0.check_dim(dim)?;
    if let Some(r) = params.stopping.reference() {
        r.check_dim(dim)?;
    }
    let (beta, gamma) = (params.beta, params.gamma);
    let out = iterate::run(
        x0.clone(),
        &params.stopping,
        |n, x| aamr_map(a, b, beta, gamma, params.lambda.at(n)?, q, x),
        |x| a.resolvent(gamma, &(q + x)),
    )?;
    Ok(AamrResult::from_outcome(out))
}

/// `J_{A+B}(q)` by AAMR with `gamma = 2 (1 - beta)`.
pub fn resolvent_of_sum(
    a: &MonotoneOperator,
    b: &MonotoneOperator,
    q: &Vector,
    beta: f64,
    lambda: Relaxation,
    stopping: Stopping,
    x0: &Vector,
) -> Result<AamrResult> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::invalid("beta", "must lie in (0, 1)"));
    }
    let params = IterationParams {
        beta,
        gamma: 2.0 * (1.0 - beta),
        lambda,
        stopping,
    };
    aamr_solve(a, b, &params, q, x0)
}

/// One relaxed Douglas-Rachford step `(1 - lambda) x + lambda R_{gamma B} R_{gamma A} x`.
pub fn dr_step(
    a: &MonotoneOperator,
    b: &MonotoneOperator,
    gamma: f64,
    lambda: f64,
    x: &Vector,
) -> Result<Vector> {
    let y = reflected_step(a, 1.0, gamma, x)?;
    let t = reflected_step(b, 1.0, gamma, &y)?;
    x.lincomb(1.0 - lambda, &t, lambda)
}

/// Douglas-Rachford for a zero of `A + B` (which must exist).
///
/// The shadow of `x_n` is `J_{gamma A}(x_n)`; at convergence it lies in
/// `zer(A + B)`.
pub fn dr_solve(
    a: &MonotoneOperator,
    b: &MonotoneOperator,
    gamma: f64,
    lambda: &Relaxation,
    stopping: &Stopping,
    x0: &Vector,
) -> Result<AamrResult> {
    validate_gamma(gamma)?;
    let dim = check_pair(a, b)?;
    x0.check_dim(dim)?;
    let out = iterate::run(
        x0.clone(),
        stopping,
        |n, x| dr_step(a, b, gamma, lambda.at(n)?, x),
        |x| a.resolvent(gamma, x),
    )?;
    Ok(AamrResult::from_outcome(out))
}

/// Projection of `q` onto `C1 ∩ C2` by AAMR on the normal cones with
/// `gamma = 1`, started from the origin.
///
/// Requires `C1 ∩ C2` nonempty and
/// `q - P_{C1∩C2}(q) in (N_C1 + N_C2)(P_{C1∩C2}(q))`; both are the caller's
/// obligation (any Slater point suffices).
pub fn best_approx_pair(
    c1: &ConvexSet,
    c2: &ConvexSet,
    q: &Vector,
    beta: f64,
    lambda: Relaxation,
    stopping: Stopping,
) -> Result<AamrResult> {
    check_dim(c1.dim(), c2.dim())?;
    let a = MonotoneOperator::normal_cone(c1.clone());
    let b = MonotoneOperator::normal_cone(c2.clone());
    let params = IterationParams {
        beta,
        gamma: 1.0,
        lambda,
        stopping,
    };
    aamr_solve(&a, &b, &params, q, &Vector::zeros(q.dim())?)
}

/// The unique zero of `A^(beta) + B^(beta)`, computed as
/// `beta J_{(A+B) / (2 (1 - beta))}(0)` through AAMR at `q = 0`, `gamma = 1`.
///
/// Requires `0 in ran(Id + (A + B) / (2 (1 - beta)))`.
pub fn zeros_of_strengthened_sum_check(
    a: &MonotoneOperator,
    b: &MonotoneOperator,
    beta: f64,
    lambda: Relaxation,
    stopping: Stopping,
) -> Result<Vector> {
    let dim = check_pair(a, b)?;
    let params = IterationParams {
        beta,
        gamma: 1.0,
        lambda,
        stopping,
    };
    let zero = Vector::zeros(dim)?;
    let res = aamr_solve(a, b, &params, &zero, &zero)?;
    Ok(res.shadow_limit.scale(beta))
}
