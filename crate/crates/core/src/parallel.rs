//! Resolvents of finite sums `J_{sum_i A_i}(q)` by product-space splitting.
//!
//! The iterate is a [`Block`] `(x_1, ..., x_r)` in `H^r`. Both variants share
//! the diagonal average `p_n = (1/r) sum_i x_{i,n}` and differ in the inner
//! reflection and in how the shadow is read off:
//!
//! | variant       | block update argument | shadow            | limit scale                 |
//! |---------------|-----------------------|-------------------|-----------------------------|
//! | `Original`    | `2 beta p_n - x_i`    | `q + p_n`         | `gamma / (2 r (1 - beta))`  |
//! | `Alternative` | `2 p_n - x_i`         | `q + p_n / beta`  | `gamma / (r (1 - beta))`    |
//!
//! where each block then goes through `2 beta J_{gamma (A_i)_{-q}} - Id` and
//! is relaxed by `lambda_n`. The average is always reduced serially in
//! ascending block order, so threaded and serial runs are bit-identical.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::iterate::{self, Iterate};
use crate::operator::{MonotoneOperator, Resolvent};
use crate::oracle;
use crate::params::{IterationParams, Relaxation, Stopping};
use crate::trace::RunTrace;
use crate::vector::Vector;

/// A point `(x_1, ..., x_r)` of the product space `H^r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    blocks: Vec<Vector>,
}

impl Block {
    pub fn new(blocks: Vec<Vector>) -> Result<Self> {
        let first = blocks.first().ok_or(Error::EmptyBlock)?;
        let dim = first.dim();
        for b in &blocks {
            check_dim(dim, b.dim())?;
        }
        Ok(Block { blocks })
    }

    pub fn zeros(r: usize, dim: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::EmptyBlock);
        }
        let z = Vector::zeros(dim)?;
        Ok(Block {
            blocks: (0..r).map(|_| z.clone()).collect(),
        })
    }

    /// The diagonal embedding `j(v) = (v, ..., v)`.
    pub fn diagonal(v: &Vector, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::EmptyBlock);
        }
        Ok(Block {
            blocks: (0..r).map(|_| v.clone()).collect(),
        })
    }

    pub fn r(&self) -> usize {
        self.blocks.len()
    }

    pub fn dim(&self) -> usize {
        self.blocks[0].dim()
    }

    pub fn components(&self) -> &[Vector] {
        &self.blocks
    }

    pub fn into_components(self) -> Vec<Vector> {
        self.blocks
    }

    /// Concatenates the components into one vector of `H^{r d}`.
    pub fn flatten(&self) -> Vector {
        Vector::from_raw(
            self.blocks
                .iter()
                .flat_map(|b| b.as_slice().iter().copied())
                .collect(),
        )
    }

    pub fn unflatten(v: &Vector, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::EmptyBlock);
        }
        if !v.dim().is_multiple_of(r) {
            return Err(Error::DimensionMismatch {
                expected: r * (v.dim() / r + 1),
                found: v.dim(),
            });
        }
        let d = v.dim() / r;
        Block::new(
            v.as_slice()
                .chunks(d)
                .map(|c| Vector::from_raw(c.to_vec()))
                .collect(),
        )
    }
}

impl Iterate for Block {
    fn all_finite(&self) -> bool {
        self.blocks.iter().all(Vector::is_finite)
    }

    fn step_distance(&self, next: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&next.blocks)
            .map(|(a, b)| a.distance_unchecked(b))
            .fold(0.0, f64::max)
    }
}

/// `P_D(x) = (1/r) sum_i x_i`, summed in ascending block order.
pub fn diagonal_project(x: &Block) -> Vector {
    let r = x.r();
    let mut sum = x.blocks[0].as_slice().to_vec();
    for b in &x.blocks[1..] {
        for (s, c) in sum.iter_mut().zip(b.as_slice()) {
            *s += c;
        }
    }
    let inv = 1.0 / r as f64;
    Vector::from_raw(sum.into_iter().map(|s| s * inv).collect())
}

fn check_ops(ops: &[MonotoneOperator]) -> Result<usize> {
    let first = ops.first().ok_or(Error::EmptyBlock)?;
    let dim = first.dim();
    for op in ops {
        check_dim(dim, op.dim())?;
    }
    Ok(dim)
}

fn check_block(ops: &[MonotoneOperator], x: &Block) -> Result<usize> {
    let dim = check_ops(ops)?;
    check_dim(ops.len(), x.r())?;
    check_dim(dim, x.dim())?;
    Ok(dim)
}

/// `J_{gamma A_1}(x_1) x ... x J_{gamma A_r}(x_r)`.
pub fn product_resolvent(ops: &[MonotoneOperator], gamma: f64, x: &Block) -> Result<Block> {
    check_block(ops, x)?;
    Ok(Block {
        blocks: crate::operator::resolvents_each(ops, gamma, &x.blocks)?,
    })
}

struct ProductOperator {
    ops: Vec<MonotoneOperator>,
    dim: usize,
}

impl Resolvent for ProductOperator {
    fn dim(&self) -> usize {
        self.dim * self.ops.len()
    }

    fn resolvent(&self, gamma: f64, x: &Vector) -> Result<Vector> {
        let blocks = Block::unflatten(x, self.ops.len())?;
        Ok(product_resolvent(&self.ops, gamma, &blocks)?.flatten())
    }

    fn descriptor(&self) -> String {
        format!("product of {} operators on R^{}", self.ops.len(), self.dim)
    }
}

struct DiagonalCone {
    r: usize,
    dim: usize,
}

impl Resolvent for DiagonalCone {
    fn dim(&self) -> usize {
        self.r * self.dim
    }

    fn resolvent(&self, _gamma: f64, x: &Vector) -> Result<Vector> {
        let blocks = Block::unflatten(x, self.r)?;
        Ok(Block::diagonal(&diagonal_project(&blocks), self.r)?.flatten())
    }

    fn descriptor(&self) -> String {
        format!("N_D(r={}, dim={})", self.r, self.dim)
    }
}

/// The block operator `A_1 x ... x A_r` acting on flattened vectors of
/// `H^r`.
pub fn product_operator(ops: &[MonotoneOperator]) -> Result<MonotoneOperator> {
    let dim = check_ops(ops)?;
    Ok(MonotoneOperator::new(ProductOperator {
        ops: ops.to_vec(),
        dim,
    }))
}

/// The normal cone to the diagonal of `H^r` (flattened); its resolvent is
/// `P_D` for every scale.
pub fn diagonal_normal_cone(r: usize, dim: usize) -> Result<MonotoneOperator> {
    if r == 0 {
        return Err(Error::EmptyBlock);
    }
    if dim == 0 {
        return Err(Error::EmptyVector);
    }
    Ok(MonotoneOperator::new(DiagonalCone { r, dim }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Original,
    Alternative,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Original, Variant::Alternative];

    /// The `gamma` for which the claimed limit is exactly `J_{sum A_i}(q)`:
    /// `2 r (1 - beta)` for the original scheme, `r (1 - beta)` for the
    /// alternative.
    pub fn default_gamma(self, r: usize, beta: f64) -> f64 {
        let r = r as f64;
        match self {
            Variant::Original => 2.0 * r * (1.0 - beta),
            Variant::Alternative => r * (1.0 - beta),
        }
    }

    /// `c` such that the shadows converge to `J_{c sum A_i}(q)`.
    pub fn limit_scale(self, r: usize, beta: f64, gamma: f64) -> f64 {
        let r = r as f64;
        match self {
            Variant::Original => gamma / (2.0 * r * (1.0 - beta)),
            Variant::Alternative => gamma / (r * (1.0 - beta)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Original => "Original",
            Variant::Alternative => "Alternative",
        }
    }

    fn reflection_weight(self, beta: f64) -> f64 {
        match self {
            Variant::Original => 2.0 * beta,
            Variant::Alternative => 2.0,
        }
    }

    fn shadow(self, beta: f64, q: &Vector, p: &Vector) -> Vector {
        match self {
            Variant::Original => q + p,
            Variant::Alternative => q + &p.scale(1.0 / beta),
        }
    }
}

/// How the `r` independent block updates of one iteration are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dispatch {
    #[default]
    Serial,
    /// Spread the block updates over up to this many scoped threads.
    #[cfg(feature = "std")]
    Threads(usize),
}

#[derive(Debug, Clone)]
pub struct ParallelResult {
    pub shadow_limit: Vector,
    pub block_limit: Block,
    pub trace: RunTrace<Block>,
    /// `||(q + mean(block_limit) [/ beta]) - shadow_limit||`: the limit
    /// decomposition through the final governing block.
    pub limit_identity_gap: f64,
}

impl ParallelResult {
    pub fn converged(&self) -> bool {
        self.trace.converged
    }
}

#[allow(clippy::too_many_arguments)]
fn update_block(
    op: &MonotoneOperator,
    weight: f64,
    beta: f64,
    gamma: f64,
    lambda: f64,
    q: &Vector,
    p: &Vector,
    x: &Vector,
) -> Result<Vector> {
    let u = p.lincomb(weight, x, -1.0)?;
    let j = &op.resolvent(gamma, &(&u + q))? - q;
    let t = j.lincomb(2.0 * beta, &u, -1.0)?;
    x.lincomb(1.0 - lambda, &t, lambda)
}

#[allow(clippy::too_many_arguments)]
fn step_blocks(
    variant: Variant,
    ops: &[MonotoneOperator],
    beta: f64,
    gamma: f64,
    lambda: f64,
    q: &Vector,
    x: &Block,
    dispatch: Dispatch,
) -> Result<Block> {
    let p = diagonal_project(x);
    let weight = variant.reflection_weight(beta);
    let one = |i: usize| update_block(&ops[i], weight, beta, gamma, lambda, q, &p, &x.blocks[i]);
    let blocks = match dispatch {
        Dispatch::Serial => (0..ops.len()).map(one).collect::<Result<Vec<_>>>()?,
        #[cfg(feature = "std")]
        Dispatch::Threads(k) => threaded_map(ops.len(), k, &one)?,
    };
    Ok(Block { blocks })
}

#[cfg(feature = "std")]
fn threaded_map(
    r: usize,
    threads: usize,
    one: &(dyn Fn(usize) -> Result<Vector> + Sync),
) -> Result<Vec<Vector>> {
    let threads = threads.clamp(1, r);
    if threads == 1 {
        return (0..r).map(one).collect();
    }
    let chunk = r.div_ceil(threads);
    let parts: Vec<Result<Vec<Vector>>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..r)
            .step_by(chunk)
            .map(|start| {
                let end = (start + chunk).min(r);
                s.spawn(move || (start..end).map(one).collect::<Result<Vec<_>>>())
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("block worker panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(r);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

/// One iteration `x_n -> x_{n+1}` of the chosen parallel scheme.
pub fn parallel_step(
    variant: Variant,
    ops: &[MonotoneOperator],
    params: &IterationParams,
    q: &Vector,
    x: &Block,
    n: usize,
) -> Result<Block> {
    params.validate()?;
    let dim = check_block(ops, x)?;
    q.check_dim(dim)?;
    let lambda = params.lambda.at(n)?;
    step_blocks(
        variant,
        ops,
        params.beta,
        params.gamma,
        lambda,
        q,
        x,
        Dispatch::Serial,
    )
}

/// Runs the chosen parallel scheme from `x0`.
///
/// Requires `q in ran(Id + c sum A_i)` with `c = variant.limit_scale(..)`.
/// The stopping residual is the largest per-block step; `TrueError` is
/// measured on the shadow.
pub fn parallel_solve_with(
    variant: Variant,
    ops: &[MonotoneOperator],
    params: &IterationParams,
    q: &Vector,
    x0: &Block,
    dispatch: Dispatch,
) -> Result<ParallelResult> {
    params.validate()?;
    let dim = check_block(ops, x0)?;
    q.check_dim(dim)?;
    if let Some(r) = params.stopping.reference() {
        r.check_dim(dim)?;
    }
    let (beta, gamma) = (params.beta, params.gamma);
    let out = iterate::run(
        x0.clone(),
        &params.stopping,
        |n, x| step_blocks(variant, ops, beta, gamma, params.lambda.at(n)?, q, x, dispatch),
        |x| Ok(variant.shadow(beta, q, &diagonal_project(x))),
    )?;
    let reconstructed = variant.shadow(beta, q, &diagonal_project(&out.governing));
    let limit_identity_gap = reconstructed.distance_unchecked(&out.shadow);
    Ok(ParallelResult {
        shadow_limit: out.shadow,
        block_limit: out.governing,
        trace: out.trace,
        limit_identity_gap,
    })
}

/// The original parallel AAMR scheme; shadows `q + p_n` converge to
/// `J_{gamma / (2 r (1 - beta)) sum A_i}(q)`.
pub fn parallel_aamr_solve(
    ops: &[MonotoneOperator],
    params: &IterationParams,
    q: &Vector,
    x0: &Block,
) -> Result<ParallelResult> {
    parallel_solve_with(Variant::Original, ops, params, q, x0, Dispatch::Serial)
}

/// The alternative scheme; shadows `q + p_n / beta` converge to
/// `J_{gamma / (r (1 - beta)) sum A_i}(q)`.
pub fn parallel_aamr_alt_solve(
    ops: &[MonotoneOperator],
    params: &IterationParams,
    q: &Vector,
    x0: &Block,
) -> Result<ParallelResult> {
    parallel_solve_with(Variant::Alternative, ops, params, q, x0, Dispatch::Serial)
}

/// `J_{sum A_i}(q)` with the variant's default `gamma`.
pub fn parallel_resolvent_of_sum(
    variant: Variant,
    ops: &[MonotoneOperator],
    q: &Vector,
    beta: f64,
    lambda: Relaxation,
    stopping: Stopping,
    x0: &Block,
) -> Result<ParallelResult> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::invalid("beta", "must lie in (0, 1)"));
    }
    let params = IterationParams {
        beta,
        gamma: variant.default_gamma(ops.len(), beta),
        lambda,
        stopping,
    };
    parallel_solve_with(variant, ops, &params, q, x0, Dispatch::Serial)
}

/// `J_{(1/r) sum A_i}(q)` computed two independent ways.
#[derive(Debug, Clone)]
pub struct DiagonalCheck {
    /// Original parallel scheme at `gamma = 2 (1 - beta)`.
    pub via_parallel: Vector,
    /// Reference resolvent of `B + N_D` at `j(q)` in the product space,
    /// read back from the diagonal.
    pub via_product_space: Vector,
}

/// Cross-checks the diagonal resolvent identity `J_{B + N_D}(j(q)) =
/// j(J_{(1/r) sum A_i}(q))`. Requires `q in ran(Id + (1/r) sum A_i)`.
pub fn diagonal_sum_resolvent_check(
    ops: &[MonotoneOperator],
    q: &Vector,
    beta: f64,
    stopping: Stopping,
) -> Result<DiagonalCheck> {
    let dim = check_ops(ops)?;
    q.check_dim(dim)?;
    let r = ops.len();
    let params = IterationParams {
        beta,
        gamma: 2.0 * (1.0 - beta),
        lambda: Relaxation::default(),
        stopping: stopping.clone(),
    };
    let parallel = parallel_aamr_solve(ops, &params, q, &Block::zeros(r, dim)?)?;

    let product = product_operator(ops)?;
    let cone = diagonal_normal_cone(r, dim)?;
    let jq = Block::diagonal(q, r)?.flatten();
    let reference =
        oracle::reference_resolvent_of_sum(&product, &cone, &jq, oracle::REFERENCE_TOL, stopping.max_iter)?;
    let on_diagonal = diagonal_project(&Block::unflatten(&reference.point, r)?);
    Ok(DiagonalCheck {
        via_parallel: parallel.shadow_limit,
        via_product_space: on_diagonal,
    })
}

/// The unique zero of `sum_i A_i^(beta)`, computed as
/// `beta J_{(1 / (r (1 - beta))) sum A_i}(0)` by the alternative scheme at
/// `gamma = 1`, `q = 0`. Requires `0 in ran(Id + (1/(r(1-beta))) sum A_i)`.
pub fn zeros_of_strengthened_sum_parallel(
    ops: &[MonotoneOperator],
    beta: f64,
    lambda: Relaxation,
    stopping: Stopping,
) -> Result<Vector> {
    let dim = check_ops(ops)?;
    let params = IterationParams {
        beta,
        gamma: 1.0,
        lambda,
        stopping,
    };
    let zero = Vector::zeros(dim)?;
    let res = parallel_aamr_alt_solve(ops, &params, &zero, &Block::zeros(ops.len(), dim)?)?;
    Ok(res.shadow_limit.scale(beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splitting::{aamr_map, dr_step};
    use alloc::vec;

    fn v(c: &[f64]) -> Vector {
        Vector::from_slice(c).unwrap()
    }

    fn blk(parts: &[&[f64]]) -> Block {
        Block::new(parts.iter().map(|p| v(p)).collect()).unwrap()
    }

    fn unit_ball() -> MonotoneOperator {
        MonotoneOperator::ball_normal_cone(v(&[0.0, 0.0]), 1.0).unwrap()
    }

    fn tight() -> Stopping {
        Stopping::default().with_tol(1e-12).with_max_iter(200_000)
    }

    #[test]
    fn block_validation() {
        assert_eq!(Block::new(vec![]), Err(Error::EmptyBlock));
        assert!(Block::new(vec![v(&[1.0]), v(&[1.0, 2.0])]).is_err());
        assert!(Block::zeros(0, 2).is_err());
        let b = blk(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]);
        assert_eq!(Block::unflatten(&b.flatten(), 3).unwrap(), b);
        assert!(Block::unflatten(&b.flatten(), 4).is_err());
    }

    #[test]
    fn diagonal_project_examples() {
        assert_eq!(
            diagonal_project(&blk(&[&[1.0, 0.0], &[3.0, 0.0]])),
            v(&[2.0, 0.0])
        );
        let w = v(&[0.1, -7.3]);
        let mean = diagonal_project(&Block::diagonal(&w, 3).unwrap());
        assert!(mean.distance(&w).unwrap() < 1e-15);
        let w2 = diagonal_project(&Block::diagonal(&w, 2).unwrap());
        assert_eq!(w2, w);
        assert_eq!(
            diagonal_project(&blk(&[&[1.0, 1.0], &[-1.0, -1.0]])),
            v(&[0.0, 0.0])
        );
    }

    #[test]
    fn product_resolvent_examples() {
        let c = unit_ball();
        let x = blk(&[&[3.0, 0.0]]);
        assert_eq!(
            product_resolvent(core::slice::from_ref(&c), 1.0, &x)
                .unwrap()
                .components()[0],
            c.apply(&v(&[3.0, 0.0])).unwrap()
        );
        let id = MonotoneOperator::identity(2).unwrap();
        let out = product_resolvent(&[id.clone(), id], 1.0, &blk(&[&[2.0, 0.0], &[4.0, 0.0]])).unwrap();
        assert_eq!(out, blk(&[&[1.0, 0.0], &[2.0, 0.0]]));
        let zero = MonotoneOperator::zero(2).unwrap();
        let out = product_resolvent(&[c, zero], 1.0, &blk(&[&[3.0, 0.0], &[3.0, 0.0]])).unwrap();
        assert_eq!(out, blk(&[&[1.0, 0.0], &[3.0, 0.0]]));
    }

    #[test]
    fn original_scheme_on_identical_cones() {
        let c = unit_ball();
        let ops = [c.clone(), c];
        let q = v(&[3.0, 0.0]);
        let beta = 0.7;
        let params =
            IterationParams::new(beta, Variant::Original.default_gamma(2, beta)).with_stopping(tight());
        let res = parallel_aamr_solve(&ops, &params, &q, &Block::zeros(2, 2).unwrap()).unwrap();
        assert!(res.converged());
        assert!(res.shadow_limit.distance(&v(&[1.0, 0.0])).unwrap() < 1e-9);
        assert!(res.limit_identity_gap < 1e-9);
    }

    #[test]
    fn single_operator_reduces_to_its_resolvent() {
        let a = MonotoneOperator::quadratic(v(&[1.0, -2.0]));
        let q = v(&[4.0, 4.0]);
        let beta = 0.6;
        let res = parallel_resolvent_of_sum(
            Variant::Original,
            core::slice::from_ref(&a),
            &q,
            beta,
            Relaxation::default(),
            tight(),
            &Block::zeros(1, 2).unwrap(),
        )
        .unwrap();
        assert!(res.shadow_limit.distance(&a.apply(&q).unwrap()).unwrap() < 1e-9);
    }

    #[test]
    fn zero_operators_keep_shadow_at_q() {
        // With J = Id the average evolves as p' = ((1 - l) + l (2b - 1)^2) p, so
        // b = 1/2, l = 1 lands on the diagonal fixed point after one step.
        let zero = MonotoneOperator::zero(2).unwrap();
        let ops = [zero.clone(), zero.clone(), zero];
        let q = v(&[1.5, -2.0]);
        let beta = 0.5;
        let params = IterationParams::new(beta, Variant::Original.default_gamma(3, beta))
            .with_lambda(Relaxation::Constant(1.0))
            .with_stopping(Stopping::default().with_max_iter(5).with_tol(1e-300));
        let x0 = blk(&[&[1.0, 2.0], &[-3.0, 0.5], &[0.0, 4.0]]);
        let res = parallel_aamr_solve(&ops, &params, &q, &x0).unwrap();
        for rec in res.trace.iterates.iter().skip(1) {
            assert!(rec.shadow.distance(&q).unwrap() < 1e-12);
        }

        let general = IterationParams::new(0.8, Variant::Original.default_gamma(3, 0.8))
            .with_stopping(Stopping::default().with_tol(1e-13));
        let res = parallel_aamr_solve(&ops, &general, &q, &x0).unwrap();
        assert!(res.shadow_limit.distance(&q).unwrap() < 1e-10);
    }

    #[test]
    fn alternative_scheme_examples() {
        let c = unit_ball();
        let q = v(&[3.0, 0.0]);
        let beta = 0.85;
        let x0 = Block::zeros(2, 2).unwrap();
        let res = parallel_resolvent_of_sum(
            Variant::Alternative,
            &[c.clone(), c],
            &q,
            beta,
            Relaxation::default(),
            tight(),
            &x0,
        )
        .unwrap();
        assert!(res.shadow_limit.distance(&v(&[1.0, 0.0])).unwrap() < 1e-9);

        let id = MonotoneOperator::identity(2).unwrap();
        let res = parallel_resolvent_of_sum(
            Variant::Alternative,
            &[id.clone(), id],
            &q,
            beta,
            Relaxation::default(),
            tight(),
            &x0,
        )
        .unwrap();
        assert!(res.shadow_limit.distance(&v(&[1.0, 0.0])).unwrap() < 1e-9);
        assert!(res.limit_identity_gap < 1e-9);
    }

    #[test]
    fn original_step_is_aamr_in_product_space() {
        let ops = [
            MonotoneOperator::ball_normal_cone(v(&[1.0, 0.0]), 2.0).unwrap(),
            MonotoneOperator::l1(0.5, 2).unwrap(),
            MonotoneOperator::quadratic(v(&[-1.0, 3.0])),
        ];
        let (beta, gamma, lambda) = (0.7, 1.3, 0.9);
        let q = v(&[0.5, -0.25]);
        let x = blk(&[&[3.0, -1.0], &[0.25, 2.0], &[-4.0, 1.5]]);
        let params = IterationParams::new(beta, gamma).with_lambda(Relaxation::Constant(lambda));
        let direct = parallel_step(Variant::Original, &ops, &params, &q, &x, 0).unwrap();

        let cone = diagonal_normal_cone(3, 2).unwrap();
        let product = product_operator(&ops).unwrap();
        let jq = Block::diagonal(&q, 3).unwrap().flatten();
        let lifted = aamr_map(&cone, &product, beta, gamma, lambda, &jq, &x.flatten()).unwrap();
        assert!(direct.flatten().distance(&lifted).unwrap() < 1e-12);
    }

    #[test]
    fn alternative_step_is_dr_on_strengthened_product() {
        let ops = [
            MonotoneOperator::ball_normal_cone(v(&[1.0, 0.0]), 2.0).unwrap(),
            MonotoneOperator::quadratic(v(&[-1.0, 3.0])),
        ];
        let (beta, gamma, lambda) = (0.6, 0.8, 0.9);
        let q = v(&[0.5, -0.25]);
        let x = blk(&[&[3.0, -1.0], &[0.25, 2.0]]);
        let params = IterationParams::new(beta, gamma).with_lambda(Relaxation::Constant(lambda));
        let direct = parallel_step(Variant::Alternative, &ops, &params, &q, &x, 0).unwrap();

        let cone = diagonal_normal_cone(2, 2).unwrap();
        let jq = Block::diagonal(&q, 2).unwrap().flatten();
        let strengthened = product_operator(&ops)
            .unwrap()
            .scaled(gamma)
            .unwrap()
            .perturbed(jq.scale(-1.0))
            .unwrap()
            .strengthened(beta)
            .unwrap();
        let lifted = dr_step(&cone, &strengthened, 1.0, lambda, &x.flatten()).unwrap();
        assert!(direct.flatten().distance(&lifted).unwrap() < 1e-12);
    }

    #[cfg(feature = "std")]
    #[test]
    fn threaded_dispatch_is_bit_identical() {
        let ops: Vec<_> = (0..5)
            .map(|i| MonotoneOperator::ball_normal_cone(v(&[i as f64 * 0.3, 1.0]), 2.0).unwrap())
            .collect();
        let params = IterationParams::new(0.8, Variant::Original.default_gamma(5, 0.8))
            .with_stopping(Stopping::default().with_max_iter(300));
        let q = v(&[0.0, 0.0]);
        let x0 = Block::new((0..5).map(|i| v(&[i as f64, -(i as f64)])).collect()).unwrap();
        let serial =
            parallel_solve_with(Variant::Original, &ops, &params, &q, &x0, Dispatch::Serial).unwrap();
        for k in [2, 3, 8] {
            let threaded =
                parallel_solve_with(Variant::Original, &ops, &params, &q, &x0, Dispatch::Threads(k)).unwrap();
            assert_eq!(serial.trace, threaded.trace);
        }
    }

    #[test]
    fn diagonal_check_examples() {
        let id = MonotoneOperator::identity(2).unwrap();
        let q = v(&[3.0, 0.0]);
        // (1/2)(Id + Id) = Id, so the resolvent is q / 2
        let chk = diagonal_sum_resolvent_check(&[id.clone(), id], &q, 0.5, tight()).unwrap();
        assert!(chk.via_parallel.distance(&v(&[1.5, 0.0])).unwrap() < 1e-9);
        assert!(chk.via_product_space.distance(&v(&[1.5, 0.0])).unwrap() < 1e-9);

        let zero = MonotoneOperator::zero(2).unwrap();
        let chk = diagonal_sum_resolvent_check(&[zero.clone(), zero.clone()], &q, 0.5, tight()).unwrap();
        assert!(chk.via_parallel.distance(&q).unwrap() < 1e-9);

        // (1/2)(N_C + 0): the resolvent is P_C
        let chk = diagonal_sum_resolvent_check(&[unit_ball(), zero], &q, 0.5, tight()).unwrap();
        assert!(chk.via_parallel.distance(&chk.via_product_space).unwrap() < 1e-8);
        assert!(chk.via_parallel.distance(&v(&[1.0, 0.0])).unwrap() < 1e-8);
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let id = MonotoneOperator::identity(2).unwrap();
        let params = IterationParams::default();
        let q = v(&[0.0, 0.0]);
        assert!(parallel_aamr_solve(&[], &params, &q, &Block::zeros(1, 2).unwrap()).is_err());
        assert!(parallel_aamr_solve(
            core::slice::from_ref(&id),
            &params,
            &q,
            &Block::zeros(2, 2).unwrap()
        )
        .is_err());
        assert!(parallel_aamr_solve(&[id], &params, &v(&[0.0]), &Block::zeros(1, 2).unwrap()).is_err());
    }
}
