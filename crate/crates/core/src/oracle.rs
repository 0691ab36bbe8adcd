//! Reference solvers used to verify the splitting engines.
//!
//! Nothing here calls into [`crate::splitting`] or [`crate::parallel`]; the
//! iterations are written out locally so a bug in the engines cannot leak
//! into their own ground truth.

use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::operator::MonotoneOperator;
use crate::sets::ConvexSet;
use crate::vector::Vector;

/// Default convergence tolerance of the reference solvers.
pub const REFERENCE_TOL: f64 = 1e-12;
/// Solutions whose residual exceeds this are rejected.
pub const REJECTION_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceMethod {
    Dykstra,
    ReferenceDr,
    Analytic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub point: Vector,
    pub method: ReferenceMethod,
    pub residual: f64,
    pub iterations: usize,
}

impl ReferenceSolution {
    /// Wraps a closed-form solution.
    pub fn analytic(point: Vector) -> Self {
        ReferenceSolution {
            point,
            method: ReferenceMethod::Analytic,
            residual: 0.0,
            iterations: 0,
        }
    }

    fn accept(self) -> Result<Self> {
        if self.residual < REJECTION_THRESHOLD {
            Ok(self)
        } else {
            Err(Error::OracleRejected {
                residual: self.residual,
                threshold: REJECTION_THRESHOLD,
            })
        }
    }
}

/// Cyclic Dykstra projection of `q` onto the intersection of `sets`, which
/// must be nonempty.
///
/// Stops once a full pass moves neither the point nor any correction term by
/// more than `tol`. The residual is the larger of that pass change and the
/// worst distance from the point to a set.
pub fn dykstra_project(
    sets: &[ConvexSet],
    q: &Vector,
    tol: f64,
    max_iter: usize,
) -> Result<ReferenceSolution> {
    if sets.is_empty() {
        return Err(Error::invalid("sets", "need at least one set"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid("tol", "must be positive"));
    }
    for s in sets {
        check_dim(s.dim(), q.dim())?;
    }
    let mut x = q.clone();
    let mut corrections: Vec<Vector> = sets
        .iter()
        .map(|_| Vector::zeros(q.dim()))
        .collect::<Result<_>>()?;

    for pass in 1..=max_iter {
        let start = x.clone();
        let mut change: f64 = 0.0;
        for (set, y) in sets.iter().zip(corrections.iter_mut()) {
            let shifted = &x + y;
            let z = set.project(&shifted)?;
            let new_y = &shifted - &z;
            change = change.max(new_y.distance_unchecked(y));
            *y = new_y;
            x = z;
        }
        if !x.is_finite() {
            return Err(Error::NumericalBreakdown { iteration: pass });
        }
        change = change.max(x.distance_unchecked(&start));
        if change < tol {
            let infeasibility = sets
                .iter()
                .map(|s| s.distance(&x))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            return ReferenceSolution {
                point: x,
                method: ReferenceMethod::Dykstra,
                residual: change.max(infeasibility),
                iterations: pass,
            }
            .accept();
        }
    }
    Err(Error::MaxIterExceeded { iterations: max_iter })
}

/// `J_{A+B}(q)` by plain Douglas-Rachford (`gamma = 1`, `lambda = 1/2`) on
/// the translated pair `A + (Id - q)/2`, `B + (Id - q)/2`, whose unique zero
/// is `J_{A+B}(q)`.
///
/// Each translated resolvent reduces to one of the original operator:
/// `J_{A + (Id - q)/2}(x) = J_{(2/3) A}((2x + q)/3)`. Both translated
/// operators are strongly monotone, so the shadows converge linearly.
/// Requires `q in ran(Id + A + B)`.
pub fn reference_resolvent_of_sum(
    a: &MonotoneOperator,
    b: &MonotoneOperator,
    q: &Vector,
    tol: f64,
    max_iter: usize,
) -> Result<ReferenceSolution> {
    check_dim(a.dim(), b.dim())?;
    check_dim(a.dim(), q.dim())?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid("tol", "must be positive"));
    }
    let translated = |op: &MonotoneOperator, x: &Vector| -> Result<Vector> {
        let arg = x.lincomb(2.0 / 3.0, q, 1.0 / 3.0)?;
        op.resolvent(2.0 / 3.0, &arg)
    };
    let mut x = q.clone();
    for n in 1..=max_iter {
        let pa = translated(a, &x)?;
        let reflected = pa.lincomb(2.0, &x, -1.0)?;
        let pb = translated(b, &reflected)?;
        // x + (1/2)(R_B R_A x - x) = x + (pb - pa)
        let gap = &pb - &pa;
        let next = &x + &gap;
        if !next.is_finite() {
            return Err(Error::NumericalBreakdown { iteration: n });
        }
        let residual = gap.norm();
        x = next;
        if residual < tol {
            let point = translated(a, &x)?;
            let check = translated(b, &point.lincomb(2.0, &x, -1.0)?)?;
            return ReferenceSolution {
                residual: check.distance_unchecked(&point),
                point,
                method: ReferenceMethod::ReferenceDr,
                iterations: n,
            }
            .accept();
        }
    }
    Err(Error::MaxIterExceeded { iterations: max_iter })
}
