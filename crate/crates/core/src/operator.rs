//! Maximally monotone operators represented by their resolvents.
//!
//! An operator `A` is never materialized as a graph. Everything downstream
//! touches it through `J_{gamma A}(x) = (Id + gamma A)^{-1}(x)`, which is
//! single-valued, defined everywhere and firmly nonexpansive whenever `A` is
//! maximally monotone. Implementors of [`Resolvent`] take on that contract;
//! the crate checks it only statistically (see the property tests).

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{check_dim, Error, Result};
use crate::sets::{AffineSubspace, Ball, ConvexSet};
use crate::vector::Vector;

/// The resolvent map of a maximally monotone operator.
///
/// `resolvent` must be deterministic and is only called with `gamma > 0`
/// finite and `x.dim() == self.dim()`.
pub trait Resolvent: Send + Sync {
    fn dim(&self) -> usize;

    fn resolvent(&self, gamma: f64, x: &Vector) -> Result<Vector>;

    fn descriptor(&self) -> String;
}

/// A shared handle to a maximally monotone operator.
///
/// Cloning is cheap. The handle carries a positive scale factor so that
/// [`MonotoneOperator::scaled`] composes multiplicatively without nesting.
#[derive(Clone)]
pub struct MonotoneOperator {
    inner: Arc<dyn Resolvent>,
    scale: f64,
}

impl fmt::Debug for MonotoneOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("gamma", "must be positive and finite"))
    }
}

impl MonotoneOperator {
    pub fn new(resolvent: impl Resolvent + 'static) -> Self {
        MonotoneOperator {
            inner: Arc::new(resolvent),
            scale: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn descriptor(&self) -> String {
        if self.scale == 1.0 {
            self.inner.descriptor()
        } else {
            format!("{} * {}", self.scale, self.inner.descriptor())
        }
    }

    /// Evaluates `J_{gamma A}(x)`.
    pub fn resolvent(&self, gamma: f64, x: &Vector) -> Result<Vector> {
        check_gamma(gamma)?;
        check_dim(self.dim(), x.dim())?;
        self.inner.resolvent(gamma * self.scale, x)
    }

    /// `J_A(x)`, the resolvent at unit scale.
    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        self.resolvent(1.0, x)
    }

    /// Normal cone `N_C` of a closed ball; its resolvent is the projector onto
    /// the ball for every `gamma`.
    pub fn ball_normal_cone(center: Vector, radius: f64) -> Result<Self> {
        Ok(Self::normal_cone(ConvexSet::Ball(Ball::new(center, radius)?)))
    }

    /// Normal cone of `offset + span(basis)`.
    pub fn affine_normal_cone(basis: &[Vector], offset: Vector) -> Result<Self> {
        Ok(Self::normal_cone(ConvexSet::Affine(AffineSubspace::new(
            basis, offset,
        )?)))
    }

    pub fn normal_cone(set: ConvexSet) -> Self {
        Self::new(NormalCone { set })
    }

    /// Subdifferential of `f = 0.5 ||. - center||^2`, i.e. `A(x) = x - center`.
    pub fn quadratic(center: Vector) -> Self {
        Self::new(Quadratic { center })
    }

    /// `A = Id` on `R^dim` (the quadratic with center zero).
    pub fn identity(dim: usize) -> Result<Self> {
        Ok(Self::quadratic(Vector::zeros(dim)?))
    }

    /// Subdifferential of `weight * ||.||_1` on `R^dim`.
    pub fn l1(weight: f64, dim: usize) -> Result<Self> {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::invalid("weight", "must be positive and finite"));
        }
        if dim == 0 {
            return Err(Error::EmptyVector);
        }
        Ok(Self::new(L1 { weight, dim }))
    }

    /// The zero operator; its resolvent is the identity.
    pub fn zero(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyVector);
        }
        Ok(Self::new(Zero { dim }))
    }

    /// The operator `factor * A`: `J_{gamma (factor A)} = J_{(gamma factor) A}`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::invalid(
                "gamma",
                "scale factor must be positive and finite",
            ));
        }
        Ok(MonotoneOperator {
            inner: Arc::clone(&self.inner),
            scale: self.scale * factor,
        })
    }

    /// Inner perturbation `A_w = A(. - w)`, whose resolvent is
    /// `J_{gamma A}(x - w) + w` at every scale `gamma`.
    pub fn perturbed(&self, w: Vector) -> Result<Self> {
        check_dim(self.dim(), w.dim())?;
        Ok(Self::new(Perturbed {
            base: self.clone(),
            shift: w,
        }))
    }

    /// The beta-strengthening `A^(beta) = (A + (1 - beta) Id)(. / beta)`.
    ///
    /// `J_{A^(beta)} = beta J_A`. The result is `(1 - beta)/beta`-strongly
    /// monotone whenever `A` is monotone.
    pub fn strengthened(&self, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::invalid("beta", "must lie in (0, 1)"));
        }
        Ok(Self::new(Strengthened {
            base: self.clone(),
            beta,
        }))
    }
}

/// `2 beta J_{gamma A}(x) - x`; with `beta = 1` this is the reflected
/// resolvent `R_{gamma A}`.
pub fn reflected_step(a: &MonotoneOperator, beta: f64, gamma: f64, x: &Vector) -> Result<Vector> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::invalid("beta", "must lie in (0, 1]"));
    }
    let j = a.resolvent(gamma, x)?;
    j.lincomb(2.0 * beta, x, -1.0)
}

struct NormalCone {
    set: ConvexSet,
}

impl Resolvent for NormalCone {
    fn dim(&self) -> usize {
        self.set.dim()
    }

    fn resolvent(&self, _gamma: f64, x: &Vector) -> Result<Vector> {
        self.set.project(x)
    }

    fn descriptor(&self) -> String {
        match &self.set {
            ConvexSet::Ball(b) => format!(
                "N_ball(center={:?}, radius={})",
                b.center().as_slice(),
                b.radius()
            ),
            ConvexSet::Affine(a) => format!("N_affine(dim={}, subspace_dim={})", a.dim(), a.subspace_dim()),
        }
    }
}

struct Quadratic {
    center: Vector,
}

impl Resolvent for Quadratic {
    fn dim(&self) -> usize {
        self.center.dim()
    }

    fn resolvent(&self, gamma: f64, x: &Vector) -> Result<Vector> {
        let denom = 1.0 + gamma;
        Ok(Vector::from_raw(
            x.as_slice()
                .iter()
                .zip(self.center.as_slice())
                .map(|(xi, ci)| (xi + gamma * ci) / denom)
                .collect(),
        ))
    }

    fn descriptor(&self) -> String {
        format!("grad 0.5||x - {:?}||^2", self.center.as_slice())
    }
}

struct L1 {
    weight: f64,
    dim: usize,
}

impl Resolvent for L1 {
    fn dim(&self) -> usize {
        self.dim
    }

    fn resolvent(&self, gamma: f64, x: &Vector) -> Result<Vector> {
        let t = gamma * self.weight;
        Ok(x.map(|c| {
            if c > t {
                c - t
            } else if c < -t {
                c + t
            } else {
                0.0
            }
        }))
    }

    fn descriptor(&self) -> String {
        format!("subdiff {}||x||_1", self.weight)
    }
}

struct Zero {
    dim: usize,
}

impl Resolvent for Zero {
    fn dim(&self) -> usize {
        self.dim
    }

    fn resolvent(&self, _gamma: f64, x: &Vector) -> Result<Vector> {
        Ok(x.clone())
    }

    fn descriptor(&self) -> String {
        format!("zero(dim={})", self.dim)
    }
}

struct Perturbed {
    base: MonotoneOperator,
    shift: Vector,
}

impl Resolvent for Perturbed {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn resolvent(&self, gamma: f64, x: &Vector) -> Result<Vector> {
        let inner = self.base.resolvent(gamma, &(x - &self.shift))?;
        Ok(&inner + &self.shift)
    }

    fn descriptor(&self) -> String {
        format!("({})_w[w={:?}]", self.base.descriptor(), self.shift.as_slice())
    }
}

struct Strengthened {
    base: MonotoneOperator,
    beta: f64,
}

impl Resolvent for Strengthened {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    // x in p + gamma A(p / beta) + gamma (1 - beta) p / beta. With u = p / beta
    // and s = beta + gamma (1 - beta): u = J_{(gamma / s) A}(x / s).
    fn resolvent(&self, gamma: f64, x: &Vector) -> Result<Vector> {
        if gamma == 1.0 {
            return Ok(self.base.resolvent(1.0, x)?.scale(self.beta));
        }
        let s = self.beta + gamma * (1.0 - self.beta);
        let u = self.base.resolvent(gamma / s, &x.scale(1.0 / s))?;
        Ok(u.scale(self.beta))
    }

    fn descriptor(&self) -> String {
        format!("({})^(beta={})", self.base.descriptor(), self.beta)
    }
}

/// Applies `J_{gamma A_i}` to each component of a list of points.
pub(crate) fn resolvents_each(ops: &[MonotoneOperator], gamma: f64, xs: &[Vector]) -> Result<Vec<Vector>> {
    ops.iter().zip(xs).map(|(op, x)| op.resolvent(gamma, x)).collect()
}
