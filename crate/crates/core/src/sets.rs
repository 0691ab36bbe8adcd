//! Closed convex sets with closed-form projectors.

use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::vector::Vector;

/// Relative threshold below which a Gram-Schmidt residual counts as zero.
const RANK_TOLERANCE: f64 = 1e-10;

/// A closed ball `{x : ||x - center|| <= radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: Vector,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("radius", "must be positive and finite"));
        }
        Ok(Ball { center, radius })
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Points at distance exactly `radius` are returned unchanged.
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim(), x.dim())?;
        let offset = x - &self.center;
        let dist = offset.norm();
        if dist <= self.radius {
            Ok(x.clone())
        } else {
            Ok(self.center.lincomb(1.0, &offset, self.radius / dist)?)
        }
    }
}

/// The affine set `offset + span(basis)`.
///
/// The basis is orthonormalized once at construction (Gram-Schmidt with one
/// reorthogonalization pass), so projections cost `O(k d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSubspace {
    offset: Vector,
    orthonormal: Vec<Vector>,
}

impl AffineSubspace {
    pub fn new(basis: &[Vector], offset: Vector) -> Result<Self> {
        let dim = offset.dim();
        let mut orthonormal: Vec<Vector> = Vec::with_capacity(basis.len());
        for (index, b) in basis.iter().enumerate() {
            check_dim(dim, b.dim())?;
            let original = b.norm();
            let mut v = b.clone();
            for _ in 0..2 {
                for e in &orthonormal {
                    let coeff = v.dot(e)?;
                    v = v.lincomb(1.0, e, -coeff)?;
                }
            }
            let residual = v.norm();
            if original == 0.0 || residual <= RANK_TOLERANCE * original {
                return Err(Error::RankDeficient { index });
            }
            orthonormal.push(v.scale(1.0 / residual));
        }
        Ok(AffineSubspace { offset, orthonormal })
    }

    pub fn dim(&self) -> usize {
        self.offset.dim()
    }

    pub fn offset(&self) -> &Vector {
        &self.offset
    }

    pub fn subspace_dim(&self) -> usize {
        self.orthonormal.len()
    }

    pub fn project(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim(), x.dim())?;
        let rel = x - &self.offset;
        let mut out = self.offset.clone();
        for e in &self.orthonormal {
            let coeff = rel.dot(e)?;
            out = out.lincomb(1.0, e, coeff)?;
        }
        Ok(out)
    }
}

/// Set descriptors accepted by the best-approximation driver and the
/// projection oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    Ball(Ball),
    Affine(AffineSubspace),
}

impl ConvexSet {
    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        Ball::new(center, radius).map(ConvexSet::Ball)
    }

    pub fn affine(basis: &[Vector], offset: Vector) -> Result<Self> {
        AffineSubspace::new(basis, offset).map(ConvexSet::Affine)
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Ball(b) => b.dim(),
            ConvexSet::Affine(a) => a.dim(),
        }
    }

    pub fn project(&self, x: &Vector) -> Result<Vector> {
        match self {
            ConvexSet::Ball(b) => b.project(x),
            ConvexSet::Affine(a) => a.project(x),
        }
    }

    /// Distance from `x` to the set.
    pub fn distance(&self, x: &Vector) -> Result<f64> {
        let p = self.project(x)?;
        Ok(p.distance_unchecked(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn v(c: &[f64]) -> Vector {
        Vector::from_slice(c).unwrap()
    }

    #[test]
    fn ball_boundary_point_is_returned_unchanged() {
        let b = Ball::new(v(&[0.0, 0.0]), 5.0).unwrap();
        let x = v(&[3.0, 4.0]);
        assert_eq!(b.project(&x).unwrap(), x);
    }

    #[test]
    fn ball_rejects_bad_radius() {
        assert!(Ball::new(v(&[0.0]), 0.0).is_err());
        assert!(Ball::new(v(&[0.0]), -1.0).is_err());
        assert!(Ball::new(v(&[0.0]), f64::NAN).is_err());
    }

    #[test]
    fn affine_rejects_dependent_basis() {
        let basis = vec![v(&[1.0, 2.0]), v(&[2.0, 4.0])];
        assert_eq!(
            AffineSubspace::new(&basis, v(&[0.0, 0.0])),
            Err(Error::RankDeficient { index: 1 })
        );
        let zero = vec![v(&[0.0, 0.0])];
        assert_eq!(
            AffineSubspace::new(&zero, v(&[0.0, 0.0])),
            Err(Error::RankDeficient { index: 0 })
        );
    }

    #[test]
    fn affine_projection_is_idempotent() {
        let basis = vec![v(&[1.0, 1.0, 0.0]), v(&[0.0, 1.0, 1.0])];
        let s = AffineSubspace::new(&basis, v(&[1.0, -2.0, 0.5])).unwrap();
        let p = s.project(&v(&[3.0, 0.0, -7.0])).unwrap();
        let pp = s.project(&p).unwrap();
        assert!(p.distance(&pp).unwrap() < 1e-12);
    }

    #[test]
    fn affine_with_empty_basis_is_a_point() {
        let s = AffineSubspace::new(&[], v(&[1.0, 2.0])).unwrap();
        assert_eq!(s.project(&v(&[9.0, 9.0])).unwrap(), v(&[1.0, 2.0]));
    }
}
