use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, Mul, Sub};

use crate::error::{check_dim, Error, Result};

/// A point of a finite-dimensional real Hilbert space.
///
/// Construction rejects empty and non-finite coordinate lists. The checked
/// arithmetic methods return [`Error::DimensionMismatch`] when dimensions
/// differ; the operator impls (`&a + &b`, `&a - &b`) panic instead and are
/// meant for code that has already validated dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    coords: Vec<f64>,
}

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Vector { coords })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(coords.to_vec())
    }

    /// Wraps coordinates produced by arithmetic on valid vectors. Finiteness is
    /// re-checked by the solvers after every step.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Vector { coords }
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyVector);
        }
        Ok(Vector {
            coords: vec![0.0; dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.coords
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        check_dim(dim, self.dim())
    }

    pub fn checked_add(&self, other: &Vector) -> Result<Vector> {
        check_dim(self.dim(), other.dim())?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Vector) -> Result<Vector> {
        check_dim(self.dim(), other.dim())?;
        Ok(self - other)
    }

    pub fn dot(&self, other: &Vector) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum())
    }

    pub fn norm_squared(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_squared())
    }

    /// Euclidean distance `||self - other||`.
    pub fn distance(&self, other: &Vector) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.distance_unchecked(other))
    }

    pub(crate) fn distance_unchecked(&self, other: &Vector) -> f64 {
        let sq: f64 = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        libm::sqrt(sq)
    }

    pub fn scale(&self, factor: f64) -> Vector {
        Vector::from_raw(self.coords.iter().map(|c| c * factor).collect())
    }

    /// `a * self + b * other`, computed coordinate-wise in that order.
    pub fn lincomb(&self, a: f64, other: &Vector, b: f64) -> Result<Vector> {
        check_dim(self.dim(), other.dim())?;
        Ok(Vector::from_raw(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        ))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector::from_raw(self.coords.iter().map(|&c| f(c)).collect())
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.coords[index]
    }
}

impl<'a> Add<&'a Vector> for &'a Vector {
    type Output = Vector;

    fn add(self, rhs: &'a Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in vector addition");
        Vector::from_raw(self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect())
    }
}

impl<'a> Sub<&'a Vector> for &'a Vector {
    type Output = Vector;

    fn sub(self, rhs: &'a Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in vector subtraction");
        Vector::from_raw(self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect())
    }
}

impl Mul<&Vector> for f64 {
    type Output = Vector;

    fn mul(self, rhs: &Vector) -> Vector {
        rhs.scale(self)
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Vector::new(coords)
    }
}
