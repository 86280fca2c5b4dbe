//! Primal points and dual (gradient-space) vectors.
//!
//! Both are thin wrappers over `Vec<f64>` that validate finiteness at
//! construction; the distinct types keep mapping values and gradients of the
//! mirror map from being confused with feasible points.

use crate::error::{Error, Result};

/// A point of the ambient primal space.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

/// An element of the dual space: mapping values, mirror-map gradients, and
/// their linear combinations.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint(Vec<f64>);

fn check_finite(coords: &[f64]) -> Result<()> {
    if let Some(v) = coords.iter().find(|v| !v.is_finite()) {
        return Err(Error::Contract(format!("non-finite coordinate {v}")));
    }
    Ok(())
}

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        check_finite(&coords)?;
        Ok(Vector(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    /// `self - other`, staying in the primal space.
    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn dist2(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl DualPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        check_finite(&coords)?;
        Ok(DualPoint(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn scale(&self, s: f64) -> DualPoint {
        DualPoint(self.0.iter().map(|v| v * s).collect())
    }

    pub fn sub(&self, other: &DualPoint) -> DualPoint {
        debug_assert_eq!(self.dim(), other.dim());
        DualPoint(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Euclidean norm; the dual norm used throughout (the 2-norm is
    /// self-dual, and the strong-convexity constants here are stated for it).
    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Pairing `<g, x>` between a dual vector and a primal displacement.
    pub fn pair(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(self.dim(), x.len());
        self.0.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

/// `<a, b>` on raw coordinate slices.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(Vector::new(vec![0.0, f64::NAN]).is_err());
        assert!(DualPoint::new(vec![f64::INFINITY]).is_err());
        assert!(Vector::new(vec![0.0, 1.0]).is_ok());
    }

    #[test]
    fn norms_and_pairing() {
        let x = Vector::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(x.norm2(), 5.0);
        assert_eq!(x.norm_inf(), 4.0);
        let g = DualPoint::new(vec![1.0, -2.0]).unwrap();
        assert_eq!(g.pair(x.coords()), 3.0 - 8.0);
    }
}
