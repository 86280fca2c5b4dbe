//! Monotone affine variational-inequality instances.
//!
//! An instance is the data `VI(X, F)` with `F(x) = M x + c` on a product of
//! simplices `X`. Construction validates monotonicity (the symmetric part of
//! `M` must be positive semidefinite up to round-off) and records a Lipschitz
//! constant, by default the spectral norm of `M` from power iteration.

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, symmetric_eigenvalues, Matrix};
use crate::set::FeasibleSet;
use crate::tol;
use crate::vector::{DualPoint, Vector};

/// A monotone affine VI: find `x*` in `X` with `<F(x*), x - x*> >= 0` for
/// all `x` in `X`.
#[derive(Debug, Clone)]
pub struct VIProblem {
    set: FeasibleSet,
    mapping: Matrix,
    offset: Vec<f64>,
    lipschitz: f64,
}

impl VIProblem {
    /// Builds an instance, computing the Lipschitz constant from the mapping.
    pub fn new(set: FeasibleSet, mapping: Matrix, offset: Vec<f64>) -> Result<Self> {
        let lipschitz = spectral_norm(&mapping);
        Self::with_lipschitz(set, mapping, offset, lipschitz)
    }

    /// Builds an instance with a caller-supplied Lipschitz constant, which
    /// must dominate the spectral norm of the mapping (minus round-off).
    pub fn with_lipschitz(
        set: FeasibleSet,
        mapping: Matrix,
        offset: Vec<f64>,
        lipschitz: f64,
    ) -> Result<Self> {
        if mapping.dim() != set.dim() {
            return Err(Error::DimensionMismatch {
                expected: set.dim(),
                got: mapping.dim(),
            });
        }
        if offset.len() != set.dim() {
            return Err(Error::DimensionMismatch {
                expected: set.dim(),
                got: offset.len(),
            });
        }
        if !mapping.is_finite() || offset.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite mapping data".into()));
        }
        if !lipschitz.is_finite() || lipschitz < 0.0 {
            return Err(Error::Validation(format!(
                "lipschitz constant {lipschitz} must be a finite nonnegative real"
            )));
        }
        let sigma = spectral_norm(&mapping);
        if lipschitz < sigma - tol::LIPSCHITZ_SLACK {
            return Err(Error::Validation(format!(
                "lipschitz constant {lipschitz} below spectral norm {sigma}"
            )));
        }
        let min_eig = symmetric_eigenvalues(&mapping.symmetric_part())[0];
        if min_eig < tol::MONOTONE_MIN_EIG {
            return Err(Error::Validation(format!(
                "mapping is not monotone: min eigenvalue of symmetric part is {min_eig:.3e}"
            )));
        }
        Ok(VIProblem {
            set,
            mapping,
            offset,
            lipschitz,
        })
    }

    pub fn set(&self) -> &FeasibleSet {
        &self.set
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn mapping(&self) -> &Matrix {
        &self.mapping
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// `F(x) = M x + c`.
    pub fn eval_mapping(&self, x: &Vector) -> Result<DualPoint> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        let mut out = self.mapping.matvec(x.coords());
        for (o, c) in out.iter_mut().zip(&self.offset) {
            *o += c;
        }
        DualPoint::new(out)
    }
}
