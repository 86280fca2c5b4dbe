//! Mirror maps over products of simplices.
//!
//! Two distance-generating functions are supported:
//!
//! * entropic: `psi(x) = sum_i x_i (ln x_i - 1)`, whose Bregman divergence
//!   on the product of simplices is the blockwise KL divergence and whose
//!   prox-mapping is a multiplicative update;
//! * Euclidean: `psi(x) = ||x||^2 / 2`, whose prox-mapping is a blockwise
//!   simplex projection.
//!
//! Both are 1-strongly convex with respect to the Euclidean norm on the
//! product of simplices, so `alpha() == 1` for both kinds.

use crate::error::{Error, Result};
use crate::set::FeasibleSet;
use crate::simplex::{entropic_update, euclidean_update};
use crate::tol;
use crate::vector::{DualPoint, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MirrorKind {
    Entropic,
    Euclidean,
}

impl std::fmt::Display for MirrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MirrorKind::Entropic => write!(f, "entropic"),
            MirrorKind::Euclidean => write!(f, "euclidean"),
        }
    }
}

/// A distance-generating function together with its strong-convexity
/// modulus `alpha` (with respect to the Euclidean norm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorMap {
    kind: MirrorKind,
    alpha: f64,
}

impl MirrorMap {
    pub fn entropic() -> Self {
        MirrorMap {
            kind: MirrorKind::Entropic,
            alpha: 1.0,
        }
    }

    pub fn euclidean() -> Self {
        MirrorMap {
            kind: MirrorKind::Euclidean,
            alpha: 1.0,
        }
    }

    pub fn of_kind(kind: MirrorKind) -> Self {
        match kind {
            MirrorKind::Entropic => Self::entropic(),
            MirrorKind::Euclidean => Self::euclidean(),
        }
    }

    pub fn kind(&self) -> MirrorKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `psi(x)`. Entropic coordinates must be nonnegative; values below
    /// `tol::ENTROPIC_FLOOR` are clamped up before the log.
    pub fn psi(&self, x: &Vector) -> Result<f64> {
        match self.kind {
            MirrorKind::Euclidean => Ok(0.5 * x.coords().iter().map(|v| v * v).sum::<f64>()),
            MirrorKind::Entropic => {
                let mut acc = 0.0;
                for (i, &v) in x.coords().iter().enumerate() {
                    if v < 0.0 {
                        return Err(Error::Domain(format!(
                            "entropic potential at negative coordinate {v} (index {i})"
                        )));
                    }
                    acc += v * (v.max(tol::ENTROPIC_FLOOR).ln() - 1.0);
                }
                Ok(acc)
            }
        }
    }

    /// `grad psi(x)`: the identity for the Euclidean map, `ln x` (with the
    /// positivity floor) for the entropic map.
    pub fn grad_psi(&self, x: &Vector) -> Result<DualPoint> {
        match self.kind {
            MirrorKind::Euclidean => DualPoint::new(x.coords().to_vec()),
            MirrorKind::Entropic => {
                let mut out = Vec::with_capacity(x.dim());
                for (i, &v) in x.coords().iter().enumerate() {
                    if v < 0.0 {
                        return Err(Error::Domain(format!(
                            "entropic gradient at negative coordinate {v} (index {i})"
                        )));
                    }
                    out.push(v.max(tol::ENTROPIC_FLOOR).ln());
                }
                DualPoint::new(out)
            }
        }
    }

    /// Bregman divergence `B(u, x) = psi(u) - psi(x) - <grad psi(x), u - x>`.
    ///
    /// On the product of simplices this is the blockwise KL divergence for
    /// the entropic map and `||u - x||^2 / 2` for the Euclidean map.
    pub fn bregman(&self, u: &Vector, x: &Vector) -> Result<f64> {
        if u.dim() != x.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                got: u.dim(),
            });
        }
        let g = self.grad_psi(x)?;
        let umx: Vec<f64> = u
            .coords()
            .iter()
            .zip(x.coords())
            .map(|(a, b)| a - b)
            .collect();
        Ok(self.psi(u)? - self.psi(x)? - g.pair(&umx))
    }

    /// Prox-mapping `P_x(xi) = argmin_{y in X} psi(y) + <y, xi - grad psi(x)>`.
    ///
    /// `x` must be feasible. The minimizer has the closed form of a
    /// multiplicative update (entropic) or a blockwise projection of
    /// `x - xi` (Euclidean).
    pub fn prox_map(&self, x: &Vector, xi: &DualPoint, set: &FeasibleSet) -> Result<Vector> {
        if xi.dim() != set.dim() {
            return Err(Error::DimensionMismatch {
                expected: set.dim(),
                got: xi.dim(),
            });
        }
        if !set.contains(x) {
            return Err(Error::Contract(
                "prox-mapping center is outside the feasible set".into(),
            ));
        }
        match self.kind {
            MirrorKind::Entropic => entropic_update(x, xi.coords(), 1.0, set.layout()),
            MirrorKind::Euclidean => euclidean_update(x, xi.coords(), 1.0, set.layout()),
        }
    }

    /// `H_u(x) = <grad psi(x), x - u> - psi(x)`, the value of the centered
    /// Fenchel conjugate `Omega_u` at `grad psi(x)`: the maximum defining
    /// `Omega(grad psi(x))` is attained at `x` itself, giving this closed
    /// form for every feasible `x`.
    pub fn h_u(&self, x: &Vector, u: &Vector) -> Result<f64> {
        if u.dim() != x.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                got: u.dim(),
            });
        }
        let g = self.grad_psi(x)?;
        let xmu: Vec<f64> = x
            .coords()
            .iter()
            .zip(u.coords())
            .map(|(a, b)| a - b)
            .collect();
        Ok(g.pair(&xmu) - self.psi(x)?)
    }

    /// `max_u B(u, x0)` over the feasible set.
    ///
    /// The divergence is convex and block-separable in `u`, so the maximum
    /// is a sum of per-block maxima over block vertices.
    pub fn max_bregman(&self, set: &FeasibleSet, x0: &Vector) -> Result<f64> {
        if x0.dim() != set.dim() {
            return Err(Error::DimensionMismatch {
                expected: set.dim(),
                got: x0.dim(),
            });
        }
        let xs = x0.coords();
        let mut total = 0.0;
        for block in set.layout().blocks() {
            let mut best = f64::NEG_INFINITY;
            for k in block.clone() {
                // per-block divergence at the k-th vertex of this block
                let term = match self.kind {
                    MirrorKind::Entropic => {
                        if xs[k] < 0.0 {
                            return Err(Error::Domain(format!(
                                "negative center coordinate {} at index {k}",
                                xs[k]
                            )));
                        }
                        -(xs[k].max(tol::ENTROPIC_FLOOR).ln())
                    }
                    MirrorKind::Euclidean => {
                        let mut d = 0.0;
                        for i in block.clone() {
                            let target = if i == k { 1.0 } else { 0.0 };
                            d += (target - xs[i]).powi(2);
                        }
                        0.5 * d
                    }
                };
                best = best.max(term);
            }
            total += best;
        }
        Ok(total)
    }
}
