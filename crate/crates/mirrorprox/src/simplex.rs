//! Block geometry of a product of simplices and the two prox update kernels.
//!
//! Both solvers reduce each iteration to one of two per-block primitives:
//! a multiplicative update followed by normalization (entropic mirror map)
//! or a Euclidean projection onto the simplex (quadratic mirror map). The
//! projection solves `sum_i max(z_i - tau, 0) = 1` for the threshold `tau`
//! by bisection; the root function is monotone, so the bracket
//! `[min(z) - 1, max(z)]` always contains the solution.

use crate::error::{Error, Result};
use crate::tol;
use crate::vector::Vector;

/// Contiguous block structure of a product of simplices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLayout {
    offsets: Vec<usize>,
    lens: Vec<usize>,
    dim: usize,
}

impl BlockLayout {
    /// Layout with the given block sizes, laid out contiguously in order.
    pub fn new(block_sizes: &[usize]) -> Result<Self> {
        if block_sizes.is_empty() {
            return Err(Error::Contract("layout needs at least one block".into()));
        }
        if block_sizes.contains(&0) {
            return Err(Error::Contract("zero-sized simplex block".into()));
        }
        let mut offsets = Vec::with_capacity(block_sizes.len());
        let mut dim = 0;
        for &b in block_sizes {
            offsets.push(dim);
            dim += b;
        }
        Ok(BlockLayout {
            offsets,
            lens: block_sizes.to_vec(),
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_blocks(&self) -> usize {
        self.lens.len()
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.lens
    }

    /// Index range of block `b`.
    pub fn range(&self, b: usize) -> std::ops::Range<usize> {
        self.offsets[b]..self.offsets[b] + self.lens[b]
    }

    pub fn blocks(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        (0..self.lens.len()).map(|b| self.range(b))
    }
}

/// Euclidean projection of one block onto the probability simplex.
///
/// Bisects the threshold `tau` with `sum_i max(z_i - tau, 0) = 1` on the
/// bracket `[min(z) - 1, max(z)]` until the bracket is narrower than
/// `tol::BISECTION_WIDTH` (at most `BISECTION_MAX_ITERS` halvings), then
/// renormalizes so the block sums to exactly 1.
pub fn project_simplex_bisection(z: &[f64]) -> Vec<f64> {
    debug_assert!(!z.is_empty());
    if z.len() == 1 {
        return vec![1.0];
    }
    let mut lo = z.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
    let mut hi = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let excess = |tau: f64| -> f64 { z.iter().map(|&v| (v - tau).max(0.0)).sum::<f64>() - 1.0 };
    for _ in 0..tol::BISECTION_MAX_ITERS {
        if hi - lo < tol::BISECTION_WIDTH {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    let mut p: Vec<f64> = z.iter().map(|&v| (v - tau).max(0.0)).collect();
    let s: f64 = p.iter().sum();
    debug_assert!(s > 0.0);
    for v in &mut p {
        *v /= s;
    }
    p
}

/// Multiplicative (entropic) prox update: `w = x .* exp(-gamma g)`, each
/// block renormalized to sum 1. Strictly positive input blocks yield
/// strictly positive output blocks.
pub fn entropic_update(x: &Vector, g: &[f64], gamma: f64, layout: &BlockLayout) -> Result<Vector> {
    if x.dim() != layout.dim() || g.len() != layout.dim() {
        return Err(Error::DimensionMismatch {
            expected: layout.dim(),
            got: x.dim().max(g.len()),
        });
    }
    let xs = x.coords();
    let mut out = vec![0.0; layout.dim()];
    for block in layout.blocks() {
        let mut sum = 0.0;
        for i in block.clone() {
            if xs[i] < 0.0 {
                return Err(Error::Domain(format!(
                    "entropic update on negative coordinate {} at index {i}",
                    xs[i]
                )));
            }
            let w = xs[i] * (-gamma * g[i]).exp();
            out[i] = w;
            sum += w;
        }
        if !(sum.is_finite() && sum > 0.0) {
            return Err(Error::Degenerate(format!(
                "entropic block weight sum {sum}; step too large or block collapsed"
            )));
        }
        for i in block {
            out[i] /= sum;
        }
    }
    Vector::new(out)
}

/// Euclidean prox update: project `x - gamma g` onto each simplex block.
pub fn euclidean_update(x: &Vector, g: &[f64], gamma: f64, layout: &BlockLayout) -> Result<Vector> {
    if x.dim() != layout.dim() || g.len() != layout.dim() {
        return Err(Error::DimensionMismatch {
            expected: layout.dim(),
            got: x.dim().max(g.len()),
        });
    }
    let xs = x.coords();
    let mut out = vec![0.0; layout.dim()];
    for block in layout.blocks() {
        let z: Vec<f64> = block.clone().map(|i| xs[i] - gamma * g[i]).collect();
        let p = project_simplex_bisection(&z);
        for (i, v) in block.zip(p) {
            out[i] = v;
        }
    }
    Vector::new(out)
}
