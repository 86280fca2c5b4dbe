//! The feasible set: a product of probability simplices.

use crate::error::Result;
use crate::simplex::BlockLayout;
use crate::tol;
use crate::vector::Vector;

/// Product of probability simplices with the given block sizes.
///
/// Matrix games use two 2-dimensional blocks; the geometry kernels accept
/// any block structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibleSet {
    layout: BlockLayout,
}

impl FeasibleSet {
    pub fn product_of_simplices(block_sizes: &[usize]) -> Result<Self> {
        Ok(FeasibleSet {
            layout: BlockLayout::new(block_sizes)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    pub fn block_sizes(&self) -> &[usize] {
        self.layout.block_sizes()
    }

    /// Membership test: every block entrywise `>= -tol` and summing to 1
    /// within `tol` (`tol::FEASIBILITY`).
    pub fn contains(&self, x: &Vector) -> bool {
        if x.dim() != self.dim() {
            return false;
        }
        let xs = x.coords();
        for block in self.layout.blocks() {
            let mut sum = 0.0;
            for i in block {
                if xs[i] < -tol::FEASIBILITY {
                    return false;
                }
                sum += xs[i];
            }
            if (sum - 1.0).abs() > tol::FEASIBILITY {
                return false;
            }
        }
        true
    }

    /// Center of the set: each block uniform.
    pub fn uniform_point(&self) -> Vector {
        let mut coords = vec![0.0; self.dim()];
        for block in self.layout.blocks() {
            let w = 1.0 / block.len() as f64;
            for i in block {
                coords[i] = w;
            }
        }
        Vector::new(coords).expect("uniform point is finite")
    }

    /// Vertex `k` of block `b` as a full-dimensional point whose other
    /// blocks are uniform. Mostly a test helper; block-separable maxima use
    /// `block_vertex_coords` below implicitly.
    pub fn block_vertex(&self, b: usize, k: usize) -> Vector {
        let mut coords = self.uniform_point().into_coords();
        let range = self.layout.range(b);
        for i in range.clone() {
            coords[i] = 0.0;
        }
        coords[range.start + k] = 1.0;
        Vector::new(coords).expect("vertex is finite")
    }

    /// All vertices of the product set (one vertex chosen per block).
    /// The count is the product of the block sizes; intended for the small
    /// blocks this crate targets.
    pub fn vertices(&self) -> Vec<Vector> {
        let sizes = self.layout.block_sizes();
        let total: usize = sizes.iter().product();
        let mut out = Vec::with_capacity(total);
        let mut choice = vec![0usize; sizes.len()];
        loop {
            let mut coords = vec![0.0; self.dim()];
            for (b, block) in self.layout.blocks().enumerate() {
                coords[block.start + choice[b]] = 1.0;
            }
            out.push(Vector::new(coords).expect("vertex is finite"));
            // odometer increment over block choices
            let mut b = 0;
            loop {
                if b == sizes.len() {
                    return out;
                }
                choice[b] += 1;
                if choice[b] < sizes[b] {
                    break;
                }
                choice[b] = 0;
                b += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_tolerance() {
        let set = FeasibleSet::product_of_simplices(&[2, 2]).unwrap();
        assert!(set.contains(&set.uniform_point()));
        let off = Vector::new(vec![0.5, 0.5 + 2e-9, 0.5, 0.5]).unwrap();
        assert!(!set.contains(&off));
        let slightly_neg = Vector::new(vec![-5e-10, 1.0 + 5e-10, 0.5, 0.5]).unwrap();
        assert!(set.contains(&slightly_neg));
        let wrong_dim = Vector::new(vec![1.0, 0.0]).unwrap();
        assert!(!set.contains(&wrong_dim));
    }

    #[test]
    fn uniform_point_of_mixed_blocks() {
        let set = FeasibleSet::product_of_simplices(&[2, 4]).unwrap();
        let u = set.uniform_point();
        assert_eq!(u.coords(), &[0.5, 0.5, 0.25, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn vertices_enumerate_product() {
        let set = FeasibleSet::product_of_simplices(&[2, 2]).unwrap();
        let vs = set.vertices();
        assert_eq!(vs.len(), 4);
        assert!(vs.iter().all(|v| set.contains(v)));
        assert_eq!(vs[0].coords(), &[1.0, 0.0, 1.0, 0.0]);
        assert_eq!(vs[3].coords(), &[0.0, 1.0, 0.0, 1.0]);
    }
}
