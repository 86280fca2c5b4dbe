//! Minimal dense linear algebra for small square matrices.
//!
//! The problems this crate targets are products of low-dimensional simplices
//! (matrix games live in R^4), so a row-major `Vec<f64>` matrix with direct
//! O(n^2)/O(n^3) kernels is all that is needed. Spectral norms are computed
//! by power iteration on `M^T M`; eigenvalues of symmetric matrices by cyclic
//! Jacobi sweeps.

use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { n, data })
    }

    /// Builds an `n x n` matrix from a row-major slice.
    pub fn from_row_major(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Matrix {
            n,
            data: data.to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// `(M + M^T) / 2`.
    pub fn symmetric_part(&self) -> Matrix {
        let mut s = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                s.set(i, j, 0.5 * (self.get(i, j) + self.get(j, i)));
            }
        }
        s
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        let mut out = vec![0.0; self.n];
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.n)) {
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            *o = acc;
        }
        out
    }

    /// `M^T x` without forming the transpose.
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        let mut out = vec![0.0; self.n];
        for (&xi, row) in x.iter().zip(self.data.chunks_exact(self.n)) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * xi;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.n, other.n);
        let mut out = Matrix::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..self.n {
                    out.data[i * self.n + j] += aik * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.n, other.n);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Matrix { n: self.n, data }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Spectral norm `sigma_max(M)` via power iteration on `M^T M`.
///
/// Runs until the Rayleigh-quotient residual drops below `1e-10` relative to
/// the current eigenvalue estimate. The start vector comes from a fixed seed,
/// so the result is reproducible.
pub fn spectral_norm(m: &Matrix) -> f64 {
    let n = m.dim();
    if n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    let vn = norm2(&v);
    if vn == 0.0 {
        v[0] = 1.0;
    } else {
        for x in &mut v {
            *x /= vn;
        }
    }
    let mut lambda = 0.0;
    for _ in 0..100_000 {
        // w = M^T (M v)
        let w = m.matvec_t(&m.matvec(&v));
        let wn = norm2(&w);
        if wn == 0.0 {
            return 0.0; // v is in the null space of M^T M; for random v this means M = 0
        }
        lambda = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
        // residual of (lambda, v) as an eigenpair of M^T M
        let res = w
            .iter()
            .zip(&v)
            .map(|(wi, vi)| (wi - lambda * vi).powi(2))
            .sum::<f64>()
            .sqrt();
        if res <= 1e-10 * lambda.max(f64::MIN_POSITIVE) {
            break;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
    }
    lambda.max(0.0).sqrt()
}

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations,
/// returned in ascending order. Input asymmetry is not checked; callers
/// pass `symmetric_part()` output.
pub fn symmetric_eigenvalues(s: &Matrix) -> Vec<f64> {
    let n = s.dim();
    let mut a = s.clone();
    let frob: f64 = a.data.iter().map(|v| v * v).sum::<f64>().sqrt();
    let tol = 1e-300_f64.max(1e-15 * frob);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q).powi(2);
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= tol / (n as f64) {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = 0.5 * (aqq - app) / apq;
                // stable tangent of the rotation angle
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - sn * akq);
                    a.set(k, q, sn * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - sn * aqk);
                    a.set(q, k, sn * apk + c * aqk);
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

/// Householder QR returning the orthogonal factor with `diag(R) > 0`.
///
/// Applied to a matrix of iid standard normals this yields a draw from the
/// Haar (uniform) distribution on the orthogonal group.
pub fn qr_orthogonal_factor(g: &Matrix) -> Matrix {
    let n = g.dim();
    let mut r = g.clone();
    let mut q = Matrix::zeros(n);
    for i in 0..n {
        q.set(i, i, 1.0);
    }
    for k in 0..n {
        // Householder vector for column k below the diagonal
        let mut x = vec![0.0; n - k];
        for i in k..n {
            x[i - k] = r.get(i, k);
        }
        let alpha = -x[0].signum() * norm2(&x);
        if alpha == 0.0 {
            continue;
        }
        let mut v = x;
        v[0] -= alpha;
        let vn = norm2(&v);
        if vn == 0.0 {
            continue;
        }
        for vi in &mut v {
            *vi /= vn;
        }
        // r <- (I - 2 v v^T) r ; q <- q (I - 2 v v^T)
        for j in 0..n {
            let mut dot = 0.0;
            for i in k..n {
                dot += v[i - k] * r.get(i, j);
            }
            for i in k..n {
                let val = r.get(i, j) - 2.0 * v[i - k] * dot;
                r.set(i, j, val);
            }
        }
        for i in 0..n {
            let mut dot = 0.0;
            for j in k..n {
                dot += q.get(i, j) * v[j - k];
            }
            for j in k..n {
                let val = q.get(i, j) - 2.0 * dot * v[j - k];
                q.set(i, j, val);
            }
        }
    }
    // flip column signs so the implied R has a positive diagonal
    for k in 0..n {
        if r.get(k, k) < 0.0 {
            for i in 0..n {
                let val = -q.get(i, k);
                q.set(i, k, val);
            }
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_norm_of_diagonal() {
        let m = Matrix::from_rows(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, -7.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ])
        .unwrap();
        assert!((spectral_norm(&m) - 7.0).abs() < 1e-9);
    }

    #[test]
    fn spectral_norm_of_zero() {
        assert_eq!(spectral_norm(&Matrix::zeros(4)), 0.0);
    }

    #[test]
    fn spectral_norm_of_skew() {
        // [[0, a], [-a, 0]] has singular values a, a
        let m = Matrix::from_rows(&[vec![0.0, 2.5], vec![-2.5, 0.0]]).unwrap();
        assert!((spectral_norm(&m) - 2.5).abs() < 1e-9);
    }

    #[test]
    fn jacobi_eigenvalues_match_hand_values() {
        // eigenvalues of [[2, 1], [1, 2]] are 1 and 3
        let s = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = symmetric_eigenvalues(&s);
        assert!((e[0] - 1.0).abs() < 1e-12);
        assert!((e[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_agrees_with_power_iteration_on_gram_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let n = 4;
            let data: Vec<f64> = (0..n * n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            let m = Matrix::from_row_major(n, &data).unwrap();
            let gram = m.transpose().matmul(&m);
            let eigs = symmetric_eigenvalues(&gram);
            let sigma = spectral_norm(&m);
            assert!((sigma - eigs[n - 1].max(0.0).sqrt()).abs() < 1e-8);
        }
    }

    #[test]
    fn qr_factor_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data: Vec<f64> = (0..16).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let g = Matrix::from_row_major(4, &data).unwrap();
        let q = qr_orthogonal_factor(&g);
        let qtq = q.transpose().matmul(&q);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((qtq.get(i, j) - want).abs() < 1e-12);
            }
        }
    }
}
