//! Two-player matrix games on a product of two 2-simplices.
//!
//! Player 1 minimizes `<x1, A x1> + <x1, B x2> + <p, x1>` over the first
//! simplex block; player 2 minimizes `<x2, C x2> + <x1, D x2> + <q, x2>`
//! over the second. Stacking the players' gradients gives the affine
//! mapping `F(x) = [[A+A^T, B], [D^T, C+C^T]] x + [p; q]`, and the game's
//! equilibria are the solutions of `VI(X, F)`.
//!
//! `generate_game` draws instances with a controlled spectrum: the mapping
//! matrix has symmetric part `Q diag(lambda) Q^T` with `Q` Haar-orthogonal
//! and `lambda` uniform in `[eig_lo, eig_hi]`, plus an off-diagonal-block
//! skew part of spectral norm `eig_hi / 2`. `eig_lo >= 0` keeps the mapping
//! monotone; `eig_lo = eig_hi = 0` degenerates to a constant mapping.
//!
//! Instances serialize to `.vigame` files: flat key/value text with arrays,
//! floats written with 17 significant digits so a save/load round trip is
//! bit-exact.

use crate::error::{Error, Result};
use crate::linalg::{qr_orthogonal_factor, spectral_norm, symmetric_eigenvalues, Matrix};
use crate::problem::VIProblem;
use crate::rng::{seeded, standard_normal};
use crate::set::FeasibleSet;
use crate::tol;
use rand::Rng;
use serde::Deserialize;
use std::path::Path;

/// A matrix-game instance plus its generation record.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub a: [[f64; 2]; 2],
    pub b: [[f64; 2]; 2],
    pub c: [[f64; 2]; 2],
    pub d: [[f64; 2]; 2],
    pub p: [f64; 2],
    pub q: [f64; 2],
    pub seed: u64,
    pub eig_lo: f64,
    pub eig_hi: f64,
    /// Spectral norm of the assembled mapping matrix (power iteration).
    pub l_computed: f64,
}

impl ProblemSpec {
    /// The mapping matrix `[[A+A^T, B], [D^T, C+C^T]]`.
    pub fn mapping_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(4);
        for i in 0..2 {
            for j in 0..2 {
                m.set(i, j, self.a[i][j] + self.a[j][i]);
                m.set(i, 2 + j, self.b[i][j]);
                m.set(2 + i, j, self.d[j][i]);
                m.set(2 + i, 2 + j, self.c[i][j] + self.c[j][i]);
            }
        }
        m
    }

    /// The constant term `[p; q]`.
    pub fn offset(&self) -> Vec<f64> {
        vec![self.p[0], self.p[1], self.q[0], self.q[1]]
    }

    /// Validates the instance and builds the VI it defines.
    pub fn to_problem(&self) -> Result<VIProblem> {
        self.validate()?;
        let set = FeasibleSet::product_of_simplices(&[2, 2])?;
        VIProblem::with_lipschitz(set, self.mapping_matrix(), self.offset(), self.l_computed)
    }

    /// Instance-level invariants: a sane eigenvalue range, `l_computed`
    /// matching the mapping's spectral norm, the symmetric part's spectrum
    /// inside the recorded range, and monotonicity.
    pub fn validate(&self) -> Result<()> {
        let all = self
            .a
            .iter()
            .chain(&self.b)
            .chain(&self.c)
            .chain(&self.d)
            .flatten()
            .chain(&self.p)
            .chain(&self.q);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite game coefficient".into()));
        }
        if !(self.eig_lo.is_finite() && self.eig_hi.is_finite())
            || self.eig_lo < 0.0
            || self.eig_lo > self.eig_hi
        {
            return Err(Error::Validation(format!(
                "eigenvalue range [{}, {}] must satisfy 0 <= lo <= hi",
                self.eig_lo, self.eig_hi
            )));
        }
        let m = self.mapping_matrix();
        let sigma = spectral_norm(&m);
        if (self.l_computed - sigma).abs() > tol::L_RECOMPUTED {
            return Err(Error::Validation(format!(
                "l_computed = {} disagrees with the mapping's spectral norm {}",
                self.l_computed, sigma
            )));
        }
        let eigs = symmetric_eigenvalues(&m.symmetric_part());
        let (lo, hi) = (eigs[0], eigs[eigs.len() - 1]);
        if lo < self.eig_lo - tol::EIG_RANGE_SLACK || hi > self.eig_hi + tol::EIG_RANGE_SLACK {
            return Err(Error::Validation(format!(
                "symmetric-part spectrum [{lo}, {hi}] escapes the recorded range [{}, {}]",
                self.eig_lo, self.eig_hi
            )));
        }
        if lo < tol::MONOTONE_MIN_EIG {
            return Err(Error::Validation(format!(
                "mapping is not monotone: min eigenvalue {lo:.3e}"
            )));
        }
        Ok(())
    }
}

/// The classic matching-pennies game: purely skew mapping, unique
/// equilibrium at the uniform point, `F(uniform) = 0`.
pub fn matching_pennies() -> ProblemSpec {
    let z = [[0.0; 2]; 2];
    let b = [[1.0, -1.0], [-1.0, 1.0]];
    let d = [[-1.0, 1.0], [1.0, -1.0]];
    let mut spec = ProblemSpec {
        a: z,
        b,
        c: z,
        d,
        p: [0.0; 2],
        q: [0.0; 2],
        seed: 0,
        eig_lo: 0.0,
        eig_hi: 0.0,
        l_computed: 0.0,
    };
    spec.l_computed = spectral_norm(&spec.mapping_matrix());
    spec
}

/// Draws a monotone game with symmetric-part eigenvalues in
/// `[eig_lo, eig_hi]` (uniform) and a skew part of norm `eig_hi / 2`.
///
/// The draw order — normal matrix for `Q`, spectrum, skew entries, then
/// `p`, `q` — is fixed; identical seeds reproduce instances bit-for-bit.
pub fn generate_game(seed: u64, eig_lo: f64, eig_hi: f64) -> Result<ProblemSpec> {
    if !(eig_lo.is_finite() && eig_hi.is_finite()) || eig_lo < 0.0 || eig_lo > eig_hi {
        return Err(Error::Contract(format!(
            "eigenvalue range [{eig_lo}, {eig_hi}] must satisfy 0 <= lo <= hi"
        )));
    }
    let mut rng = seeded(seed);

    let mut g = Matrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            g.set(i, j, standard_normal(&mut rng));
        }
    }
    let q_orth = qr_orthogonal_factor(&g);
    let lambda: Vec<f64> = (0..4)
        .map(|_| eig_lo + (eig_hi - eig_lo) * rng.gen::<f64>())
        .collect();
    // K = scaled skew-symmetric draw with ||K||_2 = eig_hi / 2 (zero when eig_hi = 0)
    let mut k = Matrix::zeros(4);
    for i in 0..4 {
        for j in (i + 1)..4 {
            let v = standard_normal(&mut rng);
            k.set(i, j, v);
            k.set(j, i, -v);
        }
    }
    let k_norm = spectral_norm(&k);
    let scale = if k_norm > 0.0 {
        0.5 * eig_hi / k_norm
    } else {
        0.0
    };
    k.scale(scale);

    // J = Q diag(lambda) Q^T + K
    let mut j = Matrix::zeros(4);
    for r in 0..4 {
        for cidx in 0..4 {
            let mut acc = 0.0;
            for (t, &lam) in lambda.iter().enumerate() {
                acc += q_orth.get(r, t) * lam * q_orth.get(cidx, t);
            }
            j.set(r, cidx, acc + k.get(r, cidx));
        }
    }

    let mut a = [[0.0; 2]; 2];
    let mut b = [[0.0; 2]; 2];
    let mut c = [[0.0; 2]; 2];
    let mut d = [[0.0; 2]; 2];
    for r in 0..2 {
        for s in 0..2 {
            a[r][s] = 0.5 * j.get(r, s);
            b[r][s] = j.get(r, 2 + s);
            d[r][s] = j.get(2 + s, r); // D = (J_21)^T
            c[r][s] = 0.5 * j.get(2 + r, 2 + s);
        }
    }
    let p = [standard_normal(&mut rng), standard_normal(&mut rng)];
    let q = [standard_normal(&mut rng), standard_normal(&mut rng)];

    let mut spec = ProblemSpec {
        a,
        b,
        c,
        d,
        p,
        q,
        seed,
        eig_lo,
        eig_hi,
        l_computed: 0.0,
    };
    spec.l_computed = spectral_norm(&spec.mapping_matrix());
    spec.validate()?;
    Ok(spec)
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_block(m: &[[f64; 2]; 2]) -> String {
    format!(
        "[{}, {}, {}, {}]",
        fmt_float(m[0][0]),
        fmt_float(m[0][1]),
        fmt_float(m[1][0]),
        fmt_float(m[1][1])
    )
}

/// Serializes an instance to `.vigame` text: flat keys, row-major arrays,
/// 17-significant-digit floats (bit-exact on reload).
pub fn spec_to_string(spec: &ProblemSpec) -> String {
    let mut out = String::new();
    out.push_str("# monotone matrix game on the product of two 2-simplices\n");
    out.push_str("# mapping F(x) = [[A+A^T, B], [D^T, C+C^T]] x + [p; q]; blocks row-major\n");
    out.push_str(&format!("seed = {}\n", spec.seed as i64));
    out.push_str(&format!("eig_lo = {}\n", fmt_float(spec.eig_lo)));
    out.push_str(&format!("eig_hi = {}\n", fmt_float(spec.eig_hi)));
    out.push_str(&format!("l_computed = {}\n", fmt_float(spec.l_computed)));
    out.push_str(&format!("a = {}\n", fmt_block(&spec.a)));
    out.push_str(&format!("b = {}\n", fmt_block(&spec.b)));
    out.push_str(&format!("c = {}\n", fmt_block(&spec.c)));
    out.push_str(&format!("d = {}\n", fmt_block(&spec.d)));
    out.push_str(&format!(
        "p = [{}, {}]\n",
        fmt_float(spec.p[0]),
        fmt_float(spec.p[1])
    ));
    out.push_str(&format!(
        "q = [{}, {}]\n",
        fmt_float(spec.q[0]),
        fmt_float(spec.q[1])
    ));
    out
}

pub fn save_spec(spec: &ProblemSpec, path: &Path) -> Result<()> {
    std::fs::write(path, spec_to_string(spec)).map_err(|e| Error::io(path, e))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    seed: i64,
    eig_lo: f64,
    eig_hi: f64,
    l_computed: f64,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
    p: Vec<f64>,
    q: Vec<f64>,
}

fn block_from(name: &str, v: &[f64]) -> Result<[[f64; 2]; 2]> {
    if v.len() != 4 {
        return Err(Error::Parse(format!(
            "field `{name}` must hold exactly 4 row-major entries, got {}",
            v.len()
        )));
    }
    Ok([[v[0], v[1]], [v[2], v[3]]])
}

/// Parses `.vigame` text; errors name the offending field.
pub fn spec_from_str(text: &str) -> Result<ProblemSpec> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let pair = |name: &str, v: &Vec<f64>| -> Result<[f64; 2]> {
        if v.len() != 2 {
            return Err(Error::Parse(format!(
                "field `{name}` must hold exactly 2 entries, got {}",
                v.len()
            )));
        }
        Ok([v[0], v[1]])
    };
    let spec = ProblemSpec {
        a: block_from("a", &raw.a)?,
        b: block_from("b", &raw.b)?,
        c: block_from("c", &raw.c)?,
        d: block_from("d", &raw.d)?,
        p: pair("p", &raw.p)?,
        q: pair("q", &raw.q)?,
        seed: raw.seed as u64,
        eig_lo: raw.eig_lo,
        eig_hi: raw.eig_hi,
        l_computed: raw.l_computed,
    };
    spec.validate()?;
    Ok(spec)
}

/// Loads and validates a `.vigame` file.
pub fn load_spec(path: &Path) -> Result<ProblemSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    spec_from_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::Vector;

    #[test]
    fn pennies_mapping_and_equilibrium() {
        let spec = matching_pennies();
        let m = spec.mapping_matrix();
        let want = [
            [0.0, 0.0, 1.0, -1.0],
            [0.0, 0.0, -1.0, 1.0],
            [-1.0, 1.0, 0.0, 0.0],
            [1.0, -1.0, 0.0, 0.0],
        ];
        for (i, row) in want.iter().enumerate() {
            for (j, &w) in row.iter().enumerate() {
                assert_eq!(m.get(i, j), w);
                // symmetric part is exactly zero
                assert_eq!(m.get(i, j) + m.get(j, i), 0.0);
            }
        }
        assert!((spec.l_computed - 2.0).abs() < 1e-9);
        let p = spec.to_problem().unwrap();
        let f = p.eval_mapping(&p.set().uniform_point()).unwrap();
        assert!(f.coords().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn generation_is_bit_reproducible() {
        let a = generate_game(42, 0.0, 100.0).unwrap();
        let b = generate_game(42, 0.0, 100.0).unwrap();
        assert_eq!(a, b);
        let c = generate_game(43, 0.0, 100.0).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generated_spectrum_stays_in_range() {
        for seed in [1, 42, 777] {
            let spec = generate_game(seed, 0.0, 100.0).unwrap();
            let eigs = symmetric_eigenvalues(&spec.mapping_matrix().symmetric_part());
            assert!(eigs[0] >= -tol::EIG_RANGE_SLACK, "{eigs:?}");
            assert!(eigs[3] <= 100.0 + tol::EIG_RANGE_SLACK, "{eigs:?}");
            // the skew part bounds the norm by hi + hi/2
            assert!(spec.l_computed <= 150.0 + 1e-6);
            assert!(spec.l_computed >= eigs[3] - 1e-6);
        }
    }

    #[test]
    fn lipschitz_constant_matches_eigen_oracle() {
        let spec = generate_game(42, 0.0, 100.0).unwrap();
        let m = spec.mapping_matrix();
        let gram = m.transpose().matmul(&m);
        let oracle = symmetric_eigenvalues(&gram)[3].max(0.0).sqrt();
        assert!(
            (spec.l_computed - oracle).abs() <= tol::L_RECOMPUTED,
            "power iteration {} vs eigen oracle {}",
            spec.l_computed,
            oracle
        );
    }

    #[test]
    fn zero_spectrum_gives_constant_mapping() {
        let spec = generate_game(7, 0.0, 0.0).unwrap();
        assert!(spec.mapping_matrix().as_slice().iter().all(|&v| v == 0.0));
        assert_eq!(spec.l_computed, 0.0);
        let p = spec.to_problem().unwrap();
        let f = p
            .eval_mapping(&Vector::new(vec![1.0, 0.0, 0.0, 1.0]).unwrap())
            .unwrap();
        assert_eq!(&f.coords()[..2], &spec.p);
        assert_eq!(&f.coords()[2..], &spec.q);
    }

    #[test]
    fn generate_rejects_bad_ranges() {
        assert!(matches!(
            generate_game(1, 100.0, 0.0),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            generate_game(1, -1.0, 1.0),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn save_load_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        for spec in [
            generate_game(42, 0.0, 100.0).unwrap(),
            generate_game(u64::MAX - 3, 2.5, 80.0).unwrap(),
            matching_pennies(),
        ] {
            let path = dir.path().join(format!("{}.vigame", spec.seed));
            save_spec(&spec, &path).unwrap();
            let loaded = load_spec(&path).unwrap();
            assert_eq!(spec, loaded);
            // and the serialization itself is stable
            assert_eq!(spec_to_string(&spec), spec_to_string(&loaded));
        }
    }

    #[test]
    fn parse_errors_name_the_field() {
        let spec = generate_game(5, 0.0, 10.0).unwrap();
        let text = spec_to_string(&spec);
        let missing: String = text
            .lines()
            .filter(|l| !l.starts_with("b = "))
            .collect::<Vec<_>>()
            .join("\n");
        let err = spec_from_str(&missing).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        assert!(err.to_string().contains('b'), "{err}");

        let bad: String = text
            .lines()
            .map(|l| {
                if l.starts_with("p = ") {
                    "p = [1.0]".to_string()
                } else {
                    l.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join("\n");
        let err = spec_from_str(&bad).unwrap_err();
        assert!(err.to_string().contains("`p`"), "{err}");
    }

    #[test]
    fn non_monotone_file_fails_validation() {
        let text = "\
seed = 1
eig_lo = 0.0
eig_hi = 0.0
l_computed = 2.0
a = [-1.0, 0.0, 0.0, -1.0]
b = [0.0, 0.0, 0.0, 0.0]
c = [0.0, 0.0, 0.0, 0.0]
d = [0.0, 0.0, 0.0, 0.0]
p = [0.0, 0.0]
q = [0.0, 0.0]
";
        let err = spec_from_str(text).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn mapping_gradient_matches_player_losses() {
        // central differences of the two players' losses reproduce F
        let spec = generate_game(11, 0.0, 50.0).unwrap();
        let problem = spec.to_problem().unwrap();
        let loss1 = |x: &[f64]| -> f64 {
            let x1 = &x[..2];
            let x2 = &x[2..];
            let mut v = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    v += x1[i] * spec.a[i][j] * x1[j] + x1[i] * spec.b[i][j] * x2[j];
                }
                v += spec.p[i] * x1[i];
            }
            v
        };
        let loss2 = |x: &[f64]| -> f64 {
            let x1 = &x[..2];
            let x2 = &x[2..];
            let mut v = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    v += x2[i] * spec.c[i][j] * x2[j] + x1[j] * spec.d[j][i] * x2[i];
                }
                v += spec.q[i] * x2[i];
            }
            v
        };
        let mut rng = seeded(2718);
        let h = 1e-5;
        for _ in 0..100 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen::<f64>()).collect();
            let f = problem
                .eval_mapping(&Vector::new(x.clone()).unwrap())
                .unwrap();
            for i in 0..4 {
                let mut hi = x.clone();
                let mut lo = x.clone();
                hi[i] += h;
                lo[i] -= h;
                let diff = if i < 2 {
                    (loss1(&hi) - loss1(&lo)) / (2.0 * h)
                } else {
                    (loss2(&hi) - loss2(&lo)) / (2.0 * h)
                };
                assert!(
                    (diff - f.coords()[i]).abs() < 1e-6,
                    "coordinate {i}: {} vs {}",
                    diff,
                    f.coords()[i]
                );
            }
        }
    }

    #[test]
    fn mapping_is_lipschitz_with_recorded_constant() {
        let spec = generate_game(42, 0.0, 100.0).unwrap();
        let problem = spec.to_problem().unwrap();
        let mut rng = seeded(555);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() * 2.0 - 0.5).collect();
            let y: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() * 2.0 - 0.5).collect();
            let xv = Vector::new(x).unwrap();
            let yv = Vector::new(y).unwrap();
            let fx = problem.eval_mapping(&xv).unwrap();
            let fy = problem.eval_mapping(&yv).unwrap();
            let lhs = fx.sub(&fy).norm2();
            assert!(lhs <= spec.l_computed * xv.dist2(&yv) + tol::LIPSCHITZ_SLACK);
        }
    }
}
