//! Small dense complex linear algebra.
//!
//! Walk matrices are at most 128×128, so everything here is a plain
//! row-major `Vec` with O(n³) routines and no blocking. The two nontrivial
//! pieces are a closed-form 2×2 singular value decomposition (the only SVDs
//! the crate ever needs are on vertex-to-vertex blocks) and a cyclic Jacobi
//! eigensolver for Hermitian matrices, which backs the unitary spectrum
//! computation.

use std::ops::{Index, IndexMut};

use thiserror::Error;

pub use num_complex::Complex64 as C64;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("eigensolver did not converge: off-diagonal residual {0:.3e}")]
    NonConvergence(f64),
}

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> CMat {
        CMat {
            dim,
            data: vec![C64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> CMat {
        let mut m = CMat::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::ONE;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions must match");
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMat {
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "vector length must match dimension");
        let n = self.dim;
        let mut out = vec![C64::ZERO; n];
        for i in 0..n {
            let mut acc = C64::ZERO;
            for j in 0..n {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn scale(&self, factor: C64) -> CMat {
        CMat {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Largest entrywise absolute value.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimensions must match");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖U†U − I‖_max`; zero for exactly unitary matrices.
    pub fn unitarity_residual(&self) -> f64 {
        self.adjoint().mul(self).max_abs_diff(&CMat::identity(self.dim))
    }

    /// The 2×2 block with rows `2·brow..` and columns `2·bcol..`.
    pub fn block2(&self, brow: usize, bcol: usize) -> Mat2 {
        Mat2([
            [self[(2 * brow, 2 * bcol)], self[(2 * brow, 2 * bcol + 1)]],
            [
                self[(2 * brow + 1, 2 * bcol)],
                self[(2 * brow + 1, 2 * bcol + 1)],
            ],
        ])
    }

    pub fn set_block2(&mut self, brow: usize, bcol: usize, block: Mat2) {
        for r in 0..2 {
            for c in 0..2 {
                self[(2 * brow + r, 2 * bcol + c)] = block.0[r][c];
            }
        }
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Complex 2×2 matrix in row-major order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Mat2 {
        Mat2([[C64::ONE, C64::ZERO], [C64::ZERO, C64::ONE]])
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    pub fn adjoint(&self) -> Mat2 {
        let a = &self.0;
        Mat2([
            [a[0][0].conj(), a[1][0].conj()],
            [a[0][1].conj(), a[1][1].conj()],
        ])
    }

    pub fn mulvec(&self, v: [C64; 2]) -> [C64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        worst
    }

    pub fn unitarity_residual(&self) -> f64 {
        self.adjoint().mul(self).max_abs_diff(&Mat2::identity())
    }
}

/// Singular value decomposition of a 2×2 matrix: `B = Σ_k σ_k |left_k⟩⟨right_k|`.
///
/// `sigma` is sorted descending; both vector pairs are orthonormal. Each left
/// vector is normalized so its largest-magnitude coordinate is real positive,
/// with the compensating phase pushed into the matching right vector, which
/// makes the factorization deterministic.
#[derive(Clone, Copy, Debug)]
pub struct Svd2 {
    pub sigma: [f64; 2],
    pub left: [[C64; 2]; 2],
    pub right: [[C64; 2]; 2],
}

fn vec2_norm(v: [C64; 2]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

fn vec2_scale(v: [C64; 2], s: C64) -> [C64; 2] {
    [v[0] * s, v[1] * s]
}

/// Unit vector orthogonal to `v` (assumed unit): the 2-dimensional Hodge dual.
fn vec2_perp(v: [C64; 2]) -> [C64; 2] {
    [-v[1].conj(), v[0].conj()]
}

/// Rotates `u` so its largest-magnitude coordinate is real positive and
/// applies the compensating phase to `v`, preserving `|u⟩⟨v|`.
fn fix_phase(u: &mut [C64; 2], v: &mut [C64; 2]) {
    let k = if u[0].norm() >= u[1].norm() { 0 } else { 1 };
    let mag = u[k].norm();
    if mag == 0.0 {
        return;
    }
    let undo = (u[k] / mag).conj();
    *u = vec2_scale(*u, undo);
    *v = vec2_scale(*v, undo);
    u[k] = C64::new(u[k].norm(), 0.0);
}

/// Closed-form 2×2 SVD via the Gram matrix `G = B†B`.
///
/// The small singular value comes from `σ₁σ₂ = |det B|` rather than from the
/// Gram eigenvalue: the Gram determinant cancels catastrophically when
/// `σ₂ ≪ σ₁`, and block-rank decisions at the `1e−8` cutoff need σ₂ accurate
/// near zero.
pub fn svd2(b: &Mat2) -> Svd2 {
    let e1 = [C64::ONE, C64::ZERO];
    let scale = b.max_abs().max(1.0);
    let g = b.adjoint().mul(b);
    let g11 = g.0[0][0].re;
    let g22 = g.0[1][1].re;
    let g12 = g.0[0][1];
    let disc = ((g11 - g22).powi(2) + 4.0 * g12.norm_sqr()).sqrt();
    let lam_plus = (0.5 * ((g11 + g22) + disc)).max(0.0);
    let sigma1 = lam_plus.sqrt();
    let sigma2 = if sigma1 > 0.0 {
        (b.det().norm() / sigma1).min(sigma1)
    } else {
        0.0
    };

    // Top right-singular vector: eigenvector of G for λ₊ from whichever
    // adjugate column is better conditioned. Both vanish only when G is a
    // multiple of the identity, where any orthonormal basis serves.
    let cand1 = [g12, C64::new(lam_plus - g11, 0.0)];
    let cand2 = [C64::new(lam_plus - g22, 0.0), g12.conj()];
    let (n1, n2) = (vec2_norm(cand1), vec2_norm(cand2));
    let v1 = if n1.max(n2) <= 1e-14 * scale * scale {
        e1
    } else if n1 >= n2 {
        vec2_scale(cand1, C64::new(1.0 / n1, 0.0))
    } else {
        vec2_scale(cand2, C64::new(1.0 / n2, 0.0))
    };
    let v2 = vec2_perp(v1);

    let mut u1 = if sigma1 > 1e-12 * scale {
        let w = b.mulvec(v1);
        vec2_scale(w, C64::new(1.0 / vec2_norm(w), 0.0))
    } else {
        e1
    };
    // In two dimensions the second left vector is forced to be the
    // complement of the first; only its phase must be matched to B·v₂.
    let mut u2 = vec2_perp(u1);
    let w2 = b.mulvec(v2);
    let z = u2[0].conj() * w2[0] + u2[1].conj() * w2[1];
    if z.norm() > 1e-14 * scale {
        u2 = vec2_scale(u2, z / z.norm());
    }

    let mut v1 = v1;
    let mut v2 = v2;
    fix_phase(&mut u1, &mut v1);
    fix_phase(&mut u2, &mut v2);
    Svd2 {
        sigma: [sigma1, sigma2],
        left: [u1, u2],
        right: [v1, v2],
    }
}

fn off_diagonal_norm(m: &CMat) -> f64 {
    let n = m.dim();
    let mut sum = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            sum += m[(p, q)].norm_sqr();
        }
    }
    (2.0 * sum).sqrt()
}

fn frobenius(m: &CMat) -> f64 {
    let n = m.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            sum += m[(i, j)].norm_sqr();
        }
    }
    sum.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns the (unsorted) real eigenvalues and a unitary whose columns are
/// the matching eigenvectors. The input is symmetrized first, so tiny
/// non-Hermitian noise is tolerated.
pub fn eig_hermitian(a: &CMat) -> Result<(Vec<f64>, CMat), LinalgError> {
    let n = a.dim();
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in 0..i {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    let mut v = CMat::identity(n);
    let scale = frobenius(&m).max(f64::MIN_POSITIVE);
    let target = 1e-14 * scale;
    let mut off = off_diagonal_norm(&m);
    for _sweep in 0..60 {
        if off <= target {
            let vals = (0..n).map(|i| m[(i, i)].re).collect();
            return Ok((vals, v));
        }
        // Entries this small cannot matter for the sweep's residual target.
        let skip = target / (2.0 * n as f64);
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.norm() <= skip {
                    continue;
                }
                // Factor out the phase of the pivot, then a real Givens
                // rotation: the combined update is K = diag(e^{iφ}, 1)·J.
                let phase = apq / apq.norm();
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let kpp = phase * c;
                let kpq = phase * s;
                let kqp = C64::new(-s, 0.0);
                let kqq = C64::new(c, 0.0);
                // M ← K†MK applied as column then row updates.
                for i in 0..n {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = mip * kpp + miq * kqp;
                    m[(i, q)] = mip * kpq + miq * kqq;
                }
                for j in 0..n {
                    let mpj = m[(p, j)];
                    let mqj = m[(q, j)];
                    m[(p, j)] = kpp.conj() * mpj + kqp.conj() * mqj;
                    m[(q, j)] = kpq.conj() * mpj + kqq.conj() * mqj;
                }
                m[(p, q)] = C64::ZERO;
                m[(q, p)] = C64::ZERO;
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * kpp + viq * kqp;
                    v[(i, q)] = vip * kpq + viq * kqq;
                }
            }
        }
        off = off_diagonal_norm(&m);
    }
    Err(LinalgError::NonConvergence(off))
}
