//! Small dense square matrices and the symmetric eigensolver used by the
//! logarithmic-norm estimate. Dimensions here never exceed a handful of
//! coordinates, so everything is stored row-major in a flat `Vec`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::math;

/// Off-diagonal Frobenius norm at which a Jacobi sweep is considered done.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has wrong length");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn fill_zero(&mut self) {
        self.data.iter_mut().for_each(|x| *x = 0.0);
    }

    pub fn set_identity(&mut self) {
        self.fill_zero();
        for i in 0..self.n {
            self[(i, i)] = 1.0;
        }
    }

    pub fn copy_from(&mut self, other: &Matrix) {
        debug_assert_eq!(self.n, other.n);
        self.data.copy_from_slice(&other.data);
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut t = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `(A + Aᵀ) / 2`.
    pub fn symmetric_part(&self) -> Matrix {
        let n = self.n;
        let mut s = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] = 0.5 * (self[(i, j)] + self[(j, i)]);
            }
        }
        s
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.n);
        self.mul_into(rhs, &mut out);
        out
    }

    /// Writes `self * rhs` into `out` (which must not alias either operand).
    pub fn mul_into(&self, rhs: &Matrix, out: &mut Matrix) {
        let n = self.n;
        debug_assert_eq!(n, rhs.n);
        debug_assert_eq!(n, out.n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += self.data[i * n + k] * rhs.data[k * n + j];
                }
                out.data[i * n + j] = acc;
            }
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Eigenvalues of a symmetric matrix in ascending order (cyclic Jacobi).
    /// Returns `None` if the rotations fail to converge.
    pub fn symmetric_eigenvalues(&self) -> Option<Vec<f64>> {
        let n = self.n;
        let mut a = self.clone();
        let scale = a.data.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
        for _ in 0..JACOBI_MAX_SWEEPS {
            let off = off_diagonal_norm(&a);
            if off <= JACOBI_TOLERANCE * scale {
                let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
                eig.sort_by(|x, y| x.total_cmp(y));
                return Some(eig);
            }
            if !off.is_finite() {
                return None;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    jacobi_rotate(&mut a, p, q);
                }
            }
        }
        None
    }

    /// Largest eigenvalue of the symmetric part, i.e. the Euclidean
    /// logarithmic norm `μ₂`.
    pub fn log_norm2(&self) -> Option<f64> {
        if self.n == 2 {
            let s = self.symmetric_part();
            return Some(sym2_max_eig(s[(0, 0)], s[(0, 1)], s[(1, 1)]));
        }
        self.symmetric_part().symmetric_eigenvalues().map(|e| e[e.len() - 1])
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> Option<f64> {
        let n = self.n;
        let rows: Vec<usize> = (0..n).collect();
        block_spectral_norm(self, &rows, &rows)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.n;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    math::sqrt(s)
}

fn jacobi_rotate(a: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let app = a[(p, p)];
    let aqq = a[(q, q)];
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + math::sqrt(theta * theta + 1.0));
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / math::sqrt(t * t + 1.0);
    let s = t * c;
    let n = a.n;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
}

#[inline]
fn sym2_max_eig(a: f64, b: f64, d: f64) -> f64 {
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    mean + math::hypot(half, b)
}

/// Largest singular value of the sub-block `m[rows, cols]`.
///
/// 2x2 blocks use the closed form; larger blocks go through the Jacobi
/// eigensolver on `BᵀB`.
pub fn block_spectral_norm(m: &Matrix, rows: &[usize], cols: &[usize]) -> Option<f64> {
    if rows.len() == 2 && cols.len() == 2 {
        let a = m[(rows[0], cols[0])];
        let b = m[(rows[0], cols[1])];
        let c = m[(rows[1], cols[0])];
        let d = m[(rows[1], cols[1])];
        return Some(sv2_max(a, b, c, d));
    }
    let k = cols.len();
    let mut g = Matrix::zeros(k);
    for (ci, &i) in cols.iter().enumerate() {
        for (cj, &j) in cols.iter().enumerate() {
            g[(ci, cj)] = rows.iter().map(|&r| m[(r, i)] * m[(r, j)]).sum();
        }
    }
    g.symmetric_eigenvalues().map(|e| math::sqrt(e[k - 1].max(0.0)))
}

/// Largest singular value of `[[a, b], [c, d]]`.
#[inline]
pub fn sv2_max(a: f64, b: f64, c: f64, d: f64) -> f64 {
    // σ_max = (hypot(a+d, c-b) + hypot(a-d, b+c)) / 2
    0.5 * (math::hypot(a + d, c - b) + math::hypot(a - d, b + c))
}
