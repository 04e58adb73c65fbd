//! Small dense complex linear algebra.
//!
//! Everything here works on matrices whose side is the antenna count or a
//! multicast group size, so the routines favour clarity over blocking:
//! a cyclic Jacobi eigensolver for Hermitian matrices and Householder
//! reflections for orthogonal complements.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
use num_traits::{Float, Zero};

/// `a^H b` for two equal-length complex vectors.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    norm_sqr(v).sqrt()
}

/// `exp(sign * 2 pi i k / n)`, exact when the angle is a multiple of a
/// quarter turn.
pub fn unit_root(k: usize, n: usize, sign: f64) -> Complex64 {
    let k = k % n;
    if (4 * k) % n == 0 {
        let quarter = Complex64::new(0.0, sign.signum());
        return match 4 * k / n {
            0 => Complex64::new(1.0, 0.0),
            1 => quarter,
            2 => Complex64::new(-1.0, 0.0),
            _ => -quarter,
        };
    }
    Complex64::from_polar(1.0, sign * core::f64::consts::TAU * k as f64 / n as f64)
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// `v v^H`.
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, rhs: &CMatrix) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn scale(&mut self, s: f64) {
        for z in &mut self.data {
            *z *= s;
        }
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in descending
/// order and eigenvectors stored as the matching columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Cyclic Jacobi iteration. Only the Hermitian part of `a` is used.
    pub fn new(a: &CMatrix) -> Self {
        assert_eq!(a.rows, a.cols, "eigen-decomposition needs a square matrix");
        let n = a.rows;
        let mut m = CMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
        let mut v = CMatrix::identity(n);
        let scale = m.data.iter().map(|z| z.norm_sqr()).sum::<f64>();

        for _sweep in 0..64 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| m[(i, j)].norm_sqr())
                .sum();
            if off <= f64::EPSILON * f64::EPSILON * scale || off == 0.0 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut m, &mut v, p, q);
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| m[(y, y)].re.total_cmp(&m[(x, x)].re));
        let values = order.iter().map(|&i| m[(i, i)].re).collect();
        let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
        Self { values, vectors }
    }
}

/// One Jacobi rotation zeroing `m[(p, q)]`: `m <- G^H m G`, `v <- v G`,
/// where `G = diag(1, e^{-i phi}) R(theta)` on the `(p, q)` plane.
fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let beta = m[(p, q)];
    let abs_beta = beta.norm();
    if abs_beta == 0.0 {
        return;
    }
    let phase = beta / abs_beta;
    let alpha = m[(p, p)].re;
    let gamma = m[(q, q)].re;
    let theta = 0.5 * Float::atan2(2.0 * abs_beta, alpha - gamma);
    let (s, c) = (theta.sin(), theta.cos());
    let e = phase.conj();
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(-s, 0.0);
    let g_qp = e * s;
    let g_qq = e * c;
    let n = m.rows;

    for i in 0..n {
        let (a, b) = (m[(i, p)], m[(i, q)]);
        m[(i, p)] = a * g_pp + b * g_qp;
        m[(i, q)] = a * g_pq + b * g_qq;
        let (a, b) = (v[(i, p)], v[(i, q)]);
        v[(i, p)] = a * g_pp + b * g_qp;
        v[(i, q)] = a * g_pq + b * g_qq;
    }
    for j in 0..n {
        let (a, b) = (m[(p, j)], m[(q, j)]);
        m[(p, j)] = g_pp.conj() * a + g_qp.conj() * b;
        m[(q, j)] = g_pq.conj() * a + g_qq.conj() * b;
    }
    m[(p, q)] = Complex64::zero();
    m[(q, p)] = Complex64::zero();
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;
}

/// Singular values of the matrix whose columns are `vectors`, descending.
pub fn singular_values(vectors: &[&[Complex64]]) -> Vec<f64> {
    let m = vectors.len();
    let gram = CMatrix::from_fn(m, m, |i, j| inner(vectors[i], vectors[j]));
    HermitianEigen::new(&gram)
        .values
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect()
}

/// A unit vector of `C^dim` orthogonal to every vector in `vectors`.
///
/// Computed as the last column of the unitary factor of a Householder QR
/// of `[v_1 .. v_m]`, so the orthogonality residual is at rounding level
/// regardless of the conditioning of the spanned set. With `m = dim - 1`
/// independent vectors the complement is one-dimensional and the result is
/// unique up to phase.
pub fn orthogonal_complement_vector(vectors: &[&[Complex64]], dim: usize) -> Vec<Complex64> {
    let m = vectors.len();
    assert!(m < dim, "complement of {m} vectors in dimension {dim} is empty");
    let mut a = CMatrix::from_fn(dim, m, |i, j| vectors[j][i]);
    let mut reflectors: Vec<Vec<Complex64>> = Vec::with_capacity(m);

    for k in 0..m {
        let x: Vec<Complex64> = (k..dim).map(|i| a[(i, k)]).collect();
        let xn = norm(&x);
        let mut w = vec![Complex64::zero(); dim];
        if xn > 0.0 {
            let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { Complex64::new(1.0, 0.0) };
            let alpha = -phase * xn;
            for (i, xi) in x.iter().enumerate() {
                w[k + i] = *xi;
            }
            w[k] -= alpha;
            let wn = norm(&w);
            if wn > 0.0 {
                for z in &mut w {
                    *z /= wn;
                }
                apply_reflector(&mut a, &w, k);
            }
        }
        reflectors.push(w);
    }

    let mut q = vec![Complex64::zero(); dim];
    q[dim - 1] = Complex64::new(1.0, 0.0);
    for w in reflectors.iter().rev() {
        let proj = inner(w, &q);
        for (qi, wi) in q.iter_mut().zip(w) {
            *qi -= *wi * proj * 2.0;
        }
    }
    q
}

fn apply_reflector(a: &mut CMatrix, w: &[Complex64], from_col: usize) {
    for j in from_col..a.cols {
        let col: Vec<Complex64> = a.column(j);
        let proj = inner(w, &col);
        for i in 0..a.rows {
            a[(i, j)] -= w[i] * proj * 2.0;
        }
    }
}

/// Euclidean projection of `y` onto the probability simplex.
pub fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut sorted: Vec<f64> = y.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cumsum += s;
        let candidate = (cumsum - 1.0) / (i + 1) as f64;
        if s - candidate > 0.0 {
            tau = candidate;
        }
    }
    y.iter().map(|&v| (v - tau).max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn jacobi_reconstructs_hermitian_matrix() {
        let a = CMatrix::from_fn(3, 3, |i, j| match (i, j) {
            (0, 0) => c(2.0, 0.0),
            (1, 1) => c(-1.0, 0.0),
            (2, 2) => c(0.5, 0.0),
            (0, 1) => c(0.3, 0.7),
            (1, 0) => c(0.3, -0.7),
            (0, 2) => c(-1.1, 0.2),
            (2, 0) => c(-1.1, -0.2),
            (1, 2) => c(0.0, 0.9),
            (2, 1) => c(0.0, -0.9),
            _ => unreachable!(),
        });
        let eig = HermitianEigen::new(&a);
        assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        let v = &eig.vectors;
        let lambda = CMatrix::from_fn(3, 3, |i, j| if i == j { c(eig.values[i], 0.0) } else { c(0.0, 0.0) });
        let rebuilt = v.mul(&lambda).mul(&v.adjoint());
        assert!(rebuilt.max_abs_diff(&a) < 1e-12);
        assert!(v.adjoint().mul(v).max_abs_diff(&CMatrix::identity(3)) < 1e-12);
        let trace: f64 = eig.values.iter().sum();
        assert!((trace - 1.5).abs() < 1e-12);
    }

    #[test]
    fn jacobi_on_diagonal_input_is_exact() {
        let a = CMatrix::from_fn(2, 2, |i, j| if i == j { c(i as f64 + 1.0, 0.0) } else { c(0.0, 0.0) });
        let eig = HermitianEigen::new(&a);
        assert_eq!(eig.values, vec![2.0, 1.0]);
    }

    #[test]
    fn complement_is_orthogonal_and_unit() {
        let h1 = [c(0.4, -1.2), c(0.9, 0.1), c(-0.3, 0.5)];
        let h2 = [c(1.0, 0.0), c(0.2, 0.2), c(0.7, -0.6)];
        let u = orthogonal_complement_vector(&[&h1, &h2], 3);
        assert!((norm(&u) - 1.0).abs() < 1e-14);
        assert!(inner(&h1, &u).norm() < 1e-15);
        assert!(inner(&h2, &u).norm() < 1e-15);
    }

    #[test]
    fn complement_of_nothing_in_one_dimension() {
        let u = orthogonal_complement_vector(&[], 1);
        assert_eq!(u, vec![c(1.0, 0.0)]);
    }

    #[test]
    fn singular_values_of_orthogonal_columns() {
        let a = [c(3.0, 0.0), c(0.0, 0.0)];
        let b = [c(0.0, 0.0), c(0.0, 2.0)];
        let s = singular_values(&[&a, &b]);
        assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn simplex_projection() {
        assert_eq!(project_simplex(&[0.2, 0.8]), vec![0.2, 0.8]);
        let p = project_simplex(&[2.0, 0.0, -1.0]);
        assert_eq!(p, vec![1.0, 0.0, 0.0]);
        let p = project_simplex(&[0.5, 0.5, 0.5]);
        assert!(p.iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-15));
    }
}
