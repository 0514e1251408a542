//! Small dense complex matrices: Hermitian eigenvalues by cyclic Jacobi
//! rotations, inertia, Ky Fan sums and unitary frame completion.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_columns(columns: &[Vec<Complex64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged columns");
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// First `k` columns.
    pub fn leading_columns(&self, k: usize) -> CMatrix {
        let mut m = CMatrix::zeros(self.rows, k);
        for i in 0..self.rows {
            for j in 0..k {
                m[(i, j)] = self[(i, j)];
            }
        }
        m
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut m = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    m[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        m
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Largest entry of `|A^* A - I|`.
    pub fn unitarity_residual(&self) -> f64 {
        let g = self.adjoint().matmul(self);
        let mut worst = 0.0f64;
        for i in 0..g.rows {
            for j in 0..g.cols {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((g[(i, j)] - target).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Complex Hermitian matrix. Construction symmetrizes `(A + A^*)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: CMatrix,
}

/// Eigen decomposition with ascending eigenvalues; column `j` of `vectors`
/// belongs to `values[j]`.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Eigenvalue sign counts `(s^+, s^-, s^0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Inertia {
    pub plus: usize,
    pub minus: usize,
    pub zero: usize,
}

const MAX_SWEEPS: usize = 64;

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::DimensionMismatch {
                expected: m.rows,
                got: m.cols,
            });
        }
        let n = m.rows;
        let mut h = CMatrix::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                h[(i, j)] = v;
                h[(j, i)] = v.conj();
            }
        }
        Ok(HermitianMatrix { inner: h })
    }

    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        Self::new(CMatrix::from_row_major(dim, dim, data)?)
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianMatrix {
            inner: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianMatrix {
            inner: CMatrix::identity(dim),
        }
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = CMatrix::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(*d, 0.0);
        }
        HermitianMatrix { inner: m }
    }

    pub fn dim(&self) -> usize {
        self.inner.rows
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.inner
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.inner[(i, i)].re
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.diag(i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.max_abs()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut m = self.inner.clone();
        m.data.iter_mut().for_each(|v| *v *= s);
        HermitianMatrix { inner: m }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "adding matrices of different size");
        let mut m = self.inner.clone();
        m.data.iter_mut().zip(&other.inner.data).for_each(|(a, b)| *a += b);
        HermitianMatrix { inner: m }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-1.0))
    }

    /// `B^* A B`, the compression of `A` to the columns of `B`.
    pub fn compress(&self, b: &CMatrix) -> Self {
        let m = b.adjoint().matmul(&self.inner).matmul(b);
        HermitianMatrix::new(m).expect("compression is square")
    }

    /// `v^* A v`.
    pub fn quadratic_form(&self, v: &[Complex64]) -> f64 {
        let av = self.inner.matvec(v);
        v.iter().zip(&av).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Principal submatrix on the given indices.
    pub fn principal(&self, idx: &[usize]) -> Self {
        let mut m = CMatrix::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m[(a, b)] = self.inner[(i, j)];
            }
        }
        HermitianMatrix { inner: m }
    }

    /// Cyclic Jacobi eigen decomposition, eigenvalues ascending.
    ///
    /// Equal eigenvalues keep the order in which the sweep left them, so a
    /// diagonal input returns the identity basis.
    pub fn eigh(&self) -> Result<Eigen> {
        let n = self.dim();
        let mut a = self.inner.clone();
        let mut v = CMatrix::identity(n);
        let scale = a.max_abs();
        if scale == 0.0 || n == 1 {
            return Ok(Eigen {
                values: (0..n).map(|i| a[(i, i)].re).collect(),
                vectors: v,
            });
        }
        let off_norm = |a: &CMatrix| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    s += a[(i, j)].norm_sqr();
                }
            }
            s.sqrt()
        };
        let threshold = scale * f64::EPSILON * 0.5;
        let mut sweeps = 0;
        while off_norm(&a) > threshold {
            if sweeps == MAX_SWEEPS {
                return Err(Error::NoConvergence {
                    sweeps,
                    off_norm: off_norm(&a),
                });
            }
            sweeps += 1;
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
        order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
        let values = order.iter().map(|&i| diag[i]).collect();
        let mut vectors = CMatrix::zeros(n, n);
        for (col, &src) in order.iter().enumerate() {
            for row in 0..n {
                vectors[(row, col)] = v[(row, src)];
            }
        }
        Ok(Eigen { values, vectors })
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues_sorted(&self) -> Result<Vec<f64>> {
        Ok(self.eigh()?.values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues_sorted()?.first().copied().unwrap_or(f64::INFINITY))
    }

    /// `lambda_1 + ... + lambda_q`, the minimal trace over q-dimensional compressions.
    pub fn kyfan_min_sum(&self, q: usize) -> Result<f64> {
        if q == 0 || q > self.dim() {
            return Err(Error::IndexOutOfRange {
                index: q,
                max: self.dim(),
            });
        }
        Ok(self.eigenvalues_sorted()?[..q].iter().sum())
    }

    /// Default degeneracy tolerance: `1e-9` times the largest entry (1 for the zero matrix).
    pub fn default_tolerance(&self) -> f64 {
        let s = self.max_abs();
        1e-9 * if s > 0.0 { s } else { 1.0 }
    }

    pub fn inertia(&self, tol: f64) -> Result<Inertia> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("inertia tolerance must be positive, got {tol}")));
        }
        Ok(inertia_of(&self.eigenvalues_sorted()?, tol))
    }

    /// Row-major `(re, im)` pairs.
    pub fn to_pairs(&self) -> Vec<Vec<(f64, f64)>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| (self.get(i, j).re, self.get(i, j).im)).collect())
            .collect()
    }
}

pub fn inertia_of(values: &[f64], tol: f64) -> Inertia {
    let plus = values.iter().filter(|&&x| x > tol).count();
    let minus = values.iter().filter(|&&x| x < -tol).count();
    Inertia {
        plus,
        minus,
        zero: values.len() - plus - minus,
    }
}

/// One Jacobi rotation annihilating `a[p][q]`; accumulates `v <- v U`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let n = a.rows;
    // Phase e^{-i phi} turns the pivot block real symmetric.
    let phase = apq.conj() / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // U restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]].
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = -phase * s;
    let u_qq = phase * c;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Candidates whose residual after projection falls below this are skipped.
const PARALLEL_CUTOFF: f64 = 1e-6;

/// Unitary matrix whose last column is `last_column / |last_column|`; the other
/// columns complete it from `e_1, e_2, ...` in index order by Gram–Schmidt.
pub fn gram_schmidt_frame(last_column: &[Complex64]) -> Result<CMatrix> {
    let n = last_column.len();
    let len = norm(last_column);
    if len == 0.0 || !len.is_finite() {
        return Err(Error::ZeroVector);
    }
    let last: Vec<Complex64> = last_column.iter().map(|z| z / len).collect();
    let mut basis: Vec<Vec<Complex64>> = vec![last.clone()];
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for e in 0..n {
        if columns.len() + 1 == n {
            break;
        }
        let mut cand = vec![ZERO; n];
        cand[e] = ONE;
        // Two passes of classical Gram-Schmidt keep the residual at rounding level.
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &cand);
                cand.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let r = norm(&cand);
        if r < PARALLEL_CUTOFF {
            continue;
        }
        cand.iter_mut().for_each(|x| *x /= r);
        basis.push(cand.clone());
        columns.push(cand);
    }
    columns.push(last);
    Ok(CMatrix::from_columns(&columns))
}
