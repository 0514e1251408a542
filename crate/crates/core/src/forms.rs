//! Multi-indices of (0,k)-forms and the Hermitian form they induce from an
//! n x n base matrix.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::{CMatrix, HermitianMatrix};

/// Strictly increasing k-tuples of `0..n` in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiIndexBasis {
    n: usize,
    k: usize,
    indices: Vec<Vec<usize>>,
    position: HashMap<Vec<usize>, usize>,
}

impl MultiIndexBasis {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidArgument(format!("degree {k} exceeds dimension {n}")));
        }
        let mut indices = Vec::new();
        let mut current = Vec::with_capacity(k);
        combinations(n, k, 0, &mut current, &mut indices);
        let position = indices.iter().cloned().enumerate().map(|(i, j)| (j, i)).collect();
        Ok(MultiIndexBasis { n, k, indices, position })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[Vec<usize>] {
        &self.indices
    }

    pub fn position(&self, tuple: &[usize]) -> Option<usize> {
        self.position.get(tuple).copied()
    }

    /// `u_{jK} = sign(J; jK) u_J`: the sign of the permutation sorting `(j, K)`
    /// into `J`, or 0 when `j` is in `K` or the sorted tuple is not `J`.
    pub fn sign(j_tuple: &[usize], j: usize, k_tuple: &[usize]) -> i32 {
        match insert_sorted(j, k_tuple) {
            Some((sorted, sign)) if sorted == j_tuple => sign,
            _ => 0,
        }
    }
}

fn combinations(n: usize, k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if current.len() == k {
        out.push(current.clone());
        return;
    }
    for i in start..n {
        if n - i < k - current.len() {
            break;
        }
        current.push(i);
        combinations(n, k, i + 1, current, out);
        current.pop();
    }
}

/// Sorted `(j, K)` and the sign `(-1)^{#{l in K : l < j}}`; `None` if `j` is in `K`.
fn insert_sorted(j: usize, k_tuple: &[usize]) -> Option<(Vec<usize>, i32)> {
    if k_tuple.contains(&j) {
        return None;
    }
    let before = k_tuple.iter().filter(|&&l| l < j).count();
    let mut sorted = k_tuple.to_vec();
    sorted.insert(before, j);
    Some((sorted, if before % 2 == 0 { 1 } else { -1 }))
}

/// The form `u -> Σ'_{|K|=k-1} Σ_ij A_ij u_{iK} conj(u_{jK}) - (Σ_{j<q_o} A_jj) |u|^2`
/// on k-form coefficients. Entry `(J, J')` of `matrix` is the coefficient of
/// `u_J conj(u_J')`.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedForm {
    pub base: HermitianMatrix,
    pub k: usize,
    pub q_o: usize,
    pub basis: MultiIndexBasis,
    pub matrix: HermitianMatrix,
}

impl InducedForm {
    pub fn min_eigenvalue(&self) -> Result<f64> {
        min_eigenvalue(self)
    }

    /// Direct evaluation of the defining sum, without the assembled matrix.
    pub fn evaluate_sum(&self, u: &[Complex64]) -> f64 {
        let n = self.base.dim();
        let lower = MultiIndexBasis::new(n, self.k - 1).expect("k <= n");
        let coeff = |i: usize, k_tuple: &[usize]| -> Complex64 {
            match insert_sorted(i, k_tuple) {
                Some((j, sign)) => u[self.basis.position(&j).expect("basis tuple")] * sign as f64,
                None => Complex64::new(0.0, 0.0),
            }
        };
        let mut total = Complex64::new(0.0, 0.0);
        for k_tuple in lower.indices() {
            for i in 0..n {
                let ui = coeff(i, k_tuple);
                if ui.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    total += self.base.get(i, j) * ui * coeff(j, k_tuple).conj();
                }
            }
        }
        let trace: f64 = (0..self.q_o).map(|j| self.base.diag(j)).sum();
        let norm: f64 = u.iter().map(|c| c.norm_sqr()).sum();
        total.re - trace * norm
    }
}

/// Assembles the induced form of `base` on k-forms (`1 <= k <= n`, `q_o <= n`).
pub fn induced_form(base: &HermitianMatrix, k: usize, q_o: usize) -> Result<InducedForm> {
    let n = base.dim();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, max: n });
    }
    if q_o > n {
        return Err(Error::IndexOutOfRange { index: q_o, max: n });
    }
    let basis = MultiIndexBasis::new(n, k)?;
    let lower = MultiIndexBasis::new(n, k - 1)?;
    let dim = basis.len();
    let mut m = CMatrix::zeros(dim, dim);
    for k_tuple in lower.indices() {
        let slots: Vec<(usize, usize, f64)> = (0..n)
            .filter_map(|i| {
                insert_sorted(i, k_tuple).map(|(j, sign)| (i, basis.position(&j).expect("basis tuple"), sign as f64))
            })
            .collect();
        for &(i, a, si) in &slots {
            for &(j, b, sj) in &slots {
                m[(a, b)] += base.get(i, j) * (si * sj);
            }
        }
    }
    let trace: f64 = (0..q_o).map(|j| base.diag(j)).sum();
    for a in 0..dim {
        m[(a, a)] -= Complex64::new(trace, 0.0);
    }
    Ok(InducedForm {
        base: base.clone(),
        k,
        q_o,
        basis,
        matrix: HermitianMatrix::new(m)?,
    })
}

/// Smallest eigenvalue of the induced matrix; `form >= c |u|^2` for all `u`
/// exactly when this is `>= c`.
pub fn min_eigenvalue(form: &InducedForm) -> Result<f64> {
    form.matrix.min_eigenvalue()
}

/// Smallest eigenvalue of the induced form restricted to tangential forms,
/// the span of `u_J` with the normal index `n-1` not in `J`. There are no
/// tangential n-forms, so `k = n` gives `+inf`.
pub fn tangential_min_eigenvalue(base: &HermitianMatrix, k: usize, q_o: usize) -> Result<f64> {
    let form = induced_form(base, k, q_o)?;
    let n = base.dim();
    if k == n {
        return Ok(f64::INFINITY);
    }
    let keep: Vec<usize> = form
        .basis
        .indices()
        .iter()
        .enumerate()
        .filter(|(_, j)| !j.contains(&(n - 1)))
        .map(|(i, _)| i)
        .collect();
    form.matrix.principal(&keep).min_eigenvalue()
}

/// Embeds an (n-1) x (n-1) tangential matrix into n x n with a zero normal row and column.
pub fn pad_normal(levi: &HermitianMatrix) -> HermitianMatrix {
    let m = levi.dim();
    let mut out = CMatrix::zeros(m + 1, m + 1);
    for i in 0..m {
        for j in 0..m {
            out[(i, j)] = levi.get(i, j);
        }
    }
    HermitianMatrix::new(out).expect("square")
}
