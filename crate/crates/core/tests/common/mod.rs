#![allow(dead_code)]

use levicert::poly::{rational, Coeff};
use levicert::{CMatrix, HermitianMatrix, Monomial, WirtingerPoly};
use num_complex::{Complex, Complex64};
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn hermitian_from(n: usize, raw: &[f64]) -> HermitianMatrix {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = c(raw[2 * (i * n + i)], 0.0);
        for j in i + 1..n {
            let z = c(raw[2 * (i * n + j)], raw[2 * (i * n + j) + 1]);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianMatrix::new(m).unwrap()
}

pub fn hermitian(n: usize) -> impl Strategy<Value = HermitianMatrix> {
    prop::collection::vec(-1.0..1.0f64, 2 * n * n).prop_map(move |raw| hermitian_from(n, &raw))
}

/// Integer entries in `-3..=3`, so sums and products are exact.
pub fn integer_hermitian(n: usize) -> impl Strategy<Value = HermitianMatrix> {
    prop::collection::vec(-3i32..=3, 2 * n * n)
        .prop_map(move |raw| hermitian_from(n, &raw.iter().map(|&x| x as f64).collect::<Vec<_>>()))
}

/// Gram–Schmidt on the columns of a random complex matrix.
pub fn unitary_from(n: usize, raw: &[f64]) -> CMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| c(raw[2 * (j * n + i)], raw[2 * (j * n + i) + 1])).collect())
        .collect();
    for i in 0..n {
        for j in 0..i {
            let proj: Complex64 = cols[j].iter().zip(&cols[i]).map(|(a, b)| a.conj() * b).sum();
            let prev = cols[j].clone();
            for (x, p) in cols[i].iter_mut().zip(prev) {
                *x -= p * proj;
            }
        }
        let norm = cols[i].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[i].iter_mut() {
            *x /= norm;
        }
    }
    CMatrix::from_columns(&cols)
}

pub fn unitary(n: usize) -> impl Strategy<Value = CMatrix> {
    // keep columns away from degeneracy
    prop::collection::vec(-1.0..1.0f64, 2 * n * n)
        .prop_map(move |raw| {
            let mut raw = raw;
            for i in 0..n {
                raw[2 * (i * n + i)] += 3.0;
            }
            unitary_from(n, &raw)
        })
}

pub fn conjugate(a: &HermitianMatrix, u: &CMatrix) -> HermitianMatrix {
    a.compress(u)
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}


pub fn coeff(re: i64, im: i64, den: i64) -> Coeff {
    Complex::new(rational(re, den), rational(im, den))
}

/// Random polynomial in 3 variables with total degree at most `max_degree`.
pub fn poly_in(n: usize, max_degree: u32) -> impl Strategy<Value = WirtingerPoly> {
    let term = (
        prop::collection::vec(0u32..=2, 2 * n),
        -4i64..=4,
        -4i64..=4,
        1i64..=3,
    );
    prop::collection::vec(term, 1..6).prop_map(move |terms| {
        let terms = terms.into_iter().filter_map(|(e, re, im, den)| {
            let m = Monomial {
                z: e[..n].to_vec(),
                zbar: e[n..].to_vec(),
            };
            (m.degree() <= max_degree).then(|| (m, coeff(re, im, den)))
        });
        WirtingerPoly::from_terms(n, terms).unwrap()
    })
}

pub fn real_poly_in(n: usize, max_degree: u32) -> impl Strategy<Value = WirtingerPoly> {
    poly_in(n, max_degree).prop_map(|p| &p + &p.conj())
}

/// Random polynomial in 3 variables.
pub fn poly(max_degree: u32) -> impl Strategy<Value = WirtingerPoly> {
    poly_in(3, max_degree)
}

pub fn real_poly(max_degree: u32) -> impl Strategy<Value = WirtingerPoly> {
    real_poly_in(3, max_degree)
}
