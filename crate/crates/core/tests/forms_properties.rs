mod common;

use common::{c, conjugate, hermitian, integer_hermitian, max_diff, unitary};
use levicert::forms::{induced_form, pad_normal, tangential_min_eigenvalue, MultiIndexBasis};
use levicert::{CMatrix, HermitianMatrix};
use num_complex::Complex64;
use proptest::prelude::*;

fn block_diag(blocks: &[&CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                out[(off + i, off + j)] = b[(i, j)];
            }
        }
        off += b.rows();
    }
    out
}

fn tangential_spectrum(a: &HermitianMatrix, k: usize, q_o: usize) -> Vec<f64> {
    let form = induced_form(a, k, q_o).unwrap();
    let n = a.dim();
    let keep: Vec<usize> = form
        .basis
        .indices()
        .iter()
        .enumerate()
        .filter(|(_, j)| !j.contains(&(n - 1)))
        .map(|(i, _)| i)
        .collect();
    form.matrix.principal(&keep).eigenvalues_sorted().unwrap()
}

fn unit(len: usize, i: usize, scale: Complex64) -> Vec<Complex64> {
    let mut u = vec![c(0.0, 0.0); len];
    u[i] = scale;
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tangential_block_is_covariant(a in hermitian(5), u1 in unitary(2), u2 in unitary(2), k in 1usize..5) {
        let q_o = 2;
        let u = block_diag(&[&u1, &u2, &CMatrix::identity(1)]);
        let b = conjugate(&a, &u);
        let before = tangential_spectrum(&a, k, q_o);
        let after = tangential_spectrum(&b, k, q_o);
        prop_assert!(max_diff(&before, &after) < 1e-10 * (1.0 + a.max_abs()));
        let full_a = induced_form(&a, k, q_o).unwrap().matrix.eigenvalues_sorted().unwrap();
        let full_b = induced_form(&b, k, q_o).unwrap().matrix.eigenvalues_sorted().unwrap();
        prop_assert!(max_diff(&full_a, &full_b) < 1e-10 * (1.0 + a.max_abs()));
    }

    #[test]
    fn induced_form_is_linear(a in integer_hermitian(4), b in integer_hermitian(4), k in 1usize..=4, q_o in 0usize..=4) {
        let sum = induced_form(&a.add(&b), k, q_o).unwrap().matrix;
        let parts = induced_form(&a, k, q_o).unwrap().matrix.add(&induced_form(&b, k, q_o).unwrap().matrix);
        prop_assert_eq!(sum.sub(&parts).max_abs(), 0.0);
    }

    #[test]
    fn entries_match_polarized_sum(a in hermitian(4), k in 1usize..=3, q_o in 0usize..=3) {
        let form = induced_form(&a, k, q_o).unwrap();
        let len = form.basis.len();
        let one = c(1.0, 0.0);
        for p in 0..len {
            let d = form.evaluate_sum(&unit(len, p, one));
            prop_assert!((d - form.matrix.diag(p)).abs() < 1e-12);
            for q in 0..len {
                if p == q {
                    continue;
                }
                let dq = form.evaluate_sum(&unit(len, q, one));
                let mut v = unit(len, p, one);
                v[q] = one;
                let re = (form.evaluate_sum(&v) - d - dq) / 2.0;
                v[q] = c(0.0, 1.0);
                // Q(e_p + i e_q) = M_pp + M_qq + 2 Im M_pq
                let im = (form.evaluate_sum(&v) - d - dq) / 2.0;
                let m = form.matrix.get(p, q);
                prop_assert!((m.re - re).abs() < 1e-12 && (m.im - im).abs() < 1e-12, "{m} vs {re} + {im}i");
            }
        }
    }

    #[test]
    fn tangential_minimum_is_ky_fan_margin(l in hermitian(4), k in 1usize..=4, q_o in 0usize..=4) {
        let e = l.eigenvalues_sorted().unwrap();
        let trace: f64 = (0..q_o).map(|j| l.diag(j)).sum();
        let expected: f64 = e[..k].iter().sum::<f64>() - trace;
        let got = tangential_min_eigenvalue(&pad_normal(&l), k, q_o).unwrap();
        prop_assert!((got - expected).abs() < 1e-10 * (1.0 + l.max_abs()));
    }
}

#[test]
fn top_degree_has_no_tangential_forms() {
    let l = HermitianMatrix::from_diag(&[1.0, -2.0, 3.0]);
    assert_eq!(tangential_min_eigenvalue(&pad_normal(&l), 4, 1).unwrap(), f64::INFINITY);
}

#[test]
fn basis_signs_follow_sorting() {
    assert_eq!(MultiIndexBasis::sign(&[0, 1, 3], 3, &[0, 1]), 1);
    assert_eq!(MultiIndexBasis::sign(&[0, 1, 3], 0, &[1, 3]), 1);
    assert_eq!(MultiIndexBasis::sign(&[0, 1, 3], 1, &[0, 3]), -1);
    assert_eq!(MultiIndexBasis::sign(&[0, 1, 3], 1, &[1, 3]), 0);
    let b = MultiIndexBasis::new(5, 3).unwrap();
    assert_eq!(b.len(), 10);
    for (i, j) in b.indices().iter().enumerate() {
        assert_eq!(b.position(j), Some(i));
    }
}
