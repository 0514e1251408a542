mod common;

use common::{c, conjugate, hermitian, max_diff, unitary};
use levicert::hermitian::{gram_schmidt_frame, inertia_of};
use levicert::HermitianMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

/// Trigonometric roots of the characteristic cubic of a 3x3 Hermitian matrix.
fn cubic_eigenvalues(a: &HermitianMatrix) -> Vec<f64> {
    let p = a.trace() / 3.0;
    let b = a.sub(&HermitianMatrix::identity(3).scaled(p));
    let e = |i: usize, j: usize| b.get(i, j);
    let det: Complex64 = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
        + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
    let frob: f64 = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| e(i, j).norm_sqr()).sum();
    let r = (frob / 6.0).sqrt();
    if r == 0.0 {
        return vec![p; 3];
    }
    let phi = (det.re / 2.0 / r.powi(3)).clamp(-1.0, 1.0).acos() / 3.0;
    let mut v: Vec<f64> = (0..3)
        .map(|k| p + 2.0 * r * (phi + 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

fn residual(a: &HermitianMatrix, lambda: f64, v: &[Complex64]) -> f64 {
    let av = a.as_matrix().matvec(v);
    av.iter().zip(v).map(|(x, y)| (x - y * lambda).norm_sqr()).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn three_by_three_matches_cubic_roots(a in hermitian(3)) {
        let got = a.eigenvalues_sorted().unwrap();
        let want = cubic_eigenvalues(&a);
        prop_assert!(max_diff(&got, &want) < 1e-9, "{:?} vs {:?}", got, want);
    }

    #[test]
    fn eigenpairs_have_small_residuals(n in 1usize..=6, seed in any::<u64>()) {
        let a = random(n, seed);
        let e = a.eigh().unwrap();
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(e.vectors.unitarity_residual() < 1e-10);
        for (k, lambda) in e.values.iter().enumerate() {
            prop_assert!(residual(&a, *lambda, &e.vectors.column(k)) <= 1e-10 * a.max_abs().max(1.0));
        }
    }

    #[test]
    fn shift_moves_every_eigenvalue(a in hermitian(5), t in -3.0..3.0f64) {
        let base = a.eigenvalues_sorted().unwrap();
        let shifted = a.add(&HermitianMatrix::identity(5).scaled(t)).eigenvalues_sorted().unwrap();
        let want: Vec<f64> = base.iter().map(|x| x + t).collect();
        prop_assert!(max_diff(&shifted, &want) <= 1e-10);
    }

    #[test]
    fn kyfan_complement(a in hermitian(5), q in 1usize..5) {
        let low = a.kyfan_min_sum(q).unwrap();
        // the dim - q largest eigenvalues of A are minus the smallest of -A
        let high = -a.scaled(-1.0).kyfan_min_sum(5 - q).unwrap();
        prop_assert!((low - (a.trace() - high)).abs() <= 1e-10);
    }

    #[test]
    fn kyfan_bounds_random_compressions(a in hermitian(5), u in unitary(5), q in 1usize..5) {
        let frame = u.leading_columns(q);
        let trace = a.compress(&frame).trace();
        prop_assert!(a.kyfan_min_sum(q).unwrap() <= trace + 1e-10);
    }

    #[test]
    fn inertia_is_unitarily_invariant(d in prop::collection::vec(prop_oneof![Just(0.0), 0.5..2.0f64, -2.0..-0.5f64], 5), u in unitary(5)) {
        let a = HermitianMatrix::from_diag(&d);
        let b = conjugate(&a, &u);
        let tol = 1e-8;
        prop_assert_eq!(a.inertia(tol).unwrap(), b.inertia(tol).unwrap());
        prop_assert_eq!(b.inertia(tol).unwrap(), inertia_of(&d, tol));
    }

    #[test]
    fn frames_are_unitary_with_prescribed_last_column(v in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2..6)) {
        let v: Vec<Complex64> = v.into_iter().map(|(a, b)| c(a, b)).collect();
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let f = gram_schmidt_frame(&v).unwrap();
        prop_assert!(f.unitarity_residual() < 1e-12);
        let last = f.column(v.len() - 1);
        // parallel: |<last, v>| = |v|
        let inner: Complex64 = last.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        prop_assert!((inner.norm() - norm).abs() < 1e-12 * norm.max(1.0));
    }
}

fn random(n: usize, seed: u64) -> HermitianMatrix {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..2 * n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    common::hermitian_from(n, &raw)
}

#[test]
fn degenerate_spectra_keep_orthonormal_vectors() {
    let a = HermitianMatrix::from_diag(&[1.0, 1.0, 1.0, -2.0]);
    let u = common::unitary_from(4, &(0..32).map(|i| ((i * 7919) % 13) as f64 / 13.0 - 0.4).collect::<Vec<_>>());
    let b = conjugate(&a, &u);
    let e = b.eigh().unwrap();
    assert!(e.vectors.unitarity_residual() < 1e-10);
    assert!(max_diff(&e.values, &[-2.0, 1.0, 1.0, 1.0]) < 1e-10);
}
