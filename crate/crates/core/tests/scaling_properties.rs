use std::f64::consts::PI;

use levicert::convexity::Case;
use levicert::quadrature::{integrate, QuadOptions};
use levicert::scaling::{
    default_s, exponent_budget, fit_exponent, lemma61_integral, necessity_bound, run_ladder, ScalingParams,
};
use num_rational::Rational64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn integrand(params: &ScalingParams, t: f64, radii_sq: &[f64]) -> f64 {
    let sum: f64 = params
        .m_list
        .iter()
        .zip(radii_sq)
        .map(|(&m, &r2)| t.powf(1.0 - 2.0 * params.epsilon * m as f64) * r2.powi(m as i32))
        .sum();
    (sum + 1.0).powf(-params.s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fit_ignores_constant_factors(slope in -3.0f64..1.0, c in 1e-6f64..1e6, noise in prop::collection::vec(-1e-3f64..1e-3, 5)) {
        let ts: [f64; 5] = [1e2, 1e3, 1e4, 1e5, 1e6];
        let base: Vec<(f64, f64)> = ts.iter().zip(&noise).map(|(&t, e)| (t, t.powf(slope) * (1.0 + e))).collect();
        let scaled: Vec<(f64, f64)> = base.iter().map(|&(t, v)| (t, c * v)).collect();
        let a = fit_exponent(&base).unwrap();
        let b = fit_exponent(&scaled).unwrap();
        prop_assert!((a.slope - b.slope).abs() < 1e-9);
        prop_assert!((b.intercept - a.intercept - c.ln()).abs() < 1e-9);
        prop_assert!((a.slope - slope).abs() < 1e-3);
    }

    #[test]
    fn budget_agrees_with_necessity_bound(
        m_list in prop::collection::vec(1u32..6, 2..5),
        k_raw in 0usize..4,
        p in 1i64..5,
        num in 0i64..64,
        den in 1i64..64,
    ) {
        let n = m_list.len() + 1;
        let k = 1 + k_raw % m_list.len();
        let eps = Rational64::new(num, den);
        let budget = exponent_budget(p, k, n, eps, &m_list).unwrap();
        let bound = necessity_bound(Case::Pseudoconvex, k, 0, &m_list).unwrap();
        prop_assert_eq!(budget.consistent, eps <= bound.epsilon_max);
        prop_assert_eq!(budget.a - budget.b, Rational64::from_integer(2) * (bound.epsilon_max - eps));
    }
}

#[test]
fn integral_decreases_in_t() {
    for m in 1..=3u32 {
        let params = ScalingParams::new(vec![m], default_s(&[m]), 0.0);
        let values: Vec<f64> = [1.0, 10.0, 1e2, 1e3, 1e4, 1e5]
            .iter()
            .map(|&t| lemma61_integral(&params, t).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]), "m = {m}: {values:?}");
    }
}

#[test]
fn quadratic_case_matches_closed_form() {
    let params = ScalingParams::new(vec![1], 3.0, 0.0);
    let delta = params.delta;
    for t in [1e2, 1e3, 1e4, 1e5] {
        let got = lemma61_integral(&params, t).unwrap();
        let disc = PI / (8.0 * t) * (1.0 - (t * delta * delta + 1.0).powi(-2));
        // the two corners of the square outside the quarter disc
        let corner = delta * delta * (1.0 - PI / 4.0) * (t * delta * delta + 1.0).powi(-3);
        assert!(got >= disc * (1.0 - 1e-6), "t = {t}: {got} vs {disc}");
        assert!(got <= (disc + corner) * (1.0 + 1e-6), "t = {t}: {got} vs {disc} + {corner}");
    }
}

#[test]
fn polar_reduction_matches_cartesian_quadrature() {
    let opts = QuadOptions {
        rel_tol: 1e-9,
        abs_tol: 0.0,
        max_intervals: 4000,
    };
    for (m, eps, t) in [(2u32, 0.1f64, 1e3f64), (3, 0.0, 1e2), (1, 0.2, 1e4)] {
        let params = ScalingParams::new(vec![m], 2.5, eps);
        let d = params.delta;
        let knee = (t.powf(1.0 - 2.0 * eps * m as f64)).powf(-0.5 / m as f64);
        let breaks = [knee, 10.0 * knee];
        let cart = integrate(
            |x| {
                Ok(integrate(|y| Ok(integrand(&params, t, &[x * x + y * y])), 0.0, d, &breaks, &opts)?.value)
            },
            0.0,
            d,
            &breaks,
            &opts,
        )
        .unwrap()
        .value;
        let polar = lemma61_integral(&params, t).unwrap();
        assert!((cart - polar).abs() <= 1e-6 * cart, "m = {m}: {cart} vs {polar}");
    }
}

#[test]
fn two_variable_integral_matches_monte_carlo() {
    let params = ScalingParams::new(vec![1, 2], 4.0, 0.0);
    let t = 100.0;
    let exact = lemma61_integral(&params, t).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 400_000;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..n {
        let x: [f64; 4] = rng.random();
        let f = integrand(&params, t, &[x[0] * x[0] + x[1] * x[1], x[2] * x[2] + x[3] * x[3]]);
        sum += f;
        sum_sq += f * f;
    }
    let mean = sum / n as f64;
    let sigma = ((sum_sq / n as f64 - mean * mean) / n as f64).sqrt();
    assert!((mean - exact).abs() < 4.0 * sigma, "{exact} vs {mean} ± {sigma}");
}

#[test]
fn exponents_add_over_independent_variables() {
    let slope = |m_list: Vec<u32>, s: f64| {
        let run = run_ladder(&ScalingParams::new(m_list, s, 0.0)).unwrap();
        run.fit.slope
    };
    let one = slope(vec![1], 3.0);
    let two = slope(vec![2], 2.5);
    let joint = slope(vec![1, 2], 4.0);
    assert!(
        (one + two - joint).abs() <= 2.0 * 0.05 * joint.abs(),
        "{one} + {two} vs {joint}"
    );
}
