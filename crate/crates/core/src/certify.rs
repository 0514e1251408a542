//! Numerical certification of the weight hypotheses over a δ-ladder and the
//! resulting certified order ε.

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::convexity::{Case, Tolerances};
use crate::error::{Error, Result};
use crate::forms::induced_form;
use crate::geometry::{region_sample, strip_sample, DomainSpec, FramePolicy, Point, SamplerConfig, StripSample};
use crate::weights::{build_weight, frame_jet, ladder_normalization, WeightField, WeightParams};

/// Weight data at one point, in the policy frame.
#[derive(Clone, Debug)]
pub struct PointEval {
    pub point: Point,
    /// Smallest eigenvalue of the induced form of `(φ_ij)`.
    pub min_eig: f64,
    /// `Σ_{j<q_o} |L_j φ|²`.
    pub grad_sq: f64,
    pub phi: f64,
    /// Largest entry of the frame Hessian, for tolerances.
    pub scale: f64,
}

pub fn evaluate_point(
    spec: &DomainSpec,
    weight: &WeightField,
    k: usize,
    q_o: usize,
    policy: &FramePolicy,
    z: &[num_complex::Complex64],
) -> Result<PointEval> {
    let frame = policy.frame(spec, z)?;
    let fj = frame_jet(&weight.jet(spec, z)?, &frame);
    let form = induced_form(&fj.frame_hessian, k, q_o)?;
    Ok(PointEval {
        point: z.to_vec(),
        min_eig: form.min_eigenvalue()?,
        grad_sq: fj.frame_gradient[..q_o].iter().map(|c| c.norm_sqr()).sum(),
        phi: fj.value,
        scale: fj.frame_hessian.max_abs(),
    })
}

pub fn evaluate_points(
    spec: &DomainSpec,
    weight: &WeightField,
    k: usize,
    q_o: usize,
    policy: &FramePolicy,
    points: &[Point],
) -> Result<Vec<PointEval>> {
    points
        .par_iter()
        .map(|z| evaluate_point(spec, weight, k, q_o, policy, z))
        .collect()
}

/// Outcome of the strip inequality at one `(δ, ε)`.
#[derive(Clone, Debug)]
pub struct StripCheck {
    pub pass: bool,
    /// `min_z λ_min(z) · δ^{2ε}`, to be compared with the run constant.
    pub margin: f64,
    pub worst_point: Point,
    pub max_abs_phi: f64,
    pub bound_ok: bool,
}

fn min_by_eig(evals: &[PointEval]) -> Result<&PointEval> {
    evals
        .iter()
        .min_by(|a, b| a.min_eig.total_cmp(&b.min_eig))
        .ok_or_else(|| Error::InvalidArgument("no sample points".into()))
}

const BOUND_SLACK: f64 = 1e-9;

fn strip_check_from(evals: &[PointEval], delta: f64, epsilon: f64, c_cert: f64, tol: &Tolerances) -> Result<StripCheck> {
    let worst = min_by_eig(evals)?;
    let margin = worst.min_eig * delta.powf(2.0 * epsilon);
    let max_abs_phi = evals.iter().map(|e| e.phi.abs()).fold(0.0, f64::max);
    let bound_ok = max_abs_phi <= 1.0 + BOUND_SLACK;
    let pass = c_cert > 0.0 && margin >= c_cert * (1.0 - tol.positivity) && bound_ok;
    Ok(StripCheck {
        pass,
        margin,
        worst_point: worst.point.clone(),
        max_abs_phi,
        bound_ok,
    })
}

/// Checks `|φ| <= 1` and `λ_min(induced(φ_ij)) >= c_cert δ^{-2ε}` at every strip point.
#[allow(clippy::too_many_arguments)]
pub fn certify_16(
    spec: &DomainSpec,
    weight: &WeightField,
    k: usize,
    q_o: usize,
    epsilon: f64,
    strip: &StripSample,
    c_cert: f64,
    policy: &FramePolicy,
    tol: &Tolerances,
) -> Result<StripCheck> {
    if (strip.delta - weight.delta).abs() > 1e-15 * weight.delta {
        return Err(Error::InvalidArgument(format!(
            "strip depth {} differs from weight depth {}",
            strip.delta, weight.delta
        )));
    }
    let evals = evaluate_points(spec, weight, k, q_o, policy, &strip.points)?;
    strip_check_from(&evals, strip.delta, epsilon, c_cert, tol)
}

/// Outcome of the domain inequality for one weight.
#[derive(Clone, Debug)]
pub struct DomainCheck {
    pub pass: bool,
    /// `min_z (λ_min(z) - c_domain Σ_{j<q_o} |L_j φ|²)`.
    pub margin: f64,
    /// `min_z λ_min / Σ |L_j φ|²` over points with a nonzero gradient part.
    pub min_ratio: f64,
    pub worst_point: Point,
    /// `sup φ` (convex or the order-1/2 weight) or `sup |φ|` (concave).
    pub max_phi: f64,
    pub bound_ok: bool,
}

/// Half the smallest ratio `λ_min / Σ |L_j φ|²`; 1 when the gradient part vanishes.
pub fn domain_constant_from(evals: &[PointEval]) -> f64 {
    let ratio = min_ratio(evals);
    if ratio.is_finite() && ratio > 0.0 {
        0.5 * ratio
    } else if ratio.is_finite() {
        0.0
    } else {
        1.0
    }
}

fn min_ratio(evals: &[PointEval]) -> f64 {
    evals
        .iter()
        .filter(|e| e.grad_sq > 0.0)
        .map(|e| e.min_eig / e.grad_sq)
        .fold(f64::INFINITY, f64::min)
}

fn domain_check_from(evals: &[PointEval], c_domain: f64, signed_bound: bool, tol: &Tolerances) -> Result<DomainCheck> {
    let mut margin = f64::INFINITY;
    let mut worst = None;
    let mut pass = true;
    for e in evals {
        let m = e.min_eig - c_domain * e.grad_sq;
        if m < -tol.positivity * e.scale.max(1.0) {
            pass = false;
        }
        if m < margin {
            margin = m;
            worst = Some(e);
        }
    }
    let worst = worst.ok_or_else(|| Error::InvalidArgument("no sample points".into()))?;
    let max_phi = evals
        .iter()
        .map(|e| if signed_bound { e.phi } else { e.phi.abs() })
        .fold(f64::NEG_INFINITY, f64::max);
    let bound_ok = max_phi <= 1.0 + BOUND_SLACK;
    Ok(DomainCheck {
        pass: pass && bound_ok,
        margin,
        min_ratio: min_ratio(evals),
        worst_point: worst.point.clone(),
        max_phi,
        bound_ok,
    })
}

fn signed_bound(case: Case, weight: &WeightField) -> bool {
    case == Case::Pseudoconvex || weight.alternative
}

/// Checks `φ <= 1` (resp. `|φ| <= 1` for the concave double-log weight) and
/// `λ_min(induced(φ_ij)) >= c_domain Σ_{j<q_o} |L_j φ|²` on points of the closed domain.
#[allow(clippy::too_many_arguments)]
pub fn certify_15(
    spec: &DomainSpec,
    weight: &WeightField,
    case: Case,
    k: usize,
    q_o: usize,
    region: &[Point],
    c_domain: f64,
    policy: &FramePolicy,
    tol: &Tolerances,
) -> Result<DomainCheck> {
    let evals = evaluate_points(spec, weight, k, q_o, policy, region)?;
    domain_check_from(&evals, c_domain, signed_bound(case, weight), tol)
}

/// `2^{-min_exp}, ..., 2^{-max_exp}`, largest first.
pub fn dyadic_ladder(min_exp: i32, max_exp: i32) -> Result<Vec<f64>> {
    if min_exp < 1 || max_exp < min_exp {
        return Err(Error::InvalidArgument(format!("bad ladder exponents {min_exp}..{max_exp}")));
    }
    Ok((min_exp..=max_exp).map(|e| 2f64.powi(-e)).collect())
}

/// `0, 1/d, 2/d, ..., max`.
pub fn epsilon_grid(denominator: i64, max: Rational64) -> Result<Vec<Rational64>> {
    if denominator < 1 || max < Rational64::zero() {
        return Err(Error::InvalidArgument("bad ε grid".into()));
    }
    let top = (max * denominator).floor().to_integer();
    Ok((0..=top).map(|i| Rational64::new(i, denominator)).collect())
}

#[derive(Clone, Debug)]
pub struct CertifyConfig {
    pub params: WeightParams,
    pub q_o: usize,
    pub deltas: Vec<f64>,
    pub epsilons: Vec<Rational64>,
    pub strip_samples: usize,
    pub region_samples: usize,
    pub sampler: SamplerConfig,
    pub seed: u64,
    pub policy: FramePolicy,
    pub tol: Tolerances,
}

impl CertifyConfig {
    /// Ladder `2^-6 ... 2^-20`, ε step 1/256 up to 1/2, 500 samples each.
    pub fn new(spec: &DomainSpec, params: WeightParams, q_o: usize) -> Self {
        CertifyConfig {
            params,
            q_o,
            deltas: dyadic_ladder(6, 20).expect("valid ladder"),
            epsilons: epsilon_grid(256, Rational64::new(1, 2)).expect("valid grid"),
            strip_samples: 500,
            region_samples: 500,
            sampler: SamplerConfig::default(),
            seed: 0,
            policy: FramePolicy::identity(spec.n()),
            tol: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MarginRow {
    pub delta: f64,
    pub epsilon: Rational64,
    pub margin: f64,
    pub c_cert: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct DeltaSummary {
    pub delta: f64,
    pub strip_min_eig: f64,
    pub strip_worst_point: Point,
    pub strip_max_abs_phi: f64,
    pub domain_check: DomainCheck,
}

#[derive(Clone, Debug)]
pub struct Certification {
    pub epsilon_k: Rational64,
    /// Largest grid ε passing both hypotheses on the whole ladder; 0 if none.
    pub certified: Rational64,
    pub any_passed: bool,
    pub alternative_normalization: bool,
    /// Ladder-uniform constant `c` of the normalization `c / |log δ|`.
    pub normalization: f64,
    pub c_domain: f64,
    pub domain_pass: bool,
    pub rows: Vec<MarginRow>,
    pub deltas: Vec<DeltaSummary>,
    pub diagnostics: Vec<String>,
}

impl Certification {
    pub fn certified_f64(&self) -> f64 {
        self.certified.to_f64().unwrap_or(0.0)
    }
}

/// Sweeps the ε grid: the certified order is the largest ε for which the
/// domain inequality holds for every δ and `min λ_min · δ^{2ε}` stays above
/// `c_cert(ε)`, half its value at the largest δ, on every strip of the ladder.
pub fn estimate_certified_epsilon(spec: &DomainSpec, cfg: &CertifyConfig) -> Result<Certification> {
    if cfg.deltas.is_empty() {
        return Err(Error::InvalidArgument("empty δ ladder".into()));
    }
    if cfg.epsilons.is_empty() {
        return Err(Error::InvalidArgument("empty ε grid".into()));
    }
    let params = &cfg.params;
    let case = params.case;
    let k = params.k;
    let n = spec.n();
    if cfg.q_o > n - 1 {
        return Err(Error::IndexOutOfRange { index: cfg.q_o, max: n - 1 });
    }
    let mut deltas = cfg.deltas.clone();
    deltas.sort_by(|a, b| b.total_cmp(a));
    let epsilon_k = params.epsilon_k()?;

    let region = region_sample(spec, cfg.region_samples, cfg.seed, &cfg.sampler)?;
    let strips = deltas
        .iter()
        .map(|&d| strip_sample(spec, d, cfg.strip_samples, cfg.seed, &cfg.sampler))
        .collect::<Result<Vec<_>>>()?;
    let mut weights = deltas
        .iter()
        .map(|&d| build_weight(spec, params, d))
        .collect::<Result<Vec<_>>>()?;
    let alternative = weights[0].alternative;
    let normalization = if alternative {
        1.0
    } else {
        let calibration: Vec<Vec<Point>> = strips
            .iter()
            .map(|s| region.iter().chain(&s.points).cloned().collect())
            .collect();
        ladder_normalization(spec, &weights, &calibration)?
    };
    for w in weights.iter_mut() {
        w.normalize(normalization);
    }

    let mut diagnostics = Vec::new();
    let signed = case == Case::Pseudoconvex || alternative;
    let mut strip_evals = Vec::with_capacity(deltas.len());
    let mut region_evals = Vec::with_capacity(deltas.len());
    for (w, s) in weights.iter().zip(&strips) {
        strip_evals.push(evaluate_points(spec, w, k, cfg.q_o, &cfg.policy, &s.points)?);
        region_evals.push(evaluate_points(spec, w, k, cfg.q_o, &cfg.policy, &region)?);
    }

    let c_domain = domain_constant_from(&region_evals[0]);
    let mut domain_pass = true;
    let mut summaries = Vec::with_capacity(deltas.len());
    for (i, &d) in deltas.iter().enumerate() {
        let domain_check = domain_check_from(&region_evals[i], c_domain, signed, &cfg.tol)?;
        if !domain_check.pass {
            domain_pass = false;
            diagnostics.push(format!(
                "domain inequality fails at δ = {d:e}: margin {:e}, sup φ {:e}",
                domain_check.margin, domain_check.max_phi
            ));
        }
        let worst = min_by_eig(&strip_evals[i])?;
        summaries.push(DeltaSummary {
            delta: d,
            strip_min_eig: worst.min_eig,
            strip_worst_point: worst.point.clone(),
            strip_max_abs_phi: strip_evals[i].iter().map(|e| e.phi.abs()).fold(0.0, f64::max),
            domain_check,
        });
    }

    let mut rows = Vec::with_capacity(deltas.len() * cfg.epsilons.len());
    let mut certified = Rational64::zero();
    let mut any_passed = false;
    let d_max = deltas[0];
    for &eps in &cfg.epsilons {
        let e = eps.to_f64().unwrap_or(f64::NAN);
        let c_cert = 0.5 * summaries[0].strip_min_eig * d_max.powf(2.0 * e);
        let mut all = domain_pass;
        for (i, &d) in deltas.iter().enumerate() {
            let strip = strip_check_from(&strip_evals[i], d, e, c_cert, &cfg.tol)?;
            all &= strip.pass;
            rows.push(MarginRow {
                delta: d,
                epsilon: eps,
                margin: strip.margin,
                c_cert,
                pass: strip.pass,
            });
        }
        if all && (!any_passed || eps > certified) {
            certified = eps;
            any_passed = true;
        }
    }
    if summaries[0].strip_min_eig <= 0.0 {
        diagnostics.push(format!(
            "induced form is not positive on the strip at δ = {d_max:e} (min {:e})",
            summaries[0].strip_min_eig
        ));
    }
    if let Some(s) = summaries.iter().find(|s| s.strip_max_abs_phi > 1.0 + BOUND_SLACK) {
        diagnostics.push(format!("|φ| reaches {:e} on the strip at δ = {:e}", s.strip_max_abs_phi, s.delta));
    }
    if !any_passed {
        diagnostics.push("no grid value of ε passes; certified ε set to 0".into());
    }
    Ok(Certification {
        epsilon_k,
        certified,
        any_passed,
        alternative_normalization: alternative,
        normalization,
        c_domain,
        domain_pass,
        rows,
        deltas: summaries,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_expr;

    fn model(m: u32) -> DomainSpec {
        DomainSpec::new(parse_expr(2, &format!("re(2) + abs2m(1,{m})")).unwrap(), true, 0.5).unwrap()
    }

    #[test]
    fn ladders_and_grids() {
        let l = dyadic_ladder(6, 8).unwrap();
        assert_eq!(l, vec![1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0]);
        assert!(dyadic_ladder(3, 2).is_err());
        let g = epsilon_grid(4, Rational64::new(1, 2)).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g[2], Rational64::new(1, 2));
    }

    #[test]
    fn order_half_for_the_ball() {
        let spec = model(1);
        let mut cfg = CertifyConfig::new(&spec, WeightParams::new(Case::Pseudoconvex, 1, vec![1]), 0);
        cfg.strip_samples = 100;
        cfg.region_samples = 100;
        let c = estimate_certified_epsilon(&spec, &cfg).unwrap();
        assert!(c.alternative_normalization);
        assert_eq!(c.certified, Rational64::new(1, 2));
    }

    #[test]
    fn epsilon_zero_is_trivial_and_monotone() {
        let spec = model(2);
        let params = WeightParams::new(Case::Pseudoconvex, 1, vec![2]);
        let w = {
            let mut w = build_weight(&spec, &params, 0.01).unwrap();
            w.normalize(1.0);
            w
        };
        let strip = strip_sample(&spec, 0.01, 100, 1, &SamplerConfig::default()).unwrap();
        let pol = FramePolicy::identity(2);
        let tol = Tolerances::default();
        let zero = certify_16(&spec, &w, 1, 0, 0.0, &strip, 1e-12, &pol, &tol).unwrap();
        assert!(zero.pass);
        let c = 0.5 * zero.margin;
        let mut last = true;
        for i in 0..=64 {
            let r = certify_16(&spec, &w, 1, 0, i as f64 / 128.0, &strip, c * 0.01f64.powf(i as f64 / 64.0), &pol, &tol);
            let now = r.unwrap().pass;
            assert!(last || !now);
            last = now;
        }
    }

    #[test]
    fn strip_depth_must_match() {
        let spec = model(2);
        let w = build_weight(&spec, &WeightParams::new(Case::Pseudoconvex, 1, vec![2]), 0.01).unwrap();
        let strip = strip_sample(&spec, 0.02, 5, 1, &SamplerConfig::default()).unwrap();
        let r = certify_16(&spec, &w, 1, 0, 0.1, &strip, 1.0, &FramePolicy::identity(2), &Tolerances::default());
        assert!(r.is_err());
    }

    #[test]
    fn convex_domain_inequality_with_empty_gradient_sum() {
        let spec = model(3);
        let mut w = build_weight(&spec, &WeightParams::new(Case::Pseudoconvex, 1, vec![3]), 0.001).unwrap();
        w.normalize(0.5);
        let region = region_sample(&spec, 200, 3, &SamplerConfig::default()).unwrap();
        let pol = FramePolicy::identity(2);
        let c = certify_15(&spec, &w, Case::Pseudoconvex, 1, 0, &region, 1.0, &pol, &Tolerances::default()).unwrap();
        assert!(c.pass, "{c:?}");
        assert!(c.margin >= 0.0);
        assert_eq!(c.min_ratio, f64::INFINITY);
    }
}
