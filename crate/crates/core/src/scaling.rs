//! Asymptotics of the scaled box integral and the exact exponent bookkeeping
//! behind the upper bound on subelliptic orders.

use std::f64::consts::FRAC_PI_2;

use num_rational::Rational64;
use num_traits::Zero;
use rayon::prelude::*;

use crate::convexity::Case;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingParams {
    /// Number of complex variables integrated.
    pub p: usize,
    /// Exponent of the denominator.
    pub s: f64,
    /// Half-orders `m_1, ..., m_p`.
    pub m_list: Vec<u32>,
    pub epsilon: f64,
    /// Side of the integration box `[0, δ]^{2p}`.
    pub delta: f64,
    pub t_ladder: Vec<f64>,
}

/// `t ∈ {10², 10³, 10⁴, 10⁵}`.
pub fn default_t_ladder() -> Vec<f64> {
    vec![1e2, 1e3, 1e4, 1e5]
}

/// The smallest admissible exponent plus one: `Σ 1/m_j + 2`.
pub fn default_s(m_list: &[u32]) -> f64 {
    m_list.iter().map(|&m| 1.0 / m as f64).sum::<f64>() + 2.0
}

impl ScalingParams {
    pub fn new(m_list: Vec<u32>, s: f64, epsilon: f64) -> Self {
        ScalingParams {
            p: m_list.len(),
            s,
            m_list,
            epsilon,
            delta: 1.0,
            t_ladder: default_t_ladder(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.m_list.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: self.m_list.len(),
            });
        }
        if self.m_list.contains(&0) {
            return Err(Error::InvalidArgument("half-orders must be positive".into()));
        }
        let threshold = self.m_list.iter().map(|&m| 1.0 / m as f64).sum::<f64>() + 1.0;
        if !(self.s > threshold) {
            return Err(Error::Hypothesis(format!(
                "the integral needs s > Σ 1/m_j + 1 = {threshold}, got s = {}",
                self.s
            )));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidArgument(format!("box size must be positive, got {}", self.delta)));
        }
        if self.t_ladder.len() < 4 {
            return Err(Error::InvalidArgument("the t ladder needs at least 4 values".into()));
        }
        if self.t_ladder.iter().any(|&t| !(t > 0.0)) || self.t_ladder.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("the t ladder must be positive and strictly increasing".into()));
        }
        Ok(())
    }

    /// `-Σ 1/m_j + 2pε`.
    pub fn analytic_slope(&self) -> f64 {
        -self.m_list.iter().map(|&m| 1.0 / m as f64).sum::<f64>() + 2.0 * self.p as f64 * self.epsilon
    }
}

/// Angular measure of `{(x, y) ∈ [0, δ]² : |(x, y)| = R}` times `R`.
pub fn polar_weight(radius: f64, delta: f64) -> f64 {
    if radius <= delta {
        FRAC_PI_2 * radius
    } else if radius < delta * std::f64::consts::SQRT_2 {
        (FRAC_PI_2 - 2.0 * (delta / radius).acos()) * radius
    } else {
        0.0
    }
}

const OUTER_TOL: f64 = 1e-6;

struct Nested<'a> {
    params: &'a ScalingParams,
    /// `(m, c)` per variable, `c = t^{1 - 2εm}`, sorted by `m`.
    factors: Vec<(u32, f64)>,
}

impl Nested<'_> {
    fn level(&self, depth: usize, acc: f64) -> Result<f64> {
        let delta = self.params.delta;
        let top = delta * std::f64::consts::SQRT_2;
        let (m, c) = self.factors[depth];
        let last = depth + 1 == self.factors.len();
        // the integrand turns over where c R^{2m} ~ acc
        let scale = (acc / c).powf(0.5 / m as f64);
        let breaks = [scale, 10.0 * scale, 100.0 * scale, delta];
        // inner levels must be tighter than the outer tolerance
        let rel_tol = OUTER_TOL * 0.1f64.powi((self.factors.len() - depth) as i32 - 1) * 0.1;
        let opts = QuadOptions {
            rel_tol,
            abs_tol: 0.0,
            max_intervals: 4000,
        };
        let s = self.params.s;
        let res = integrate(
            |radius| {
                let w = polar_weight(radius, delta);
                if w == 0.0 {
                    return Ok(0.0);
                }
                let a = acc + c * radius.powi(2 * m as i32);
                if last {
                    Ok(w * a.powf(-s))
                } else {
                    Ok(w * self.level(depth + 1, a)?)
                }
            },
            0.0,
            top,
            &breaks,
            &opts,
        )?;
        Ok(res.value)
    }
}

/// `∫_{[0,δ]^{2p}} dx dy / (t Σ_j |t^{-ε} z_j|^{2m_j} + 1)^s`, each `(x_j, y_j)`
/// pair reduced to its radius and integrated by nested adaptive quadrature.
pub fn lemma61_integral(params: &ScalingParams, t: f64) -> Result<f64> {
    params.validate()?;
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
    }
    let mut factors: Vec<(u32, f64)> = params
        .m_list
        .iter()
        .map(|&m| (m, t.powf(1.0 - 2.0 * params.epsilon * m as f64)))
        .collect();
    factors.sort_by_key(|f| f.0);
    Nested { params, factors }.level(0, 1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

/// Least-squares line through `(log t, log I)`.
pub fn fit_exponent(values: &[(f64, f64)]) -> Result<Fit> {
    if values.len() < 4 {
        return Err(Error::InvalidArgument(format!("need at least 4 points, got {}", values.len())));
    }
    if let Some(&(t, v)) = values.iter().find(|&&(t, v)| !(t > 0.0 && v > 0.0)) {
        return Err(Error::InvalidArgument(format!("nonpositive entry ({t}, {v})")));
    }
    let pts: Vec<(f64, f64)> = values.iter().map(|&(t, v)| (t.ln(), v.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all t values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = pts.iter().map(|p| (p.1 - intercept - slope * p.0).abs()).fold(0.0, f64::max);
    Ok(Fit {
        slope,
        intercept,
        max_residual,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LadderRow {
    pub t: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRun {
    pub rows: Vec<LadderRow>,
    pub fit: Fit,
    pub analytic_slope: f64,
}

impl ScalingRun {
    pub fn relative_error(&self) -> f64 {
        (self.fit.slope - self.analytic_slope).abs() / self.analytic_slope.abs().max(f64::MIN_POSITIVE)
    }
}

/// Integrates every ladder point (in parallel) and fits the slope.
pub fn run_ladder(params: &ScalingParams) -> Result<ScalingRun> {
    params.validate()?;
    let values = params
        .t_ladder
        .par_iter()
        .map(|&t| lemma61_integral(params, t).map(|v| LadderRow { t, value: v }))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_exponent(&values.iter().map(|r| (r.t, r.value)).collect::<Vec<_>>())?;
    Ok(ScalingRun {
        rows: values,
        fit,
        analytic_slope: params.analytic_slope(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NecessityBound {
    pub epsilon_max: Rational64,
    /// Violated ordering hypotheses.
    pub warnings: Vec<String>,
}

/// `1/(2 m_k)`, with the ordering hypotheses of the model checked and
/// reported as warnings.
pub fn necessity_bound(case: Case, k: usize, q_o: usize, m_list: &[u32]) -> Result<NecessityBound> {
    if k == 0 || k > m_list.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            max: m_list.len(),
        });
    }
    if m_list.contains(&0) {
        return Err(Error::InvalidArgument("half-orders must be positive".into()));
    }
    let mut warnings = Vec::new();
    match case {
        Case::Pseudoconvex => {
            if k < q_o + 1 {
                warnings.push(format!("degree k = {k} is below q_o + 1 = {}", q_o + 1));
            }
            if m_list.windows(2).any(|w| w[1] > w[0]) {
                warnings.push(format!("half-orders {m_list:?} are not decreasing"));
            }
        }
        Case::Pseudoconcave => {
            if k + 1 > q_o {
                warnings.push(format!("degree k = {k} is above q_o - 1 = {}", q_o as i64 - 1));
            }
            if m_list.windows(2).any(|w| w[1] < w[0]) {
                warnings.push(format!("half-orders {m_list:?} are not increasing"));
            }
            if q_o >= 2 {
                if let Some(&m_last) = m_list.get(q_o - 2) {
                    let lhs = Rational64::from_integer(m_list[0] as i64);
                    let rhs = Rational64::new(m_last as i64, 2) + Rational64::new(1, 4);
                    if lhs < rhs {
                        warnings.push(format!("m_1 = {lhs} is below m_{{q_o-1}}/2 + 1/4 = {rhs}"));
                    }
                }
            }
        }
    }
    Ok(NecessityBound {
        epsilon_max: Rational64::new(1, 2 * m_list[k - 1] as i64),
        warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentBudget {
    /// Exponent of `t` in the upper bound for `Q(u_t, u_t)`.
    pub a: Rational64,
    /// Exponent of `t` in the lower bound forced by an order-ε estimate.
    pub b: Rational64,
    /// `b <= a`, equivalently `ε <= ε_k`.
    pub consistent: bool,
}

/// `A = 2p - 2 + 2ε_k - 2kε_k - Σ_{j=k+1}^{n-1} 1/m_j` and `B` with `2ε` in
/// place of `2ε_k`, where `ε_k = 1/(2 m_k)`.
pub fn exponent_budget(p: i64, k: usize, n: usize, epsilon: Rational64, m_list: &[u32]) -> Result<ExponentBudget> {
    if k == 0 || k > m_list.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            max: m_list.len(),
        });
    }
    if n < 2 || m_list.len() < n - 1 {
        return Err(Error::DimensionMismatch {
            expected: n.saturating_sub(1),
            got: m_list.len(),
        });
    }
    if m_list.contains(&0) {
        return Err(Error::InvalidArgument("half-orders must be positive".into()));
    }
    let eps_k = Rational64::new(1, 2 * m_list[k - 1] as i64);
    let two = Rational64::from_integer(2);
    let tail = m_list[k..n - 1]
        .iter()
        .fold(Rational64::zero(), |acc, &m| acc + Rational64::new(1, m as i64));
    let base = two * Rational64::from_integer(p) - two - two * Rational64::from_integer(k as i64) * eps_k - tail;
    let a = base + two * eps_k;
    let b = base + two * epsilon;
    Ok(ExponentBudget {
        a,
        b,
        consistent: b <= a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Rational64 {
        Rational64::new(1, 2)
    }

    #[test]
    fn polar_weight_covers_the_square() {
        let area = integrate(|r| Ok(polar_weight(r, 0.7)), 0.0, 0.7 * 2f64.sqrt(), &[0.7], &QuadOptions::default())
            .unwrap()
            .value;
        assert!((area - 0.49).abs() < 1e-9, "{area}");
    }

    #[test]
    fn small_t_limit_is_box_volume() {
        let mut p = ScalingParams::new(vec![1, 2], 4.0, 0.0);
        p.delta = 0.5;
        let v = lemma61_integral(&p, 1e-12).unwrap();
        assert!((v - 0.5f64.powi(4)).abs() < 1e-9);
    }

    #[test]
    fn refuses_small_exponent() {
        let p = ScalingParams::new(vec![1], 2.0, 0.0);
        assert!(matches!(lemma61_integral(&p, 1.0), Err(Error::Hypothesis(_))));
        let mut q = ScalingParams::new(vec![1], 3.0, 0.0);
        q.t_ladder = vec![1.0, 2.0, 2.0, 3.0];
        assert!(q.validate().is_err());
        assert!(lemma61_integral(&ScalingParams::new(vec![1], 3.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn fit_recovers_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 10.0, 100.0, 1000.0].iter().map(|&t: &f64| (t, 3.0 * t.powf(-0.75))).collect();
        let f = fit_exponent(&pts).unwrap();
        assert!((f.slope + 0.75).abs() < 1e-12);
        assert!(f.max_residual < 1e-12);
        assert!(fit_exponent(&pts[..3]).is_err());
        assert!(fit_exponent(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0), (4.0, 1.0)]).is_err());
    }

    #[test]
    fn necessity_examples() {
        let b = necessity_bound(Case::Pseudoconvex, 2, 1, &[3, 2]).unwrap();
        assert_eq!(b.epsilon_max, Rational64::new(1, 4));
        assert!(b.warnings.is_empty());
        assert_eq!(necessity_bound(Case::Pseudoconvex, 1, 0, &[1]).unwrap().epsilon_max, half());
        let w = necessity_bound(Case::Pseudoconvex, 2, 1, &[2, 3]).unwrap();
        assert_eq!(w.warnings.len(), 1);
        let c = necessity_bound(Case::Pseudoconcave, 1, 3, &[1, 3, 4]).unwrap();
        assert_eq!(c.epsilon_max, half());
        assert!(c.warnings.iter().any(|w| w.contains("m_1")));
        assert!(necessity_bound(Case::Pseudoconvex, 3, 1, &[3, 2]).is_err());
    }

    #[test]
    fn budget_examples() {
        let m = [3, 2];
        let at = exponent_budget(10, 2, 3, Rational64::new(1, 4), &m).unwrap();
        assert_eq!(at.a, at.b);
        assert!(at.consistent);
        let above = exponent_budget(10, 2, 3, Rational64::new(1, 4) + Rational64::new(1, 100), &m).unwrap();
        assert!(!above.consistent);
        assert!(exponent_budget(10, 2, 3, Rational64::new(1, 5), &m).unwrap().consistent);
        let tail = exponent_budget(1, 1, 3, Rational64::new(1, 8), &m).unwrap();
        assert_eq!(tail.a, Rational64::new(-1, 2));
    }
}
