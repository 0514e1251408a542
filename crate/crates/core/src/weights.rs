//! Weight functions built from the defining function and the axis orders,
//! with closed-form gradients and complex Hessians.

use num_complex::Complex64;
use num_rational::Rational64;

use crate::convexity::Case;
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};
use crate::hermitian::{CMatrix, HermitianMatrix};

/// Value, `(dφ/dz_j)` and `(d²φ/dz_i dzbar_j)` at a point.
#[derive(Clone, Debug)]
pub struct Jet {
    pub value: f64,
    pub gradient: Vec<Complex64>,
    pub hessian: HermitianMatrix,
}

impl Jet {
    fn zero(n: usize) -> Self {
        Jet {
            value: 0.0,
            gradient: vec![Complex64::new(0.0, 0.0); n],
            hessian: HermitianMatrix::zeros(n),
        }
    }

    fn add_scaled(&mut self, other: &Jet, s: f64) {
        self.value += s * other.value;
        for (a, b) in self.gradient.iter_mut().zip(&other.gradient) {
            *a += b * s;
        }
        self.hessian = self.hessian.add(&other.hessian.scaled(s));
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightTerm {
    /// `-log(-r + δ)`
    LogDefining { delta: f64 },
    /// `coef · |z|²`
    Quadratic { coef: f64 },
    /// `log(|z_j|² + a)`
    LogShifted { j: usize, m: u32, shift: f64 },
    /// `weight · log(-log(|z_j|² + a))`
    DoubleLog { j: usize, m: u32, shift: f64, weight: f64 },
}

fn diagonal_hessian(n: usize, j: usize, value: f64) -> HermitianMatrix {
    let mut d = vec![0.0; n];
    d[j] = value;
    HermitianMatrix::from_diag(&d)
}

impl WeightTerm {
    pub fn jet(&self, spec: &DomainSpec, z: &[Complex64]) -> Result<Jet> {
        let n = spec.n();
        match *self {
            WeightTerm::LogDefining { delta } => {
                let r = spec.value(z)?;
                let dr = spec.gradient(z)?;
                let d = -r + delta;
                if !(d > 0.0) {
                    return Err(Error::WeightDomain(format!("-r + δ = {d:e} is not positive")));
                }
                let gradient: Vec<Complex64> = dr.iter().map(|g| g / d).collect();
                let h = spec.hessian(z)?;
                let mut m = CMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] = h.get(i, j) / d + dr[i] * dr[j].conj() / (d * d);
                    }
                }
                Ok(Jet {
                    value: -d.ln(),
                    gradient,
                    hessian: HermitianMatrix::new(m)?,
                })
            }
            WeightTerm::Quadratic { coef } => Ok(Jet {
                value: coef * z.iter().map(|c| c.norm_sqr()).sum::<f64>(),
                gradient: z.iter().map(|c| c.conj() * coef).collect(),
                hessian: HermitianMatrix::identity(n).scaled(coef),
            }),
            WeightTerm::LogShifted { j, shift, .. } => {
                let s = z[j].norm_sqr() + shift;
                let mut jet = Jet::zero(n);
                jet.value = s.ln();
                jet.gradient[j] = z[j].conj() / s;
                jet.hessian = diagonal_hessian(n, j, shift / (s * s));
                Ok(jet)
            }
            WeightTerm::DoubleLog { j, shift, weight, .. } => {
                let abs2 = z[j].norm_sqr();
                let s = abs2 + shift;
                if !(s < 1.0) {
                    return Err(Error::WeightDomain(format!("|z_{}|² + a = {s} must be below 1", j + 1)));
                }
                let l = -s.ln();
                let mut jet = Jet::zero(n);
                jet.value = weight * l.ln();
                jet.gradient[j] = -z[j].conj() * (weight / (s * l));
                jet.hessian = diagonal_hessian(n, j, -weight * (shift / (s * s * l) + abs2 / (s * s * l * l)));
                Ok(jet)
            }
        }
    }
}

/// How the `k+1` double-log terms of the concave weight are mixed.
#[derive(Clone, Debug, PartialEq)]
pub enum Perturbation {
    /// Plain double-log sum, every weight 1.
    Unperturbed,
    /// `v_j = (-1)^j / sqrt(k+1)`.
    Default,
    /// Unit vector `v`; weights `(1 + v_j)/2`.
    Vector(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightParams {
    pub case: Case,
    /// Form degree.
    pub k: usize,
    /// Half vanishing orders `m_1, ..., m_{n-1}`.
    pub m_list: Vec<u32>,
    /// Coefficient of the `±λ|z|²` term.
    pub lambda: f64,
    pub perturbation: Perturbation,
}

/// Default `λ`. Larger values add a δ-independent floor to the Hessian that
/// costs certified order on a finite δ-ladder.
pub const DEFAULT_LAMBDA: f64 = 0.1;

impl WeightParams {
    pub fn new(case: Case, k: usize, m_list: Vec<u32>) -> Self {
        WeightParams {
            case,
            k,
            m_list,
            lambda: DEFAULT_LAMBDA,
            perturbation: Perturbation::Default,
        }
    }

    /// Target order `1/(2 m_k)` (convex) or `1/(2 m_{k+1})` (concave).
    pub fn epsilon_k(&self) -> Result<Rational64> {
        let idx = match self.case {
            Case::Pseudoconvex => self.k,
            Case::Pseudoconcave => self.k + 1,
        };
        let m = *self
            .m_list
            .get(idx.wrapping_sub(1))
            .ok_or(Error::IndexOutOfRange {
                index: idx,
                max: self.m_list.len(),
            })?;
        Ok(Rational64::new(1, 2 * m as i64))
    }

    /// When the target order is 1/2 the weight `-log((-r+δ)/(2δ))` is used.
    pub fn uses_alternative_normalization(&self) -> Result<bool> {
        Ok(self.epsilon_k()? == Rational64::new(1, 2))
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.m_list.is_empty() {
            return Err(Error::InvalidArgument("empty m_list".into()));
        }
        if self.m_list.len() != n - 1 {
            return Err(Error::DimensionMismatch {
                expected: n - 1,
                got: self.m_list.len(),
            });
        }
        if self.m_list.contains(&0) {
            return Err(Error::InvalidArgument("half-orders must be positive".into()));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("λ must be nonnegative, got {}", self.lambda)));
        }
        let top = match self.case {
            Case::Pseudoconvex => self.k,
            Case::Pseudoconcave => self.k + 1,
        };
        if self.k == 0 || top > n - 1 {
            return Err(Error::IndexOutOfRange { index: top, max: n - 1 });
        }
        Ok(())
    }

    fn double_log_weights(&self) -> Result<Vec<f64>> {
        let count = self.k + 1;
        match &self.perturbation {
            Perturbation::Unperturbed => Ok(vec![1.0; count]),
            Perturbation::Default => Ok(default_perturbation(self.k).iter().map(|v| 0.5 * (1.0 + v)).collect()),
            Perturbation::Vector(v) => {
                if v.len() != count {
                    return Err(Error::DimensionMismatch {
                        expected: count,
                        got: v.len(),
                    });
                }
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidArgument(format!("perturbation vector has norm {norm}, expected 1")));
                }
                Ok(v.iter().map(|x| 0.5 * (1.0 + x)).collect())
            }
        }
    }
}

/// Unit vector `((-1)^j / sqrt(k+1))_{j=1..k+1}`.
pub fn default_perturbation(k: usize) -> Vec<f64> {
    let s = 1.0 / ((k + 1) as f64).sqrt();
    (1..=k + 1).map(|j| if j % 2 == 0 { s } else { -s }).collect()
}

/// `φ = scale · Σ terms + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightField {
    pub terms: Vec<WeightTerm>,
    pub delta: f64,
    pub lambda: f64,
    pub scale: f64,
    pub offset: f64,
    pub alternative: bool,
}

impl WeightField {
    /// Value, gradient and Hessian of the normalized weight.
    pub fn jet(&self, spec: &DomainSpec, z: &[Complex64]) -> Result<Jet> {
        let mut total = self.raw_jet(spec, z)?;
        total.value = self.scale * total.value + self.offset;
        for g in total.gradient.iter_mut() {
            *g *= self.scale;
        }
        total.hessian = total.hessian.scaled(self.scale);
        Ok(total)
    }

    /// Jet of the unnormalized sum of terms.
    pub fn raw_jet(&self, spec: &DomainSpec, z: &[Complex64]) -> Result<Jet> {
        let mut total = Jet::zero(spec.n());
        for t in &self.terms {
            total.add_scaled(&t.jet(spec, z)?, 1.0);
        }
        Ok(total)
    }

    pub fn value(&self, spec: &DomainSpec, z: &[Complex64]) -> Result<f64> {
        let mut v = 0.0;
        for t in &self.terms {
            v += t.jet(spec, z)?.value;
        }
        Ok(self.scale * v + self.offset)
    }

    pub fn raw_value(&self, spec: &DomainSpec, z: &[Complex64]) -> Result<f64> {
        Ok((self.value(spec, z)? - self.offset) / self.scale)
    }

    /// Sets `scale = c / |log δ|` (no effect on the alternative weight).
    pub fn normalize(&mut self, c: f64) {
        if !self.alternative {
            self.scale = c / self.delta.ln().abs();
        }
    }
}

/// Unnormalized weight at depth `δ`.
///
/// Convex: `-log(-r+δ) + λ|z|² + Σ_{j=k}^{n-1} log(|z_j|² + δ^{1/m_j})`.
/// Concave: `-log(-r+δ) - λ|z|² + Σ_{j=1}^{k+1} w_j log(-log(|z_j|² + δ^{1/m_j}))`.
/// For target order 1/2 both are replaced by `-log((-r+δ)/(2δ))`.
pub fn build_weight(spec: &DomainSpec, params: &WeightParams, delta: f64) -> Result<WeightField> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("δ must lie in (0, 1), got {delta}")));
    }
    let n = spec.n();
    params.validate(n)?;
    let mut terms = vec![WeightTerm::LogDefining { delta }];
    if params.uses_alternative_normalization()? {
        return Ok(WeightField {
            terms,
            delta,
            lambda: 0.0,
            scale: 1.0,
            offset: (2.0 * delta).ln(),
            alternative: true,
        });
    }
    let shift = |m: u32| delta.powf(1.0 / m as f64);
    match params.case {
        Case::Pseudoconvex => {
            terms.push(WeightTerm::Quadratic { coef: params.lambda });
            for j in params.k - 1..n - 1 {
                let m = params.m_list[j];
                terms.push(WeightTerm::LogShifted { j, m, shift: shift(m) });
            }
        }
        Case::Pseudoconcave => {
            terms.push(WeightTerm::Quadratic { coef: -params.lambda });
            for (j, weight) in params.double_log_weights()?.into_iter().enumerate() {
                let m = params.m_list[j];
                terms.push(WeightTerm::DoubleLog {
                    j,
                    m,
                    shift: shift(m),
                    weight,
                });
            }
        }
    }
    Ok(WeightField {
        terms,
        delta,
        lambda: params.lambda,
        scale: 1.0,
        offset: 0.0,
        alternative: false,
    })
}

/// Largest `c` with `c |ψ_δ| / |log δ| <= 1` on every calibration set, one per `δ`.
pub fn ladder_normalization(spec: &DomainSpec, weights: &[WeightField], calibration: &[Vec<Point>]) -> Result<f64> {
    let mut c = f64::INFINITY;
    for (w, pts) in weights.iter().zip(calibration) {
        let mut sup: f64 = 0.0;
        for z in pts {
            let mut v = 0.0;
            for t in &w.terms {
                v += t.jet(spec, z)?.value;
            }
            sup = sup.max(v.abs());
        }
        if sup > 0.0 {
            c = c.min(w.delta.ln().abs() / sup);
        }
    }
    Ok(if c.is_finite() { c } else { 1.0 })
}

/// Frame data of the weight: `Φ = F^* (φ_ij) F` and `(L_j φ) = F^* ∇φ`.
#[derive(Clone, Debug)]
pub struct FrameJet {
    pub value: f64,
    pub frame_gradient: Vec<Complex64>,
    pub frame_hessian: HermitianMatrix,
}

pub fn frame_jet(jet: &Jet, frame: &CMatrix) -> FrameJet {
    FrameJet {
        value: jet.value,
        frame_gradient: frame.adjoint().matvec(&jet.gradient),
        frame_hessian: jet.hessian.compress(frame),
    }
}
