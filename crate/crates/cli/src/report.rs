//! Serializable report.

use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Serialize, Serializer};

use crate::config::RunConfig;

pub const SCHEMA_VERSION: &str = "1";

/// Float serialized with 10 significant digits, so reports are stable
/// against last-bit noise. Non-finite values become `"inf"`, `"-inf"`, `"nan"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Real(pub f64);

impl Real {
    pub fn rounded(self) -> f64 {
        format!("{:.9e}", self.0).parse().unwrap_or(self.0)
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_nan() {
            s.serialize_str("nan")
        } else if self.0.is_infinite() {
            s.serialize_str(if self.0 > 0.0 { "inf" } else { "-inf" })
        } else {
            let v = self.rounded();
            // avoid "-0.0"
            s.serialize_f64(if v == 0.0 { 0.0 } else { v })
        }
    }
}

impl From<f64> for Real {
    fn from(v: f64) -> Self {
        Real(v)
    }
}

/// Exact rational as `"p/q"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ratio(pub Rational64);

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", self.0.numer(), self.0.denom()))
    }
}

/// Sample point as `[[re, im], ...]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointOut(pub Vec<[Real; 2]>);

impl From<&[Complex64]> for PointOut {
    fn from(z: &[Complex64]) -> Self {
        PointOut(z.iter().map(|c| [Real(c.re), Real(c.im)]).collect())
    }
}

impl From<&Vec<Complex64>> for PointOut {
    fn from(z: &Vec<Complex64>) -> Self {
        PointOut::from(z.as_slice())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DomainOut {
    pub n: usize,
    pub r: String,
    pub graph: bool,
    pub radius: Real,
    pub m_list: Option<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionRow {
    pub q: usize,
    pub q_o: usize,
    pub case: &'static str,
    pub margin: Real,
    pub pass: bool,
    pub strong: bool,
    pub strong_consequence: bool,
    pub predicted_by_signature: bool,
    pub worst_point: PointOut,
}

#[derive(Clone, Debug, Serialize)]
pub struct SignatureOut {
    pub plus: usize,
    pub minus: usize,
    pub zero: usize,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TangentialOut {
    pub k: usize,
    pub q: usize,
    pub q_o: usize,
    pub checked: usize,
    pub premise_held: usize,
    pub min_tangential: Real,
    pub counterexamples: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MarginOut {
    pub delta: Real,
    pub epsilon: Ratio,
    pub margin: Real,
    pub c_cert: Real,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaOut {
    pub delta: Real,
    pub strip_min_eigenvalue: Real,
    pub strip_max_abs_phi: Real,
    pub strip_worst_point: PointOut,
    pub domain_margin: Real,
    pub domain_max_phi: Real,
    pub domain_pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificationOut {
    pub k: usize,
    pub q_o: usize,
    pub case: &'static str,
    pub lambda: Real,
    pub certified_epsilon: Ratio,
    pub certified_epsilon_value: Real,
    pub any_passed: bool,
    pub alternative_normalization: bool,
    pub normalization: Real,
    pub c_domain: Real,
    pub domain_inequality_pass: bool,
    pub deltas: Vec<DeltaOut>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NecessityOut {
    pub k: usize,
    pub case: &'static str,
    pub epsilon_max: Ratio,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingRowOut {
    pub t: Real,
    pub value: Real,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingOut {
    pub m_list: Vec<u32>,
    pub s: Real,
    pub epsilon: Real,
    pub rows: Vec<ScalingRowOut>,
    pub slope: Real,
    pub intercept: Real,
    pub max_residual: Real,
    pub analytic_slope: Real,
    pub relative_error: Real,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Warning {
    pub kind: &'static str,
    pub message: String,
    pub point: PointOut,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub task: &'static str,
    pub seed: u64,
    pub config: RunConfig,
    pub domain: Option<DomainOut>,
    pub classification: Vec<ConditionRow>,
    pub signatures: Vec<SignatureOut>,
    pub condition: Option<ConditionRow>,
    pub tangential: Option<TangentialOut>,
    pub analytic_epsilon_k: Option<Ratio>,
    pub necessity: Option<NecessityOut>,
    pub certification: Option<CertificationOut>,
    pub margins: Vec<MarginOut>,
    pub scaling: Vec<ScalingOut>,
    pub verdicts: Vec<Verdict>,
    pub warnings: Vec<Warning>,
    pub passed: bool,
}

impl Report {
    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_are_rounded_and_total() {
        let j = serde_json::to_string(&[Real(0.1 + 0.2), Real(-0.0), Real(f64::INFINITY), Real(f64::NAN)]).unwrap();
        assert_eq!(j, r#"[0.3,0.0,"inf","nan"]"#);
        assert_eq!(Real(1.23456789012345e-7).rounded(), 1.234567890e-7);
    }

    #[test]
    fn ratios_are_strings() {
        assert_eq!(serde_json::to_string(&Ratio(Rational64::new(2, 8))).unwrap(), r#""1/4""#);
    }
}
