//! JSON run configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Analyze,
    Certify,
    Scale,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Analyze => "analyze",
            Task::Certify => "certify",
            Task::Scale => "scale",
        }
    }
}

/// Either a polynomial literal or the model family
/// `2 Re z_n + Σ_j |z_j|^{2 m_j}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<Vec<u32>>,
    #[serde(default = "yes")]
    pub graph: bool,
    #[serde(default = "default_radius")]
    pub radius: f64,
}

fn yes() -> bool {
    true
}

fn default_radius() -> f64 {
    0.5
}

impl DomainConfig {
    /// Dimension and polynomial literal.
    pub fn literal(&self) -> Option<(usize, String)> {
        match (&self.r, &self.model) {
            (Some(r), None) => self.n.map(|n| (n, r.clone())),
            (None, Some(m)) => {
                let n = m.len() + 1;
                let mut s = format!("re({n})");
                for (j, mj) in m.iter().enumerate() {
                    s += &format!(" + abs2m({},{mj})", j + 1);
                }
                Some((n, s))
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MList {
    Auto(String),
    Explicit(Vec<u32>),
}

impl Default for MList {
    fn default() -> Self {
        MList::Auto("auto".into())
    }
}

/// `δ = 2^{-min_exp}, ..., 2^{-max_exp}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderConfig {
    pub min_exp: i32,
    pub max_exp: i32,
}

impl Default for LadderConfig {
    fn default() -> Self {
        LadderConfig { min_exp: 6, max_exp: 20 }
    }
}

/// `ε = i / denominator` up to `max`, given as `"p/q"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub denominator: i64,
    pub max: String,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            denominator: 256,
            max: "1/2".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleCounts {
    pub boundary: usize,
    pub strip: usize,
    pub region: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        SampleCounts {
            boundary: 1000,
            strip: 500,
            region: 500,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    pub positivity: f64,
    pub strictness: f64,
    /// Relative slope error accepted by the scaling verdict.
    pub slope: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            positivity: 1e-9,
            strictness: 1e-3,
            slope: 0.05,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameConfig {
    /// Levi eigenvectors at the base point, frozen over the neighborhood.
    #[default]
    BasePoint,
    Identity,
    /// 1-based order of the tangential coordinates.
    Permutation(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerturbationConfig {
    /// `"default"` or `"none"`.
    Named(String),
    Vector(Vec<f64>),
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        PerturbationConfig::Named("default".into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSet {
    pub m_list: Vec<u32>,
    /// Defaults to `Σ 1/m_j + 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default)]
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub sets: Vec<ScalingSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_ladder: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub report: String,
    pub margins: String,
    pub scaling: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            report: "report.json".into(),
            margins: "margins.csv".into(),
            scaling: "scaling.csv".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default)]
    pub q_o: usize,
    /// `"pseudoconvex"` or `"pseudoconcave"`; inferred from `q` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    #[serde(default)]
    pub m_list: MList,
    #[serde(default)]
    pub delta_ladder: LadderConfig,
    #[serde(default)]
    pub epsilon_grid: GridConfig,
    #[serde(default)]
    pub samples: SampleCounts,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub perturbation: PerturbationConfig,
    #[serde(default)]
    pub frame: FrameConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingConfig>,
    #[serde(default)]
    pub outputs: OutputConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Checks every field that can be checked without building the domain and
    /// reports all offenders at once.
    pub fn validate(&self) -> Result<(), CliError> {
        let mut bad = Vec::new();
        if self.seed.is_none() {
            bad.push("seed: required".to_string());
        }
        match &self.domain {
            None if self.task != Task::Scale => bad.push("domain: required for this task".into()),
            None => {}
            Some(d) => {
                match (&d.r, &d.model, d.n) {
                    (Some(_), Some(_), _) => bad.push("domain: give either r or model, not both".into()),
                    (None, None, _) => bad.push("domain: one of r or model is required".into()),
                    (Some(_), None, None) => bad.push("domain.n: required with r".into()),
                    (Some(_), None, Some(n)) if n < 2 => bad.push(format!("domain.n: must be at least 2, got {n}")),
                    (None, Some(m), _) if m.is_empty() || m.contains(&0) => {
                        bad.push("domain.model: half-orders must be positive and nonempty".into())
                    }
                    (None, Some(m), Some(n)) if n != m.len() + 1 => {
                        bad.push(format!("domain.n: model has {} variables, got n = {n}", m.len() + 1))
                    }
                    _ => {}
                }
                if !(d.radius > 0.0 && d.radius.is_finite()) {
                    bad.push(format!("domain.radius: must be positive, got {}", d.radius));
                }
            }
        }
        let n = self.domain.as_ref().and_then(|d| d.literal()).map(|(n, _)| n);
        if let Some(n) = n {
            let dim = n - 1;
            if let Some(k) = self.k {
                if k == 0 || k > dim {
                    bad.push(format!("k: must lie in 1..={dim}, got {k}"));
                }
            }
            if let Some(q) = self.q {
                if q > dim {
                    bad.push(format!("q: must lie in 0..={dim}, got {q}"));
                }
                if q == self.q_o {
                    bad.push("q: must differ from q_o".into());
                }
            }
            if self.q_o > dim {
                bad.push(format!("q_o: must lie in 0..={dim}, got {}", self.q_o));
            }
            if let MList::Explicit(m) = &self.m_list {
                if m.len() != dim {
                    bad.push(format!("m_list: expected {dim} entries, got {}", m.len()));
                }
                if m.contains(&0) {
                    bad.push("m_list: half-orders must be positive".into());
                }
            }
            if let FrameConfig::Permutation(p) = &self.frame {
                let mut sorted = p.clone();
                sorted.sort_unstable();
                if sorted != (1..=dim).collect::<Vec<_>>() {
                    bad.push(format!("frame.permutation: must be a permutation of 1..={dim}"));
                }
            }
        }
        if let MList::Auto(s) = &self.m_list {
            if s != "auto" {
                bad.push(format!("m_list: expected \"auto\" or a list, got {s:?}"));
            }
        }
        if let Some(c) = &self.case {
            if c != "pseudoconvex" && c != "pseudoconcave" {
                bad.push(format!("case: expected pseudoconvex or pseudoconcave, got {c:?}"));
            }
        }
        if self.task == Task::Certify {
            if self.k.is_none() {
                bad.push("k: required for certify".into());
            }
            let l = self.delta_ladder;
            if l.min_exp < 1 || l.max_exp < l.min_exp {
                bad.push(format!("delta_ladder: need 1 <= min_exp <= max_exp, got {}..{}", l.min_exp, l.max_exp));
            }
            if self.epsilon_grid.denominator < 1 {
                bad.push("epsilon_grid.denominator: must be positive".into());
            }
            if parse_rational(&self.epsilon_grid.max).is_none() {
                bad.push(format!("epsilon_grid.max: expected \"p/q\", got {:?}", self.epsilon_grid.max));
            }
            if self.samples.strip == 0 || self.samples.region == 0 {
                bad.push("samples: strip and region counts must be positive".into());
            }
        }
        if self.task == Task::Analyze && self.samples.boundary == 0 {
            bad.push("samples.boundary: must be positive".into());
        }
        if self.task == Task::Scale {
            match &self.scaling {
                None => bad.push("scaling: required for scale".into()),
                Some(s) if s.sets.is_empty() => bad.push("scaling.sets: must be nonempty".into()),
                Some(s) => {
                    for (i, set) in s.sets.iter().enumerate() {
                        if set.m_list.is_empty() || set.m_list.contains(&0) {
                            bad.push(format!("scaling.sets[{i}].m_list: half-orders must be positive and nonempty"));
                        }
                    }
                }
            }
        }
        if let Some(l) = self.lambda {
            if !(l >= 0.0 && l.is_finite()) {
                bad.push(format!("lambda: must be nonnegative, got {l}"));
            }
        }
        if let PerturbationConfig::Named(s) = &self.perturbation {
            if s != "default" && s != "none" {
                bad.push(format!("perturbation: expected \"default\", \"none\" or a vector, got {s:?}"));
            }
        }
        if self.workers == Some(0) {
            bad.push("workers: must be positive".into());
        }
        let t = self.tolerances;
        for (name, v) in [("positivity", t.positivity), ("strictness", t.strictness), ("slope", t.slope)] {
            if !(v >= 0.0 && v.is_finite()) {
                bad.push(format!("tolerances.{name}: must be nonnegative, got {v}"));
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(CliError::Invalid(bad))
        }
    }
}

/// Parses `"p/q"` or an integer.
pub fn parse_rational(s: &str) -> Option<num_rational::Rational64> {
    let s = s.trim();
    let (p, q): (i64, i64) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse().ok()?, q.trim().parse().ok()?),
        None => (s.parse().ok()?, 1),
    };
    (q != 0).then(|| num_rational::Rational64::new(p, q))
}
