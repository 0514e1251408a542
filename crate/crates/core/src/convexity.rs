//! The trace condition on the Levi form, classification of `(q, q_o)` pairs
//! and the tangential-form cross-check.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forms::{pad_normal, tangential_min_eigenvalue};
use crate::geometry::{DomainSpec, FramePolicy, Point};
use crate::hermitian::{inertia_of, HermitianMatrix, Inertia};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case {
    /// `q > q_o`
    Pseudoconvex,
    /// `q < q_o`
    Pseudoconcave,
}

impl Case {
    pub fn of(q: usize, q_o: usize) -> Result<Self> {
        match q.cmp(&q_o) {
            std::cmp::Ordering::Greater => Ok(Case::Pseudoconvex),
            std::cmp::Ordering::Less => Ok(Case::Pseudoconcave),
            std::cmp::Ordering::Equal => Err(Error::InvalidArgument(format!("q = q_o = {q} is not admissible"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Case::Pseudoconvex => "pseudoconvex",
            Case::Pseudoconcave => "pseudoconcave",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative tolerance for `>= 0` decisions, scaled by the matrix size.
    pub positivity: f64,
    /// A pass is strong when the margin exceeds this fraction of the median
    /// eigenvalue magnitude.
    pub strictness: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            positivity: 1e-9,
            strictness: 1e-3,
        }
    }
}

/// Levi form in the policy frame at one boundary sample.
#[derive(Clone, Debug)]
pub struct LeviSample {
    pub point: Point,
    pub levi: HermitianMatrix,
    pub eigenvalues: Vec<f64>,
}

impl LeviSample {
    /// `λ_1 + ... + λ_q - Σ_{j<q_o} L_jj`.
    pub fn margin(&self, q: usize, q_o: usize) -> f64 {
        let kyfan: f64 = self.eigenvalues[..q].iter().sum();
        let trace: f64 = (0..q_o).map(|j| self.levi.diag(j)).sum();
        kyfan - trace
    }

    pub fn inertia(&self) -> Inertia {
        inertia_of(&self.eigenvalues, self.levi.default_tolerance())
    }
}

/// Levi data at every sample; points where the gradient degenerates are
/// returned separately.
pub fn levi_samples(spec: &DomainSpec, policy: &FramePolicy, samples: &[Point]) -> Result<(Vec<LeviSample>, Vec<Point>)> {
    let evaluated: Vec<Result<Option<LeviSample>>> = samples
        .par_iter()
        .map(|z| match policy.levi_form(spec, z) {
            Ok(levi) => {
                let eigenvalues = levi.eigenvalues_sorted()?;
                Ok(Some(LeviSample {
                    point: z.clone(),
                    levi,
                    eigenvalues,
                }))
            }
            Err(Error::DegenerateGradient { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect();
    let mut good = Vec::new();
    let mut degenerate = Vec::new();
    for (z, r) in samples.iter().zip(evaluated) {
        match r? {
            Some(s) => good.push(s),
            None => degenerate.push(z.clone()),
        }
    }
    if good.is_empty() && !samples.is_empty() {
        return Err(Error::Sampling("the gradient degenerates at every sample".into()));
    }
    Ok((good, degenerate))
}

#[derive(Clone, Debug)]
pub struct ConvexityVerdict {
    pub q: usize,
    pub q_o: usize,
    pub case: Case,
    /// Minimum over samples of the trace-condition margin.
    pub margin: f64,
    pub pass: bool,
    pub strong: bool,
    pub z_of_worst_margin: Point,
    /// Whether the inertia consequence of a strong pass (`q > n-1-s^+`,
    /// resp. `q < s^-`) holds at every sample. Vacuous unless `strong`.
    pub strong_consequence: bool,
    pub degenerate_points: Vec<Point>,
}

fn check_indices(n: usize, q: usize, q_o: usize) -> Result<Case> {
    for v in [q, q_o] {
        if v > n - 1 {
            return Err(Error::IndexOutOfRange { index: v, max: n - 1 });
        }
    }
    Case::of(q, q_o)
}

fn positivity_tolerance(levis: &[LeviSample], tol: &Tolerances) -> f64 {
    let scale = levis.iter().map(|s| s.levi.max_abs()).fold(1.0, f64::max);
    tol.positivity * scale
}

fn strictness_threshold(levis: &[LeviSample], tol: &Tolerances) -> f64 {
    let mut mags: Vec<f64> = levis.iter().flat_map(|s| s.eigenvalues.iter().map(|x| x.abs())).collect();
    if mags.is_empty() {
        return 0.0;
    }
    mags.sort_by(f64::total_cmp);
    tol.strictness * mags[mags.len() / 2]
}

fn verdict_from(
    spec: &DomainSpec,
    levis: &[LeviSample],
    degenerate: &[Point],
    q: usize,
    q_o: usize,
    tol: &Tolerances,
) -> Result<ConvexityVerdict> {
    let case = check_indices(spec.n(), q, q_o)?;
    let mut margin = f64::INFINITY;
    let mut worst = levis[0].point.clone();
    for s in levis {
        let m = s.margin(q, q_o);
        if m < margin {
            margin = m;
            worst = s.point.clone();
        }
    }
    let pass = margin >= -positivity_tolerance(levis, tol);
    let strong = pass && margin > strictness_threshold(levis, tol);
    let dim = spec.n() - 1;
    let strong_consequence = !strong
        || levis.iter().all(|s| {
            let inertia = s.inertia();
            match case {
                Case::Pseudoconvex => q + inertia.plus > dim,
                Case::Pseudoconcave => q < inertia.minus,
            }
        });
    Ok(ConvexityVerdict {
        q,
        q_o,
        case,
        margin,
        pass,
        strong,
        z_of_worst_margin: worst,
        strong_consequence,
        degenerate_points: degenerate.to_vec(),
    })
}

/// Checks `λ_1 + ... + λ_q >= Σ_{j<q_o} L_jj` at every boundary sample, the
/// trace taken over the first `q_o` columns of the policy frame.
pub fn check_condition_13(
    spec: &DomainSpec,
    q: usize,
    q_o: usize,
    samples: &[Point],
    policy: &FramePolicy,
    tol: &Tolerances,
) -> Result<ConvexityVerdict> {
    check_indices(spec.n(), q, q_o)?;
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let (levis, degenerate) = levi_samples(spec, policy, samples)?;
    verdict_from(spec, &levis, &degenerate, q, q_o, tol)
}

#[derive(Clone, Debug)]
pub struct ClassificationRow {
    pub verdict: ConvexityVerdict,
    /// True when a constant signature alone guarantees the row:
    /// `q_o = s^- + s^0` with `q > q_o`, or `q_o = s^-` with `q < q_o`.
    pub predicted_by_signature: bool,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub rows: Vec<ClassificationRow>,
    /// Distinct signatures with their sample counts, most frequent first.
    pub signature_counts: Vec<(Inertia, usize)>,
    /// Samples whose signature differs from the most frequent one.
    pub signature_jumps: Vec<(Point, Inertia)>,
    pub degenerate_points: Vec<Point>,
}

impl Classification {
    pub fn constant_signature(&self) -> Option<Inertia> {
        match self.signature_counts.as_slice() {
            [(s, _)] => Some(*s),
            _ => None,
        }
    }
}

/// Verdicts for every admissible `(q, q_o)` with `0 <= q, q_o <= n-1`, `q != q_o`.
pub fn classify(spec: &DomainSpec, samples: &[Point], policy: &FramePolicy, tol: &Tolerances) -> Result<Classification> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let (levis, degenerate) = levi_samples(spec, policy, samples)?;
    let mut signature_counts: Vec<(Inertia, usize)> = Vec::new();
    let inertias: Vec<Inertia> = levis.iter().map(LeviSample::inertia).collect();
    for s in &inertias {
        match signature_counts.iter_mut().find(|(t, _)| t == s) {
            Some((_, c)) => *c += 1,
            None => signature_counts.push((*s, 1)),
        }
    }
    // stable: ties keep first-seen order
    signature_counts.sort_by_key(|c| std::cmp::Reverse(c.1));
    let mode = signature_counts[0].0;
    let signature_jumps = levis
        .iter()
        .zip(&inertias)
        .filter(|(_, s)| **s != mode)
        .map(|(l, s)| (l.point.clone(), *s))
        .collect();
    let constant = signature_counts.len() == 1;
    let dim = spec.n() - 1;
    let mut rows = Vec::new();
    for q_o in 0..=dim {
        for q in 0..=dim {
            if q == q_o {
                continue;
            }
            let verdict = verdict_from(spec, &levis, &degenerate, q, q_o, tol)?;
            let predicted_by_signature = constant
                && match verdict.case {
                    Case::Pseudoconvex => q_o == mode.minus + mode.zero,
                    Case::Pseudoconcave => q_o == mode.minus,
                };
            rows.push(ClassificationRow {
                verdict,
                predicted_by_signature,
            });
        }
    }
    Ok(Classification {
        rows,
        signature_counts,
        signature_jumps,
        degenerate_points: degenerate,
    })
}

#[derive(Clone, Debug)]
pub struct Lemma21Report {
    pub k: usize,
    pub q: usize,
    pub q_o: usize,
    pub checked: usize,
    /// Samples where the trace condition holds.
    pub premise_held: usize,
    pub min_tangential: f64,
    /// Samples where the condition holds but the tangential form is negative.
    pub counterexamples: Vec<(Point, f64)>,
}

/// At each sample where the trace condition holds for `q`, checks that the
/// induced form of the zero-padded Levi matrix is nonnegative on tangential
/// k-forms (`k >= q > q_o` or `k <= q < q_o`).
pub fn lemma21_crosscheck(
    spec: &DomainSpec,
    k: usize,
    q: usize,
    q_o: usize,
    samples: &[Point],
    policy: &FramePolicy,
    tol: &Tolerances,
) -> Result<Lemma21Report> {
    let case = check_indices(spec.n(), q, q_o)?;
    let ordered = match case {
        Case::Pseudoconvex => k >= q,
        Case::Pseudoconcave => k <= q && k >= 1,
    };
    if !ordered || k > spec.n() {
        return Err(Error::InvalidArgument(format!(
            "degree {k} incompatible with q = {q}, q_o = {q_o}"
        )));
    }
    let (levis, _) = levi_samples(spec, policy, samples)?;
    let eps = positivity_tolerance(&levis, tol);
    let results: Vec<Result<Option<(f64, bool)>>> = levis
        .par_iter()
        .map(|s| {
            if s.margin(q, q_o) < -eps {
                return Ok(None);
            }
            let t = tangential_min_eigenvalue(&pad_normal(&s.levi), k, q_o)?;
            Ok(Some((t, t < -eps)))
        })
        .collect();
    let mut report = Lemma21Report {
        k,
        q,
        q_o,
        checked: levis.len(),
        premise_held: 0,
        min_tangential: f64::INFINITY,
        counterexamples: Vec::new(),
    };
    for (s, r) in levis.iter().zip(results) {
        if let Some((t, bad)) = r? {
            report.premise_held += 1;
            report.min_tangential = report.min_tangential.min(t);
            if bad {
                report.counterexamples.push((s.point.clone(), t));
            }
        }
    }
    Ok(report)
}

/// The origin of C^n.
pub fn origin(n: usize) -> Point {
    vec![Complex64::new(0.0, 0.0); n]
}
