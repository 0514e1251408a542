//! Run orchestration: config in, report out.

use num_rational::Rational64;
use num_traits::ToPrimitive;

use levicert::certify::{dyadic_ladder, epsilon_grid, estimate_certified_epsilon, Certification, CertifyConfig};
use levicert::convexity::{classify, lemma21_crosscheck, origin, Case, ClassificationRow, Tolerances};
use levicert::geometry::{boundary_sample, FramePolicy};
use levicert::scaling::{default_s, necessity_bound, run_ladder, ScalingParams};
use levicert::weights::{Perturbation, WeightParams, DEFAULT_LAMBDA};
use levicert::{parse_expr, DomainSpec, Point, SamplerConfig};

use crate::config::{parse_rational, FrameConfig, MList, PerturbationConfig, RunConfig, Task};
use crate::error::CliError;
use crate::report::*;

/// Isolated degenerate samples below this fraction are reported as warnings.
const DEGENERATE_FRACTION: f64 = 0.01;

/// Warnings of one kind beyond this count are folded into a summary.
const WARNING_CAP: usize = 20;

struct Context<'a> {
    cfg: &'a RunConfig,
    seed: u64,
    spec: Option<DomainSpec>,
    m_list: Option<Vec<u32>>,
    policy: Option<FramePolicy>,
    tol: Tolerances,
    warnings: Vec<Warning>,
    verdicts: Vec<Verdict>,
}

impl Context<'_> {
    fn warn(&mut self, kind: &'static str, message: String, point: &[num_complex::Complex64]) {
        self.warnings.push(Warning {
            kind,
            message,
            point: PointOut::from(point),
        });
    }

    fn warn_points(&mut self, kind: &'static str, what: &str, points: &[Point]) {
        for p in points.iter().take(WARNING_CAP) {
            self.warn(kind, what.to_string(), p);
        }
        if points.len() > WARNING_CAP {
            let more = points.len() - WARNING_CAP;
            self.warn(kind, format!("{what} ({more} more not listed)"), &points[WARNING_CAP]);
        }
    }

    fn verdict(&mut self, name: &str, pass: bool, detail: String) {
        self.verdicts.push(Verdict {
            name: name.to_string(),
            pass,
            detail,
        });
    }

    fn spec(&self) -> Result<&DomainSpec, CliError> {
        self.spec
            .as_ref()
            .ok_or_else(|| CliError::Invalid(vec!["domain: required for this task".into()]))
    }

    fn base_point(&self) -> Point {
        origin(self.spec.as_ref().map_or(1, |s| s.n()))
    }

    fn case(&self) -> Result<Case, CliError> {
        let cfg = self.cfg;
        match (cfg.case.as_deref(), cfg.q, cfg.k) {
            (Some("pseudoconcave"), ..) => Ok(Case::Pseudoconcave),
            (Some(_), ..) => Ok(Case::Pseudoconvex),
            (None, Some(q), _) | (None, None, Some(q)) => Ok(Case::of(q, cfg.q_o)?),
            (None, None, None) => Ok(Case::Pseudoconvex),
        }
    }

    fn m_list(&self) -> Result<Vec<u32>, CliError> {
        self.m_list.clone().ok_or_else(|| {
            CliError::Invalid(vec![
                "m_list: \"auto\" needs r to vanish to finite order on every tangential axis; give it explicitly".into(),
            ])
        })
    }
}

fn resolve_domain(cfg: &RunConfig) -> Result<(Option<DomainSpec>, Option<Vec<u32>>), CliError> {
    let Some(d) = &cfg.domain else {
        return Ok((None, None));
    };
    let (n, lit) = d
        .literal()
        .ok_or_else(|| CliError::Invalid(vec!["domain: one of r or model is required".into()]))?;
    let spec = DomainSpec::new(parse_expr(n, &lit)?, d.graph, d.radius)?;
    let m_list = match &cfg.m_list {
        MList::Explicit(m) => Some(m.clone()),
        MList::Auto(_) => (0..n - 1).map(|j| spec.axis_half_order(j)).collect::<levicert::Result<Vec<_>>>().ok(),
    };
    Ok((Some(spec), m_list))
}

fn resolve_policy(cfg: &RunConfig, spec: &DomainSpec) -> Result<FramePolicy, CliError> {
    Ok(match &cfg.frame {
        FrameConfig::BasePoint => FramePolicy::base_point_eigenvectors(spec)?,
        FrameConfig::Identity => FramePolicy::identity(spec.n()),
        FrameConfig::Permutation(p) => FramePolicy::permutation(&p.iter().map(|j| j - 1).collect::<Vec<_>>())?,
    })
}

fn condition_row(row: &ClassificationRow) -> ConditionRow {
    let v = &row.verdict;
    ConditionRow {
        q: v.q,
        q_o: v.q_o,
        case: v.case.name(),
        margin: Real(v.margin),
        pass: v.pass,
        strong: v.strong,
        strong_consequence: v.strong_consequence,
        predicted_by_signature: row.predicted_by_signature,
        worst_point: PointOut::from(&v.z_of_worst_margin),
    }
}

fn empty_report(ctx: Context<'_>) -> Report {
    let domain = ctx.spec.as_ref().map(|s| DomainOut {
        n: s.n(),
        r: ctx.cfg.domain.as_ref().and_then(|d| d.literal()).map(|(_, l)| l).unwrap_or_default(),
        graph: s.graph_form(),
        radius: Real(s.radius()),
        m_list: ctx.m_list.clone(),
    });
    Report {
        schema_version: SCHEMA_VERSION,
        task: ctx.cfg.task.name(),
        seed: ctx.seed,
        config: ctx.cfg.clone(),
        domain,
        classification: Vec::new(),
        signatures: Vec::new(),
        condition: None,
        tangential: None,
        analytic_epsilon_k: None,
        necessity: None,
        certification: None,
        margins: Vec::new(),
        scaling: Vec::new(),
        verdicts: ctx.verdicts,
        warnings: ctx.warnings,
        passed: false,
    }
}

/// Runs the configured task. Deterministic in the config and seed.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let seed = cfg.seed.expect("validated");
    let (spec, m_list) = resolve_domain(cfg)?;
    let policy = spec.as_ref().map(|s| resolve_policy(cfg, s)).transpose()?;
    let mut ctx = Context {
        cfg,
        seed,
        spec,
        m_list,
        policy,
        tol: Tolerances {
            positivity: cfg.tolerances.positivity,
            strictness: cfg.tolerances.strictness,
        },
        warnings: Vec::new(),
        verdicts: Vec::new(),
    };
    let mut parts = Parts::default();
    match cfg.task {
        Task::Analyze => analyze(&mut ctx, &mut parts)?,
        Task::Certify => certify(&mut ctx, &mut parts)?,
        Task::Scale => scale(&mut ctx, &mut parts)?,
    }
    if ctx.spec.is_some() && cfg.k.is_some() {
        exponents(&mut ctx, &mut parts)?;
    }
    let mut report = empty_report(ctx);
    parts.fill(&mut report);
    report.passed = report.verdicts.iter().all(|v| v.pass);
    Ok(report)
}

#[derive(Default)]
struct Parts {
    classification: Vec<ConditionRow>,
    signatures: Vec<SignatureOut>,
    condition: Option<ConditionRow>,
    tangential: Option<TangentialOut>,
    analytic_epsilon_k: Option<Ratio>,
    necessity: Option<NecessityOut>,
    certification: Option<CertificationOut>,
    margins: Vec<MarginOut>,
    scaling: Vec<ScalingOut>,
}

impl Parts {
    fn fill(self, r: &mut Report) {
        r.classification = self.classification;
        r.signatures = self.signatures;
        r.condition = self.condition;
        r.tangential = self.tangential;
        r.analytic_epsilon_k = self.analytic_epsilon_k;
        r.necessity = self.necessity;
        r.certification = self.certification;
        r.margins = self.margins;
        r.scaling = self.scaling;
    }
}

fn analyze(ctx: &mut Context<'_>, out: &mut Parts) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let spec = ctx.spec()?.clone();
    let policy = ctx.policy.clone().expect("domain present");
    let samples = boundary_sample(&spec, cfg.samples.boundary, ctx.seed, &SamplerConfig::default())?;
    let cls = classify(&spec, &samples, &policy, &ctx.tol)?;

    let bad = cls.degenerate_points.len();
    if bad as f64 >= DEGENERATE_FRACTION * samples.len() as f64 {
        return Err(levicert::Error::Sampling(format!(
            "the gradient degenerates at {bad} of {} boundary samples",
            samples.len()
        ))
        .into());
    }
    ctx.warn_points("degenerate_gradient", "gradient degenerates; sample skipped", &cls.degenerate_points);
    let jumps: Vec<Point> = cls.signature_jumps.iter().map(|(p, _)| p.clone()).collect();
    ctx.warn_points("signature_jump", "Levi signature differs from the most frequent one", &jumps);

    out.classification = cls.rows.iter().map(condition_row).collect();
    out.signatures = cls
        .signature_counts
        .iter()
        .map(|(s, c)| SignatureOut {
            plus: s.plus,
            minus: s.minus,
            zero: s.zero,
            count: *c,
        })
        .collect();

    if let Some(q) = cfg.q {
        let row = cls
            .rows
            .iter()
            .find(|r| r.verdict.q == q && r.verdict.q_o == cfg.q_o)
            .expect("classification covers every admissible pair");
        let v = &row.verdict;
        ctx.verdict(
            "condition",
            v.pass,
            format!("q = {q}, q_o = {}: margin {:.6e}", cfg.q_o, v.margin),
        );
        if !v.pass {
            ctx.warn("condition_failed", format!("trace condition fails for q = {q}, q_o = {}", cfg.q_o), &v.z_of_worst_margin);
        }
        out.condition = Some(condition_row(row));

        if let Some(k) = cfg.k {
            let l = lemma21_crosscheck(&spec, k, q, cfg.q_o, &samples, &policy, &ctx.tol)?;
            ctx.verdict(
                "tangential",
                l.counterexamples.is_empty(),
                format!("{} counterexamples among {} samples", l.counterexamples.len(), l.premise_held),
            );
            let pts: Vec<Point> = l.counterexamples.iter().map(|(p, _)| p.clone()).collect();
            ctx.warn_points("tangential_negative", "trace condition holds but the tangential form is negative", &pts);
            out.tangential = Some(TangentialOut {
                k,
                q,
                q_o: cfg.q_o,
                checked: l.checked,
                premise_held: l.premise_held,
                min_tangential: Real(l.min_tangential),
                counterexamples: l.counterexamples.len(),
            });
        }
    }
    Ok(())
}

fn certify(ctx: &mut Context<'_>, out: &mut Parts) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let spec = ctx.spec()?.clone();
    let k = cfg.k.expect("validated");
    let case = ctx.case()?;
    let mut params = WeightParams::new(case, k, ctx.m_list()?);
    params.lambda = cfg.lambda.unwrap_or(DEFAULT_LAMBDA);
    params.perturbation = match &cfg.perturbation {
        PerturbationConfig::Named(s) if s == "none" => Perturbation::Unperturbed,
        PerturbationConfig::Named(_) => Perturbation::Default,
        PerturbationConfig::Vector(v) => Perturbation::Vector(v.clone()),
    };
    let step = Rational64::new(1, cfg.epsilon_grid.denominator);
    let mut ccfg = CertifyConfig::new(&spec, params.clone(), cfg.q_o);
    ccfg.deltas = dyadic_ladder(cfg.delta_ladder.min_exp, cfg.delta_ladder.max_exp)?;
    ccfg.epsilons = epsilon_grid(cfg.epsilon_grid.denominator, parse_rational(&cfg.epsilon_grid.max).expect("validated"))?;
    ccfg.strip_samples = cfg.samples.strip;
    ccfg.region_samples = cfg.samples.region;
    ccfg.seed = ctx.seed;
    ccfg.policy = ctx.policy.clone().expect("domain present");
    ccfg.tol = ctx.tol;
    let c = estimate_certified_epsilon(&spec, &ccfg)?;

    certification_warnings(ctx, &c);
    let ok = c.any_passed && c.domain_pass;
    ctx.verdict(
        "certification",
        ok,
        if ok {
            format!("certified ε = {}", c.certified)
        } else {
            format!("no ε on the grid passes both hypotheses (domain inequality {})", pass_word(c.domain_pass))
        },
    );
    let within = c.certified <= c.epsilon_k + step;
    ctx.verdict(
        "within_analytic",
        within,
        format!("certified {} against ε_k = {} + grid step {}", c.certified, c.epsilon_k, step),
    );
    if !within {
        let p = c.deltas[0].strip_worst_point.clone();
        ctx.warn("above_analytic", format!("certified ε {} exceeds ε_k = {}", c.certified, c.epsilon_k), &p);
    }

    out.margins = c
        .rows
        .iter()
        .map(|r| MarginOut {
            delta: Real(r.delta),
            epsilon: Ratio(r.epsilon),
            margin: Real(r.margin),
            c_cert: Real(r.c_cert),
            pass: r.pass,
        })
        .collect();
    out.certification = Some(CertificationOut {
        k,
        q_o: cfg.q_o,
        case: case.name(),
        lambda: Real(params.lambda),
        certified_epsilon: Ratio(c.certified),
        certified_epsilon_value: Real(c.certified.to_f64().unwrap_or(f64::NAN)),
        any_passed: c.any_passed,
        alternative_normalization: c.alternative_normalization,
        normalization: Real(c.normalization),
        c_domain: Real(c.c_domain),
        domain_inequality_pass: c.domain_pass,
        deltas: c
            .deltas
            .iter()
            .map(|d| DeltaOut {
                delta: Real(d.delta),
                strip_min_eigenvalue: Real(d.strip_min_eig),
                strip_max_abs_phi: Real(d.strip_max_abs_phi),
                strip_worst_point: PointOut::from(&d.strip_worst_point),
                domain_margin: Real(d.domain_check.margin),
                domain_max_phi: Real(d.domain_check.max_phi),
                domain_pass: d.domain_check.pass,
            })
            .collect(),
    });
    Ok(())
}

fn pass_word(b: bool) -> &'static str {
    if b {
        "passes"
    } else {
        "fails"
    }
}

fn certification_warnings(ctx: &mut Context<'_>, c: &Certification) {
    for d in &c.deltas {
        if !d.domain_check.pass {
            ctx.warn(
                "domain_inequality",
                format!("domain inequality fails at δ = {:e} (margin {:.6e}, sup φ {:.6e})", d.delta, d.domain_check.margin, d.domain_check.max_phi),
                &d.domain_check.worst_point,
            );
        }
        if d.strip_max_abs_phi > 1.0 + 1e-9 {
            ctx.warn(
                "weight_bound",
                format!("|φ| reaches {:.6e} on the strip at δ = {:e}", d.strip_max_abs_phi, d.delta),
                &d.strip_worst_point,
            );
        }
        if d.strip_min_eig <= 0.0 {
            ctx.warn(
                "strip_not_positive",
                format!("induced form has eigenvalue {:.6e} on the strip at δ = {:e}", d.strip_min_eig, d.delta),
                &d.strip_worst_point,
            );
        }
    }
    if !c.any_passed {
        let last = c.deltas.last().expect("nonempty ladder");
        ctx.warn("no_epsilon", "no grid value of ε passes on the whole ladder".into(), &last.strip_worst_point);
    }
}

fn scale(ctx: &mut Context<'_>, out: &mut Parts) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let sc = cfg.scaling.as_ref().expect("validated");
    for set in &sc.sets {
        let mut p = ScalingParams::new(set.m_list.clone(), set.s.unwrap_or_else(|| default_s(&set.m_list)), set.epsilon);
        if let Some(t) = &sc.t_ladder {
            p.t_ladder = t.clone();
        }
        let r = run_ladder(&p)?;
        let rel = r.relative_error();
        let pass = rel <= cfg.tolerances.slope;
        ctx.verdict(
            &format!("slope m = {:?}, ε = {}", set.m_list, set.epsilon),
            pass,
            format!("fitted {:.6} against {:.6} (relative error {:.3e})", r.fit.slope, r.analytic_slope, rel),
        );
        out.scaling.push(ScalingOut {
            m_list: set.m_list.clone(),
            s: Real(p.s),
            epsilon: Real(p.epsilon),
            rows: r
                .rows
                .iter()
                .map(|row| ScalingRowOut {
                    t: Real(row.t),
                    value: Real(row.value),
                })
                .collect(),
            slope: Real(r.fit.slope),
            intercept: Real(r.fit.intercept),
            max_residual: Real(r.fit.max_residual),
            analytic_slope: Real(r.analytic_slope),
            relative_error: Real(rel),
            pass,
        });
    }
    Ok(())
}

/// Analytic `ε_k` and the necessity bound, when the half-orders are known.
fn exponents(ctx: &mut Context<'_>, out: &mut Parts) -> Result<(), CliError> {
    let k = ctx.cfg.k.expect("checked by caller");
    let Some(m_list) = ctx.m_list.clone() else {
        let p = ctx.base_point();
        ctx.warn("m_list", "half-orders unknown; exponents skipped".into(), &p);
        return Ok(());
    };
    let case = ctx.case()?;
    if let Ok(e) = WeightParams::new(case, k, m_list.clone()).epsilon_k() {
        out.analytic_epsilon_k = Some(Ratio(e));
    }
    let b = necessity_bound(case, k, ctx.cfg.q_o, &m_list)?;
    let p = ctx.base_point();
    for w in b.warnings {
        ctx.warn("hypothesis", w, &p);
    }
    out.necessity = Some(NecessityOut {
        k,
        case: case.name(),
        epsilon_max: Ratio(b.epsilon_max),
    });
    Ok(())
}
