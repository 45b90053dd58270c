//! Experiment runner behind the `cxbody` binary: reads a JSON config, runs
//! one experiment and writes `results.csv`, `results.json` and gnuplot data.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use cxbody::constants::{hyperplane_bound, Constants};
use cxbody::convexity::{busemann_curve_check, convexity_check, roundness_estimate};
use cxbody::inequalities::{
    default_levels, evaluate_trial, hyperplane_ratio, random_lq_body, random_measure, random_member, stability_check, trial_rng,
    busemann_petty_compare, volume, InequalityConfig,
};
use cxbody::membership::{goodey_weil_ladder, membership_test, CertifiedMember, DictionaryConfig};
use cxbody::radon::default_section_level;
use cxbody::{sphere_rule, BodySpec, ComplexEllipsoidParams, Measure, RadialRule, RadonConfig, StarBody};
use serde::Serialize;
use serde_json::{json, Value};

pub use config::{Experiment, ExperimentConfig};
pub use output::{emit_plotdata, PlotData, Row};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Library(#[from] cxbody::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        1
    }
}

/// Tolerance for certifying bodies that are not ellipsoids by construction.
pub const MEMBER_TOL: f64 = 1e-3;

/// Section level used for the convexity check of `I_c(K)`.
pub fn convexity_section_level(n: usize) -> usize {
    if n == 3 {
        12
    } else {
        default_section_level(n)
    }
}

/// Quadrature levels after applying overrides.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Levels {
    pub section: usize,
    pub outer: usize,
    pub normals: usize,
    pub radial_panels: usize,
    pub radial_order: usize,
}

impl Levels {
    fn resolve(cfg: &ExperimentConfig) -> Self {
        let (outer, normals, section) = default_levels(cfg.n);
        let section = match cfg.experiment {
            Experiment::Busemann => cfg.level.unwrap_or(convexity_section_level(cfg.n)),
            _ => cfg.level.unwrap_or(section),
        };
        let outer = cfg.outer_level.unwrap_or(outer);
        let normals = if cfg.outer_level.is_some() { outer } else { normals };
        Levels { section, outer, normals, radial_panels: 8, radial_order: 8 }
    }

    fn inequality(&self, n: usize) -> Result<InequalityConfig, CliError> {
        let radial = RadialRule::new(self.radial_panels, self.radial_order)?;
        Ok(InequalityConfig::with_rules(n, self.outer, self.normals, self.section, radial)?)
    }
}

/// Everything one run produces.
#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub rows: Vec<Row>,
    pub details: Value,
    #[serde(skip)]
    pub plots: Vec<PlotData>,
    /// An inequality that should hold was violated beyond tolerance.
    pub violation: bool,
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    levels: Levels,
    rows: Vec<Row>,
}

impl Ctx<'_> {
    fn row(&mut self, quantity: impl Into<String>, value: f64, bound: Option<f64>, slack: Option<f64>) {
        self.rows.push(Row {
            experiment: self.cfg.experiment.name().into(),
            n: self.cfg.n,
            level: self.levels.section,
            seed: self.cfg.seed,
            quantity: quantity.into(),
            value,
            bound,
            slack,
        });
    }

    fn build(&self, spec: &BodySpec) -> Result<StarBody, CliError> {
        Ok(with_section_level(spec, self.cfg.level).build(self.cfg.n)?)
    }

    fn body(&self) -> Result<StarBody, CliError> {
        let spec = self.cfg.body.as_ref().ok_or_else(|| CliError::Config("missing body".into()))?;
        self.build(spec)
    }

    fn measure(&self) -> Measure {
        self.cfg.measure.clone().unwrap_or(Measure::Lebesgue)
    }

    fn dictionary(&self) -> DictionaryConfig {
        self.cfg.dictionary.clone().unwrap_or_default()
    }

    fn member(&self) -> Result<CertifiedMember, CliError> {
        let spec = self.cfg.body.as_ref().ok_or_else(|| CliError::Config("missing body".into()))?;
        Ok(match spec {
            BodySpec::Ball { radius } => CertifiedMember::ball(self.cfg.n, *radius)?,
            BodySpec::Ellipsoid { .. } => match self.build(spec)?.kind() {
                cxbody::BodyKind::Ellipsoid(p) => CertifiedMember::ellipsoid(ComplexEllipsoidParams::clone(p))?,
                _ => unreachable!("an ellipsoid description builds an ellipsoid"),
            },
            _ => CertifiedMember::certify(self.build(spec)?, &self.dictionary(), MEMBER_TOL)?,
        })
    }
}

/// Gives every `intersection_of` without its own level the override.
fn with_section_level(spec: &BodySpec, level: Option<usize>) -> BodySpec {
    match spec {
        BodySpec::IntersectionOf { body, level: own } => {
            BodySpec::IntersectionOf { body: Box::new(with_section_level(body, level)), level: own.or(level) }
        }
        BodySpec::RadialSum { parts } => BodySpec::RadialSum { parts: parts.iter().map(|p| with_section_level(p, level)).collect() },
        other => other.clone(),
    }
}

/// Runs the experiment without touching the filesystem.
pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let mut ctx = Ctx { cfg, levels: Levels::resolve(cfg), rows: Vec::new() };
    let (details, plots, violation) = match cfg.experiment {
        Experiment::Intersect => intersect(&mut ctx)?,
        Experiment::Membership => membership(&mut ctx)?,
        Experiment::Approximate => approximate(&mut ctx)?,
        Experiment::Stability | Experiment::Hyperplane | Experiment::BpCompare => {
            if cfg.body.is_some() {
                single_body(&mut ctx)?
            } else {
                randomized_suite(&mut ctx)?
            }
        }
        Experiment::Sharpness => sharpness(&mut ctx)?,
        Experiment::Busemann => busemann(&mut ctx)?,
        Experiment::Roundness => roundness(&mut ctx)?,
    };
    Ok(Outcome { rows: ctx.rows, details, plots, violation })
}

type Parts = (Value, Vec<PlotData>, bool);

fn intersect(ctx: &mut Ctx) -> Result<Parts, CliError> {
    let n = ctx.cfg.n;
    let source = ctx.body()?;
    let radon = RadonConfig::with_level(n, ctx.levels.section)?;
    let ic = StarBody::intersection_of(source.clone(), radon)?;
    let icfg = ctx.levels.inequality(n)?;
    let nodes = icfg.outer.reps();
    let mut plot = PlotData::new("radial", &["k", "rho_source", "rho_intersection"]);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (k, u) in nodes.iter().enumerate() {
        let (a, b) = (source.radial(u)?, ic.radial(u)?);
        lo = lo.min(b);
        hi = hi.max(b);
        plot.push(vec![k as f64, a, b]);
    }
    let vol_source = volume(&source, &icfg)?;
    let vol = volume(&ic, &icfg)?;
    ctx.row("rho_min", lo, None, None);
    ctx.row("rho_max", hi, None, None);
    ctx.row("volume_source", vol_source, None, None);
    ctx.row("volume_intersection", vol, None, None);
    Ok((json!({ "nodes": nodes.len(), "rho_min": lo, "rho_max": hi, "volume_source": vol_source, "volume_intersection": vol }), vec![plot], false))
}

fn membership(ctx: &mut Ctx) -> Result<Parts, CliError> {
    let body = ctx.body()?;
    let tol = ctx.cfg.tolerance.unwrap_or(MEMBER_TOL);
    let cert = membership_test(&body, &ctx.dictionary(), tol)?;
    ctx.row("residual_rel", cert.residual_rel, Some(tol), Some(tol - cert.residual_rel));
    ctx.row("residual_sup", cert.residual_sup, None, None);
    ctx.row("atoms", cert.atoms.len() as f64, None, None);
    Ok((json!({ "certificate": cert }), Vec::new(), false))
}

/// Dictionary used by `approximate` when the config gives none.
pub fn approximation_dictionary() -> DictionaryConfig {
    DictionaryConfig { grid_size: 13, span: 8.0, ..DictionaryConfig::default() }
}

fn approximate(ctx: &mut Ctx) -> Result<Parts, CliError> {
    let body = ctx.body()?;
    let budgets = ctx.cfg.budgets.clone().unwrap_or_else(|| vec![4, 16, 64]);
    let dict = ctx.cfg.dictionary.clone().unwrap_or_else(approximation_dictionary);
    let ladder = goodey_weil_ladder(&body, &budgets, &dict)?;
    let mut plot = PlotData::new("approximation", &["m", "radial_error", "residual_rel", "atoms"]);
    for a in &ladder {
        ctx.row(format!("radial_error[m={}]", a.budget), a.radial_error, None, None);
        ctx.row(format!("residual_rel[m={}]", a.budget), a.residual_rel, None, None);
        plot.push(vec![a.budget as f64, a.radial_error, a.residual_rel, a.atoms.len() as f64]);
    }
    Ok((json!({ "dictionary": dict, "ladder": ladder }), vec![plot], false))
}

fn default_tolerance(e: Experiment) -> f64 {
    match e {
        Experiment::Stability => 1e-6,
        Experiment::Hyperplane | Experiment::Sharpness => 1e-4,
        Experiment::Busemann => 1e-7,
        _ => 0.0,
    }
}

fn single_body(ctx: &mut Ctx) -> Result<Parts, CliError> {
    let n = ctx.cfg.n;
    let k = ctx.member()?;
    let gamma = ctx.measure();
    let icfg = ctx.levels.inequality(n)?;
    let tol = ctx.cfg.tolerance.unwrap_or(default_tolerance(ctx.cfg.experiment));
    let cert = k.certificate().cloned();
    match ctx.cfg.experiment {
        Experiment::Hyperplane => {
            let ratio = hyperplane_ratio(&k, &gamma, &icfg)?;
            let bound = hyperplane_bound(n);
            ctx.row("hyperplane_ratio", ratio, Some(bound), Some(bound - ratio));
            Ok((json!({ "ratio": ratio, "bound": bound, "certificate": cert }), Vec::new(), ratio > bound + tol))
        }
        Experiment::Stability => {
            let l = ctx.build(ctx.cfg.reference.as_ref().expect("validated"))?;
            let r = stability_check(&k, &l, &gamma, &icfg)?;
            ctx.row("gamma_k", r.lhs, Some(r.rhs), Some(r.slack));
            ctx.row("epsilon_star", r.epsilon_star, None, None);
            Ok((json!({ "stability": r, "certificate": cert }), Vec::new(), r.slack < -tol))
        }
        Experiment::BpCompare => {
            let l = ctx.build(ctx.cfg.reference.as_ref().expect("validated"))?;
            let r = busemann_petty_compare(&k, &l, &gamma, &icfg)?;
            ctx.row("max_section_excess", r.max_section_excess, Some(0.0), Some(-r.max_section_excess));
            ctx.row("measure_gap", r.measure_gap, Some(0.0), Some(r.measure_gap));
            let bad = r.sections_dominated && !r.measures_ordered;
            Ok((json!({ "busemann_petty": r, "certificate": cert }), Vec::new(), bad))
        }
        _ => unreachable!(),
    }
}

fn randomized_suite(ctx: &mut Ctx) -> Result<Parts, CliError> {
    let n = ctx.cfg.n;
    let trials = ctx.cfg.trials.unwrap_or(100);
    let icfg = ctx.levels.inequality(n)?;
    let tol = ctx.cfg.tolerance.unwrap_or(default_tolerance(ctx.cfg.experiment));
    let bound = hyperplane_bound(n);
    let mut plot = match ctx.cfg.experiment {
        Experiment::Stability => PlotData::new("stability", &["trial", "lhs", "rhs", "slack"]),
        Experiment::Hyperplane => PlotData::new("hyperplane", &["trial", "ratio", "bound"]),
        _ => PlotData::new("bp_compare", &["trial", "max_section_excess", "measure_gap"]),
    };
    let (mut violation, mut worst, mut dominated) = (false, f64::INFINITY, 0usize);
    let mut reports = Vec::with_capacity(trials);
    for i in 0..trials {
        let mut rng = trial_rng(ctx.cfg.seed, i as u64);
        let k = random_member(&mut rng, n)?;
        let l = random_lq_body(&mut rng, n)?;
        let gamma = random_measure(&mut rng, n);
        let gamma = ctx.cfg.measure.clone().unwrap_or(gamma);
        let r = evaluate_trial(&k, &l, &gamma, &icfg)?;
        let t = i as f64;
        match ctx.cfg.experiment {
            Experiment::Stability => {
                let s = &r.stability;
                ctx.row(format!("stability[{i}]"), s.lhs, Some(s.rhs), Some(s.slack));
                plot.push(vec![t, s.lhs, s.rhs, s.slack]);
                worst = worst.min(s.slack);
                violation |= s.slack < -tol;
            }
            Experiment::Hyperplane => {
                ctx.row(format!("hyperplane_ratio[{i}]"), r.hyperplane_ratio, Some(bound), Some(bound - r.hyperplane_ratio));
                plot.push(vec![t, r.hyperplane_ratio, bound]);
                worst = worst.min(bound - r.hyperplane_ratio);
                violation |= r.hyperplane_ratio > bound + tol;
            }
            _ => {
                let b = &r.busemann_petty;
                if b.sections_dominated {
                    dominated += 1;
                    worst = worst.min(b.measure_gap);
                    violation |= !b.measures_ordered;
                }
                ctx.row(format!("measure_gap[{i}]"), b.measure_gap, Some(0.0), Some(b.measure_gap));
                plot.push(vec![t, b.max_section_excess, b.measure_gap]);
            }
        }
        reports.push(r);
    }
    ctx.row("worst_slack", if worst.is_finite() { worst } else { 0.0 }, None, None);
    if ctx.cfg.experiment == Experiment::BpCompare {
        ctx.row("dominated_trials", dominated as f64, None, None);
    }
    Ok((json!({ "trials": trials, "reports": reports }), vec![plot], violation))
}

fn sharpness(ctx: &mut Ctx) -> Result<Parts, CliError> {
    let n = ctx.cfg.n;
    let js = ctx.cfg.j_values.clone().unwrap_or_else(|| vec![10, 50, 200]);
    let icfg = ctx.levels.inequality(n)?;
    let tol = ctx.cfg.tolerance.unwrap_or(default_tolerance(Experiment::Sharpness));
    let ball = CertifiedMember::ball(n, 1.0)?;
    let bound = hyperplane_bound(n);
    let mut plot = PlotData::new("sharpness", &["j", "ratio", "bound"]);
    let mut ratios = Vec::new();
    for &j in &js {
        let r = hyperplane_ratio(&ball, &Measure::Annulus { j }, &icfg)?;
        ctx.row(format!("ratio[j={j}]"), r, Some(bound), Some(bound - r));
        plot.push(vec![j as f64, r, bound]);
        ratios.push(r);
    }
    let violation = ratios.iter().any(|r| *r > bound + tol);
    Ok((json!({ "j": js, "ratios": ratios, "bound": bound }), vec![plot], violation))
}

fn busemann(ctx: &mut Ctx) -> Result<Parts, CliError> {
    let n = ctx.cfg.n;
    let body = ctx.body()?;
    let tol = ctx.cfg.tolerance.unwrap_or(default_tolerance(Experiment::Busemann));
    let samples = ctx.cfg.samples.unwrap_or(10_000);
    let ic = StarBody::intersection_of(body.clone(), RadonConfig::with_level(n, ctx.levels.section)?)?;
    let conv = convexity_check(&ic, samples, tol, ctx.cfg.seed)?;
    ctx.row("convexity_violations", conv.violations as f64, Some(0.0), Some(conv.worst_slack));
    let mut violation = conv.violations > 0;
    let curve = if n >= 3 {
        let trials = ctx.cfg.trials.unwrap_or(100);
        let curve_tol = ctx.cfg.tolerance.unwrap_or(1e-6);
        let radon = RadonConfig::with_level(n, ctx.cfg.level.unwrap_or(default_section_level(n)))?;
        let r = busemann_curve_check(&body, trials, curve_tol, ctx.cfg.seed, &radon)?;
        ctx.row("curve_violations", r.violations as f64, Some(0.0), Some(r.worst_slack));
        violation |= r.violations > 0;
        Some(r)
    } else {
        None
    };
    Ok((json!({ "convexity": conv, "curve": curve }), Vec::new(), violation))
}

fn roundness(ctx: &mut Ctx) -> Result<Parts, CliError> {
    let n = ctx.cfg.n;
    let body = ctx.body()?;
    let rule = sphere_rule(2 * n, ctx.levels.outer, 0)?;
    let r = roundness_estimate(&body, &rule)?;
    ctx.row("roundness", r, None, None);
    Ok((json!({ "roundness": r, "report_only": true }), Vec::new(), false))
}

/// Provenance block stored with every result.
pub fn provenance(cfg: &ExperimentConfig) -> Value {
    let constants = Constants::new(cfg.n);
    json!({
        "experiment": cfg.experiment.name(),
        "n": cfg.n,
        "seed": cfg.seed,
        "levels": Levels::resolve(cfg),
        "corrected_constant": constants.corrected_constant,
        "constants": constants,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

/// Applies command-line overrides.
pub fn apply_overrides(cfg: &mut ExperimentConfig, level: Option<usize>, seed: Option<u64>, out: Option<PathBuf>) {
    if level.is_some() {
        cfg.level = level;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if out.is_some() {
        cfg.output = out;
    }
}

/// Runs `cfg` and writes its files into the output directory.
pub fn run(cfg: &ExperimentConfig) -> Result<(Outcome, PathBuf), CliError> {
    let outcome = execute(cfg)?;
    let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("results"));
    write_outputs(&dir, cfg, &outcome)?;
    Ok((outcome, dir))
}

pub fn write_outputs(dir: &Path, cfg: &ExperimentConfig, outcome: &Outcome) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    // where the files land is not part of the result
    let cfg = &ExperimentConfig { output: None, ..cfg.clone() };
    output::write_csv(&dir.join("results.csv"), &outcome.rows)?;
    let doc = json!({
        "config": cfg,
        "provenance": provenance(cfg),
        "violation": outcome.violation,
        "rows": outcome.rows,
        "details": outcome.details,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    std::fs::write(dir.join("results.json"), text)?;
    for p in &outcome.plots {
        output::write_plot(dir, p)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(text).unwrap()
    }

    #[test]
    fn hyperplane_ball_matches_d2() {
        let out = execute(&cfg(r#"{"experiment": "hyperplane", "n": 2, "body": {"type": "ball", "radius": 1}}"#)).unwrap();
        let r = &out.rows[0];
        assert!((r.value - 0.5f64.sqrt()).abs() < 1e-6, "{}", r.value);
        assert!((r.bound.unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!(r.slack.unwrap() > 0.0);
        assert!(!out.violation);
    }

    #[test]
    fn level_override_reaches_nested_intersections() {
        let spec = BodySpec::RadialSum {
            parts: vec![BodySpec::IntersectionOf { body: Box::new(BodySpec::Ball { radius: 1.0 }), level: None }],
        };
        match with_section_level(&spec, Some(5)) {
            BodySpec::RadialSum { parts } => assert!(matches!(parts[0], BodySpec::IntersectionOf { level: Some(5), .. })),
            _ => panic!(),
        }
    }

    #[test]
    fn provenance_records_corrected_constant() {
        let p = provenance(&cfg(r#"{"experiment": "sharpness", "n": 2}"#));
        assert_eq!(p["corrected_constant"], json!(true));
        assert_eq!(p["levels"]["section"], json!(8));
    }
}
