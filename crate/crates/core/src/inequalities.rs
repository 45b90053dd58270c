//! Measure inequalities for complex intersection bodies: the stability
//! estimate, the hyperplane inequality and its sharpness, Busemann-Petty
//! comparisons, and the one-dimensional integral lemma behind them.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::body::{ComplexEllipsoidParams, StarBody};
use crate::constants::{ball_volume, hyperplane_bound};
use crate::error::{Error, Result};
use crate::geometry::random_unit;
use crate::measure::Measure;
use crate::membership::{CertifiedMember, EllipsoidAtom};
use crate::parallel::par_try_map;
use crate::quadrature::{gauss_legendre, polar_integrate, sphere_rule, RadialRule, SphereRule};
use crate::radon::{measure_of_section, RadonConfig};

/// Quadrature used by the inequality checks: an outer rule on `S^{2n-1}`
/// for body measures, a coarser rule whose orbit representatives serve as
/// hyperplane normals, and a Radon configuration for sections.
#[derive(Clone, Debug)]
pub struct InequalityConfig {
    pub outer: Arc<SphereRule>,
    pub normals: Arc<SphereRule>,
    pub radon: RadonConfig,
}

/// Default `(outer, normals, section)` levels.
pub fn default_levels(n: usize) -> (usize, usize, usize) {
    match n {
        2 => (12, 12, 8),
        3 => (8, 6, 8),
        _ => (4, 4, 6),
    }
}

impl InequalityConfig {
    pub fn new(n: usize) -> Result<Self> {
        let (o, m, s) = default_levels(n);
        Self::with_rules(n, o, m, s, RadialRule::new(8, 8)?)
    }

    pub fn with_levels(n: usize, outer_level: usize, section_level: usize) -> Result<Self> {
        Self::with_rules(n, outer_level, outer_level, section_level, RadialRule::default())
    }

    /// Explicit levels for all three rules and the radial rule.
    pub fn with_rules(n: usize, outer_level: usize, normal_level: usize, section_level: usize, radial: RadialRule) -> Result<Self> {
        let outer = Arc::new(sphere_rule(2 * n, outer_level, 0)?);
        let normals = if normal_level == outer_level { outer.clone() } else { Arc::new(sphere_rule(2 * n, normal_level, 0)?) };
        Ok(InequalityConfig { outer, normals, radon: RadonConfig::with_rules(n, section_level, 0, radial)? })
    }

    pub fn n(&self) -> usize {
        self.radon.n()
    }

    pub fn outer_level(&self) -> usize {
        self.outer.level()
    }

    pub fn normal_level(&self) -> usize {
        self.normals.level()
    }

    pub fn section_level(&self) -> usize {
        self.radon.section_level()
    }

    /// Normals over which section maxima are taken.
    pub fn normal_set(&self) -> Vec<Vec<f64>> {
        self.normals.reps()
    }

    fn check(&self, body: &StarBody) -> Result<()> {
        if body.n() != self.n() {
            return Err(Error::AmbientMismatch { left: body.n(), right: self.n() });
        }
        Ok(())
    }
}

/// `γ(K)`.
pub fn body_measure(gamma: &Measure, body: &StarBody, cfg: &InequalityConfig) -> Result<f64> {
    cfg.check(body)?;
    gamma.validate(body.n())?;
    polar_integrate(gamma, body, &cfg.outer, cfg.radon.radial())
}

/// `|K|`.
pub fn volume(body: &StarBody, cfg: &InequalityConfig) -> Result<f64> {
    body_measure(&Measure::Lebesgue, body, cfg)
}

/// `γ(K ∩ H_ξ)` at every normal of `cfg`.
pub fn section_measures(gamma: &Measure, body: &StarBody, cfg: &InequalityConfig) -> Result<Vec<f64>> {
    cfg.check(body)?;
    gamma.validate(body.n())?;
    let reps = &cfg.normals;
    par_try_map(reps.rep_count(), |i| measure_of_section(gamma, body, reps.rep(i), &cfg.radon))
}

/// The quantities of one body under one measure.
#[derive(Clone, Debug, PartialEq)]
pub struct BodyData {
    pub sections: Vec<f64>,
    pub measure: f64,
    pub volume: f64,
}

impl BodyData {
    pub fn compute(gamma: &Measure, body: &StarBody, cfg: &InequalityConfig) -> Result<Self> {
        Ok(BodyData { sections: section_measures(gamma, body, cfg)?, measure: body_measure(gamma, body, cfg)?, volume: volume(body, cfg)? })
    }

    pub fn max_section(&self) -> f64 {
        self.sections.iter().fold(0.0f64, |m, v| m.max(*v))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// `max_ξ (γ(K∩H_ξ) - γ(L∩H_ξ))₊` over the normals.
    pub epsilon_star: f64,
    /// `γ(K)`.
    pub lhs: f64,
    /// `γ(L) + (n/(n-1)) d_n ε |K|^{1/n}`.
    pub rhs: f64,
    pub slack: f64,
}

impl StabilityReport {
    pub fn from_data(n: usize, k: &BodyData, l: &BodyData) -> Self {
        let epsilon_star = k.sections.iter().zip(&l.sections).map(|(a, b)| a - b).fold(0.0, f64::max);
        let rhs = l.measure + hyperplane_bound(n) * epsilon_star * k.volume.powf(1.0 / n as f64);
        StabilityReport { epsilon_star, lhs: k.measure, rhs, slack: rhs - k.measure }
    }
}

fn pair_data(k: &CertifiedMember, l: &StarBody, gamma: &Measure, cfg: &InequalityConfig) -> Result<(BodyData, BodyData)> {
    let kb = k.body();
    if kb.ambient() != l.ambient() {
        return Err(Error::AmbientMismatch { left: kb.n(), right: l.n() });
    }
    Ok((BodyData::compute(gamma, kb, cfg)?, BodyData::compute(gamma, l, cfg)?))
}

/// Compares `γ(K)` with the bound the stability estimate gives in terms of
/// `γ(L)` and the largest section excess.
pub fn stability_check(k: &CertifiedMember, l: &StarBody, gamma: &Measure, cfg: &InequalityConfig) -> Result<StabilityReport> {
    let (dk, dl) = pair_data(k, l, gamma, cfg)?;
    Ok(StabilityReport::from_data(k.n(), &dk, &dl))
}

/// `γ(K) / (max_ξ γ(K∩H_ξ) · |K|^{1/n})` from precomputed data.
pub fn hyperplane_ratio_from(n: usize, k: &BodyData) -> Result<f64> {
    let max = k.max_section();
    if !(max > 0.0) {
        return Err(Error::ZeroSection);
    }
    Ok(k.measure / (max * k.volume.powf(1.0 / n as f64)))
}

/// `γ(K) / (max_ξ γ(K∩H_ξ) · |K|^{1/n})`.
pub fn hyperplane_ratio(k: &CertifiedMember, gamma: &Measure, cfg: &InequalityConfig) -> Result<f64> {
    hyperplane_ratio_from(k.n(), &BodyData::compute(gamma, k.body(), cfg)?)
}

/// `|B^{2n}| / (|B^{2n-2}| · |B^{2n}|^{1/n})`, the hyperplane ratio of a
/// Euclidean ball under Lebesgue measure, which equals `d_n`.
pub fn ball_ratio(n: usize) -> f64 {
    let v = ball_volume(2 * n);
    v / (ball_volume(2 * n - 2) * v.powf(1.0 / n as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BpComparison {
    pub sections_dominated: bool,
    pub measures_ordered: bool,
    /// `max_ξ (γ(K∩H_ξ) - γ(L∩H_ξ))`.
    pub max_section_excess: f64,
    /// `γ(L) - γ(K)`.
    pub measure_gap: f64,
}

pub const SECTION_TOL: f64 = 1e-9;
pub const MEASURE_TOL: f64 = 1e-6;

impl BpComparison {
    pub fn from_data(k: &BodyData, l: &BodyData) -> Self {
        let excess = k.sections.iter().zip(&l.sections).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
        let gap = l.measure - k.measure;
        BpComparison {
            sections_dominated: excess <= SECTION_TOL,
            measures_ordered: gap >= -MEASURE_TOL,
            max_section_excess: excess,
            measure_gap: gap,
        }
    }
}

/// Section-wise domination of `K` by `L` and the resulting order of measures.
pub fn busemann_petty_compare(k: &CertifiedMember, l: &StarBody, gamma: &Measure, cfg: &InequalityConfig) -> Result<BpComparison> {
    let (dk, dl) = pair_data(k, l, gamma, cfg)?;
    Ok(BpComparison::from_data(&dk, &dl))
}

/// All three comparisons for one `(K, L, γ)` triple, sharing the section
/// computations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub stability: StabilityReport,
    pub hyperplane_ratio: f64,
    pub busemann_petty: BpComparison,
}

pub fn evaluate_trial(k: &CertifiedMember, l: &StarBody, gamma: &Measure, cfg: &InequalityConfig) -> Result<TrialReport> {
    let (dk, dl) = pair_data(k, l, gamma, cfg)?;
    Ok(TrialReport {
        stability: StabilityReport::from_data(k.n(), &dk, &dl),
        hyperplane_ratio: hyperplane_ratio_from(k.n(), &dk)?,
        busemann_petty: BpComparison::from_data(&dk, &dl),
    })
}

/// Both sides of the integral lemma
/// `∫_0^a r^{2n-1} g - a² ∫_0^a r^{2n-3} g ≤ ∫_0^b r^{2n-1} g - a² ∫_0^b r^{2n-3} g`.
///
/// `breaks` lists points where `g` may jump; each piece between consecutive
/// breaks is integrated by 16-point Gauss-Legendre.
pub fn zvavitch_sides<G: Fn(f64) -> f64>(g: G, breaks: &[f64], a: f64, b: f64, n: usize) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("limits must be nonnegative, got a={a}, b={b}")));
    }
    let (gx, gw) = gauss_legendre(16);
    let moment = |upper: f64, p: i32| -> f64 {
        let mut edges: Vec<f64> = breaks.iter().copied().filter(|t| *t > 0.0 && *t < upper).collect();
        edges.push(0.0);
        edges.push(upper);
        edges.sort_by(f64::total_cmp);
        edges
            .windows(2)
            .map(|w| {
                let h = w[1] - w[0];
                gx.iter()
                    .zip(&gw)
                    .map(|(x, wt)| {
                        let r = w[0] + 0.5 * h * (x + 1.0);
                        0.5 * h * wt * r.powi(p) * g(r)
                    })
                    .sum::<f64>()
            })
            .sum()
    };
    let p = 2 * n as i32;
    let side = |upper: f64| moment(upper, p - 1) - a * a * moment(upper, p - 3);
    Ok((side(a), side(b)))
}

/// Whether the integral lemma holds for `g` within `1e-10`.
pub fn zvavitch_check<G: Fn(f64) -> f64>(g: G, breaks: &[f64], a: f64, b: f64, n: usize) -> Result<bool> {
    let (lhs, rhs) = zvavitch_sides(g, breaks, a, b, n)?;
    Ok(lhs <= rhs + 1e-10)
}

/// A nonnegative step function on `[0, ∞)`: `values[i]` on
/// `[breaks[i], breaks[i+1])`, zero past the last break.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    pub breaks: Vec<f64>,
    pub values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.len() != values.len() + 1 {
            return Err(Error::DimensionMismatch { expected: values.len() + 1, got: breaks.len() });
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) || values.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidParameter("step function needs increasing breaks and nonnegative values".into()));
        }
        Ok(StepFunction { breaks, values })
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self.breaks.partition_point(|t| *t <= r) {
            0 => 0.0,
            i if i > self.values.len() => 0.0,
            i => self.values[i - 1],
        }
    }

    /// Random step function with `pieces` pieces on `[0, len]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, pieces: usize, len: f64) -> Self {
        let mut breaks: Vec<f64> = (0..pieces.saturating_sub(1)).map(|_| rng.random_range(0.0..len)).collect();
        breaks.push(0.0);
        breaks.push(len);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let values = (0..breaks.len() - 1).map(|_| rng.random_range(0.0..1.0)).collect();
        StepFunction { breaks, values }
    }
}

/// Per-trial generator derived from a root seed.
pub fn trial_rng(root: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(trial);
    rng
}

/// Radial sum of one to three complex ellipsoids with radii in `[0.7, 1.4]`.
pub fn random_member<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<CertifiedMember> {
    let count = rng.random_range(1..=3);
    let atoms: Vec<EllipsoidAtom> = (0..count)
        .map(|_| EllipsoidAtom {
            a: rng.random_range(0.7..1.4),
            b: rng.random_range(0.7..1.4),
            xi: random_unit(rng, 2 * n),
            w: rng.random_range(0.2..1.0) / count as f64,
        })
        .collect();
    CertifiedMember::from_atoms(&atoms)
}

/// A single complex ellipsoid with radii in `[0.7, 1.4]`.
pub fn random_ellipsoid<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<CertifiedMember> {
    let p = ComplexEllipsoidParams::new(rng.random_range(0.7..1.4), rng.random_range(0.7..1.4), random_unit(rng, 2 * n))?;
    CertifiedMember::ellipsoid(p)
}

/// Complex `ℓ_q` ball with `q ∈ [1, 4]`, dilated by a factor in `[0.6, 1.6]`.
pub fn random_lq_body<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<StarBody> {
    let q = rng.random_range(1.0..4.0);
    let scale = rng.random_range(0.6..1.6);
    StarBody::lq_ball_scaled(n, q, scale)
}

/// Lebesgue, isotropic Gaussian, or complex Gaussian with random widths.
pub fn random_measure<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Measure {
    match rng.random_range(0..3) {
        0 => Measure::Lebesgue,
        1 => Measure::Gaussian { sigma: rng.random_range(0.4..2.0) },
        _ => Measure::ComplexGaussian { sigmas: (0..n).map(|_| rng.random_range(0.4..2.0)).collect() },
    }
}
