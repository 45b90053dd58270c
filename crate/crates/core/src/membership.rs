//! Membership in the class of complex intersection bodies, tested by fitting
//! `ρ_K²` with a nonnegative combination of complex-ellipsoid atoms
//! `‖x‖_{E_{a,b}(ξ)}^{-2}`.
//!
//! A small residual certifies that `K` is close to a radial sum of complex
//! ellipsoids, hence to a complex intersection body. A large residual is only
//! evidence against membership.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::body::{ComplexEllipsoidParams, StarBody};
use crate::error::{Error, Result};
use crate::geometry::random_unit;
use crate::nnls::{nnls, Columns, NnlsOptions};
use crate::parallel::{par_map, par_try_map};

/// One weighted atom `w·‖x‖_{E_{a,b}(ξ)}^{-2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidAtom {
    pub a: f64,
    pub b: f64,
    pub xi: Vec<f64>,
    pub w: f64,
}

impl EllipsoidAtom {
    pub fn params(&self) -> Result<ComplexEllipsoidParams> {
        ComplexEllipsoidParams::new(self.a, self.b, self.xi.clone())
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let p = ComplexEllipsoidParams { a: self.a, b: self.b, xi: self.xi.clone() };
        self.w * p.atom(x)
    }

    /// The ellipsoid whose `ρ²` equals this atom: `E_{√w a, √w b}(ξ)`.
    pub fn ellipsoid(&self) -> Result<StarBody> {
        let s = self.w.sqrt();
        StarBody::ellipsoid(ComplexEllipsoidParams::new(s * self.a, s * self.b, self.xi.clone())?)
    }
}

/// Sum of atom values at `x`.
pub fn atom_sum(atoms: &[EllipsoidAtom], x: &[f64]) -> f64 {
    atoms.iter().map(|t| t.value(x)).sum()
}

/// The radial sum of the ellipsoids represented by `atoms`.
pub fn atom_body(atoms: &[EllipsoidAtom]) -> Result<StarBody> {
    let parts = atoms.iter().filter(|t| t.w > 0.0).map(EllipsoidAtom::ellipsoid).collect::<Result<Vec<_>>>()?;
    StarBody::radial_sum_of(parts)
}

/// How the dictionary and evaluation nodes are generated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DictionaryConfig {
    /// Number of values on the geometric radius grid.
    pub grid_size: usize,
    /// The grid spans `[ρ_min / span, span · ρ_max]`.
    pub span: f64,
    /// Directions `ξ_j`; `None` uses 64 for `n = 2` and 256 otherwise.
    pub directions: Option<usize>,
    /// Evaluation nodes; `None` uses 1000 for `n = 2` and 3000 otherwise.
    pub eval_nodes: Option<usize>,
    /// Also use the complex coordinate axes as directions.
    pub axes: bool,
    pub seed: u64,
    pub max_iter: usize,
}

impl Default for DictionaryConfig {
    fn default() -> Self {
        DictionaryConfig { grid_size: 9, span: 2.0, directions: None, eval_nodes: None, axes: true, seed: 0, max_iter: 5000 }
    }
}

impl DictionaryConfig {
    fn direction_count(&self, n: usize) -> usize {
        self.directions.unwrap_or(if n == 2 { 64 } else { 256 })
    }

    fn node_count(&self, n: usize) -> usize {
        self.eval_nodes.unwrap_or(if n == 2 { 1000 } else { 3000 })
    }
}

/// The dictionary actually used, recorded in certificates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DictionaryDescriptor {
    pub a_grid: Vec<f64>,
    pub b_grid: Vec<f64>,
    /// `(a, b)` pairs kept after merging pairs with equal ratio.
    pub pairs: Vec<(f64, f64)>,
    pub directions: Vec<Vec<f64>>,
    pub eval_nodes: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    MemberWithinTol,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipCertificate {
    pub atoms: Vec<EllipsoidAtom>,
    pub residual_sup: f64,
    pub residual_rel: f64,
    pub verdict: Verdict,
    pub tol: f64,
    pub hit_iteration_cap: bool,
    pub dict: DictionaryDescriptor,
}

/// Unit vector of `C²` whose Bloch point is `(sin φ cos λ, sin φ sin λ, cos φ)`.
fn bloch_lift(p: [f64; 3]) -> Vec<f64> {
    let phi = p[2].clamp(-1.0, 1.0).acos();
    let lam = p[1].atan2(p[0]);
    let (c, s) = ((0.5 * phi).cos(), (0.5 * phi).sin());
    vec![c, 0.0, s * lam.cos(), s * lam.sin()]
}

fn fibonacci_sphere(m: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..m)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / m as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * i as f64;
            [r * t.cos(), r * t.sin(), z]
        })
        .collect()
}

fn axes(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|k| {
            let mut v = vec![0.0; 2 * n];
            v[2 * k] = 1.0;
            v
        })
        .collect()
}

/// Directions on `S^{2n-1}` representing the circle orbits.
///
/// For `n = 2` every circle-invariant function factors through the Bloch
/// sphere, so a Fibonacci set there covers the orbit space evenly.
fn direction_set(n: usize, count: usize, with_axes: bool, seed: u64) -> Vec<Vec<f64>> {
    let mut out = if with_axes { axes(n) } else { Vec::new() };
    if n == 2 {
        out.extend(fibonacci_sphere(count).into_iter().map(bloch_lift));
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        out.extend((0..count).map(|_| random_unit(&mut rng, 2 * n)));
    }
    out
}

/// Evaluation nodes used for fitting and for the reported residual.
pub fn evaluation_nodes(n: usize, cfg: &DictionaryConfig) -> Vec<Vec<f64>> {
    direction_set(n, cfg.node_count(n), true, cfg.seed ^ 0x9e37_79b9_7f4a_7c15)
}

fn geometric_grid(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    if m == 1 {
        return vec![(lo * hi).sqrt()];
    }
    let r = (hi / lo).ln() / (m - 1) as f64;
    (0..m).map(|i| lo * (r * i as f64).exp()).collect()
}

/// One `(a, b)` per distinct ratio on the grid, taken nearest the middle of
/// the grid. Atoms of pairs with equal ratio are proportional.
fn ratio_pairs(grid: &[f64]) -> Vec<(f64, f64)> {
    let m = grid.len() as isize;
    let mid = (m - 1) as f64 / 2.0;
    let mut out = Vec::new();
    for k in -(m - 1)..=(m - 1) {
        let best = (0..m)
            .filter(|&i| (0..m).contains(&(i - k)))
            .min_by(|&i, &j| {
                let di = ((i + i - k) as f64 / 2.0 - mid).abs();
                let dj = ((j + j - k) as f64 / 2.0 - mid).abs();
                di.total_cmp(&dj)
            })
            .expect("nonempty diagonal");
        out.push((grid[best as usize], grid[(best - k) as usize]));
    }
    out
}

struct Problem {
    nodes: Vec<Vec<f64>>,
    target: Vec<f64>,
    dict: DictionaryDescriptor,
    columns: Vec<(f64, f64, usize)>,
    matrix: Columns,
}

fn setup(body: &StarBody, cfg: &DictionaryConfig) -> Result<Problem> {
    if cfg.grid_size == 0 {
        return Err(Error::EmptyDictionary);
    }
    if !(cfg.span.is_finite() && cfg.span >= 1.0) {
        return Err(Error::InvalidParameter(format!("grid span must be at least 1, got {}", cfg.span)));
    }
    let n = body.n();
    let nodes = evaluation_nodes(n, cfg);
    let target: Vec<f64> = par_try_map(nodes.len(), |i| Ok(body.radial(&nodes[i])?.powi(2)))?;
    let rho_min = target.iter().fold(f64::INFINITY, |m, v| m.min(*v)).sqrt();
    let rho_max = target.iter().fold(0.0f64, |m, v| m.max(*v)).sqrt();
    let grid = geometric_grid(rho_min / cfg.span, cfg.span * rho_max, cfg.grid_size);
    let pairs = ratio_pairs(&grid);
    let directions = direction_set(n, cfg.direction_count(n), cfg.axes, cfg.seed);
    let mut columns = Vec::new();
    for &(a, b) in &pairs {
        if a == b {
            columns.push((a, b, 0));
        } else {
            columns.extend((0..directions.len()).map(|j| (a, b, j)));
        }
    }
    let rows = nodes.len();
    let data: Vec<Vec<f64>> = par_map(columns.len(), |c| {
        let (a, b, j) = columns[c];
        let p = ComplexEllipsoidParams { a, b, xi: directions[j].clone() };
        nodes.iter().map(|x| p.atom(x)).collect()
    });
    let matrix = Columns::from_flat(rows, data.into_iter().flatten().collect())?;
    let dict = DictionaryDescriptor {
        a_grid: grid.clone(),
        b_grid: grid,
        pairs,
        directions,
        eval_nodes: rows,
        seed: cfg.seed,
    };
    Ok(Problem { nodes, target, dict, columns, matrix })
}

/// Nonnegative fit restricted to the dictionary columns `subset`; returns
/// `(column, weight)` for the positive weights.
fn fit_subset(p: &Problem, subset: &[usize], max_iter: usize) -> Result<(Vec<(usize, f64)>, bool)> {
    let rows = p.matrix.rows();
    let data: Vec<f64> = subset.iter().flat_map(|&c| p.matrix.col(c).iter().copied()).collect();
    let sub = Columns::from_flat(rows, data)?;
    let sol = nnls(&sub, &p.target, &NnlsOptions { max_iter, ..Default::default() })?;
    let kept = sol.x.iter().zip(subset).filter(|(w, _)| **w > 0.0).map(|(w, &c)| (c, *w)).collect();
    Ok((kept, sol.hit_cap))
}

fn to_atoms(p: &Problem, weights: &[(usize, f64)]) -> Vec<EllipsoidAtom> {
    weights
        .iter()
        .map(|&(c, w)| {
            let (a, b, j) = p.columns[c];
            EllipsoidAtom { a, b, xi: p.dict.directions[j].clone(), w }
        })
        .collect()
}

fn sup_residual(atoms: &[EllipsoidAtom], nodes: &[Vec<f64>], target: &[f64]) -> f64 {
    let res = par_map(nodes.len(), |i| (target[i] - atom_sum(atoms, &nodes[i])).abs());
    res.into_iter().fold(0.0, f64::max)
}

/// Fits `ρ_K²` on the evaluation nodes by nonnegative least squares over the
/// atom dictionary and reports the sup residual.
///
/// The verdict is `MemberWithinTol` iff `residual_sup / max ρ_K² ≤ tol` and
/// the solver stopped on its own criterion.
pub fn membership_test(body: &StarBody, cfg: &DictionaryConfig, tol: f64) -> Result<MembershipCertificate> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be nonnegative, got {tol}")));
    }
    let p = setup(body, cfg)?;
    let all: Vec<usize> = (0..p.columns.len()).collect();
    let (weights, hit_cap) = fit_subset(&p, &all, cfg.max_iter)?;
    let atoms = to_atoms(&p, &weights);
    let residual_sup = sup_residual(&atoms, &p.nodes, &p.target);
    let peak = p.target.iter().fold(0.0f64, |m, v| m.max(*v));
    let residual_rel = residual_sup / peak;
    let verdict = if residual_rel <= tol && !hit_cap { Verdict::MemberWithinTol } else { Verdict::Inconclusive };
    let cert = MembershipCertificate {
        atoms,
        residual_sup,
        residual_rel,
        verdict,
        tol,
        hit_iteration_cap: hit_cap,
        dict: p.dict,
    };
    debug_assert!(verify_certificate(body, &cert).unwrap_or(false));
    Ok(cert)
}

/// Recomputes the atom sum at every evaluation node and checks it against
/// `ρ_K²` within the recorded `residual_sup`.
pub fn verify_certificate(body: &StarBody, cert: &MembershipCertificate) -> Result<bool> {
    let n = body.n();
    let cfg = DictionaryConfig { eval_nodes: Some(cert.dict.eval_nodes.saturating_sub(n)), seed: cert.dict.seed, ..Default::default() };
    let nodes = evaluation_nodes(n, &cfg);
    let slack = cert.residual_sup * (1.0 + 1e-12) + f64::MIN_POSITIVE;
    let ok = par_try_map(nodes.len(), |i| {
        let t = body.radial(&nodes[i])?.powi(2);
        Ok((t - atom_sum(&cert.atoms, &nodes[i])).abs() <= slack)
    })?;
    Ok(ok.into_iter().all(|b| b))
}

/// A body together with evidence that it is (within tolerance) a complex
/// intersection body.
#[derive(Clone, Debug)]
pub struct CertifiedMember {
    body: StarBody,
    certificate: Option<MembershipCertificate>,
}

impl CertifiedMember {
    /// Accepts `body` only with a passing certificate.
    pub fn new(body: StarBody, certificate: MembershipCertificate) -> Result<Self> {
        if certificate.verdict != Verdict::MemberWithinTol {
            return Err(Error::NotCertified { residual_rel: certificate.residual_rel, tol: certificate.tol });
        }
        Ok(CertifiedMember { body, certificate: Some(certificate) })
    }

    /// Runs [`membership_test`] and wraps the body if it passes.
    pub fn certify(body: StarBody, cfg: &DictionaryConfig, tol: f64) -> Result<Self> {
        let cert = membership_test(&body, cfg, tol)?;
        Self::new(body, cert)
    }

    /// A radial sum of complex ellipsoids, a member by construction.
    pub fn from_atoms(atoms: &[EllipsoidAtom]) -> Result<Self> {
        Ok(CertifiedMember { body: atom_body(atoms)?, certificate: None })
    }

    /// A Euclidean ball, itself a complex ellipsoid.
    pub fn ball(n: usize, radius: f64) -> Result<Self> {
        Ok(CertifiedMember { body: StarBody::ball(n, radius)?, certificate: None })
    }

    /// A complex ellipsoid `E_{a,b}(ξ)`.
    pub fn ellipsoid(params: ComplexEllipsoidParams) -> Result<Self> {
        Ok(CertifiedMember { body: StarBody::ellipsoid(params)?, certificate: None })
    }

    pub fn body(&self) -> &StarBody {
        &self.body
    }

    pub fn certificate(&self) -> Option<&MembershipCertificate> {
        self.certificate.as_ref()
    }

    pub fn n(&self) -> usize {
        self.body.n()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Approximation {
    pub atoms: Vec<EllipsoidAtom>,
    pub budget: usize,
    /// `max |ρ_K - ρ_sum|` over the evaluation nodes.
    pub radial_error: f64,
    pub residual_rel: f64,
}

fn summarize(p: &Problem, weights: &[(usize, f64)], budget: usize) -> Approximation {
    let atoms = to_atoms(p, weights);
    let residual_sup = sup_residual(&atoms, &p.nodes, &p.target);
    let peak = p.target.iter().fold(0.0f64, |a, v| a.max(*v));
    let errs = par_map(p.nodes.len(), |i| (p.target[i].sqrt() - atom_sum(&atoms, &p.nodes[i]).sqrt()).abs());
    Approximation { atoms, budget, radial_error: errs.into_iter().fold(0.0, f64::max), residual_rel: residual_sup / peak }
}

/// Radial sums of at most `m` ellipsoids for each budget in `budgets`.
///
/// Starts from the unrestricted nonnegative fit and repeatedly discards the
/// atoms contributing least (weight times column norm), refitting on the
/// survivors, so the supports for decreasing budgets are nested.
pub fn goodey_weil_ladder(body: &StarBody, budgets: &[usize], cfg: &DictionaryConfig) -> Result<Vec<Approximation>> {
    if budgets.contains(&0) {
        return Err(Error::InvalidParameter("atom budget must be positive".into()));
    }
    let p = setup(body, cfg)?;
    let all: Vec<usize> = (0..p.columns.len()).collect();
    let (mut weights, _) = fit_subset(&p, &all, cfg.max_iter)?;
    let mut order: Vec<usize> = (0..budgets.len()).collect();
    order.sort_by(|&i, &j| budgets[j].cmp(&budgets[i]));
    let mut out: Vec<Option<Approximation>> = vec![None; budgets.len()];
    for idx in order {
        let m = budgets[idx];
        while weights.len() > m {
            let excess = weights.len() - m;
            let drop = (weights.len() / 10).clamp(1, excess);
            let mut ranked: Vec<(f64, usize)> = weights
                .iter()
                .map(|&(c, w)| (w * crate::geometry::norm(p.matrix.col(c)), c))
                .collect();
            ranked.sort_by(|x, y| x.0.total_cmp(&y.0));
            let keep: Vec<usize> = ranked[drop..].iter().map(|&(_, c)| c).collect();
            weights = fit_subset(&p, &keep, cfg.max_iter)?.0;
        }
        out[idx] = Some(summarize(&p, &weights, m));
    }
    Ok(out.into_iter().map(|a| a.expect("every budget visited")).collect())
}

/// Best radial sum of at most `m` ellipsoids, with its radial-metric error
/// to `K`.
pub fn goodey_weil_approximate(body: &StarBody, m: usize, cfg: &DictionaryConfig) -> Result<Approximation> {
    Ok(goodey_weil_ladder(body, &[m], cfg)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{complex_inner_sq, norm};

    #[test]
    fn bloch_lift_matches_inner_products() {
        let pts = fibonacci_sphere(20);
        for p in &pts {
            for q in &pts {
                let (u, v) = (bloch_lift(*p), bloch_lift(*q));
                assert!((norm(&u) - 1.0).abs() < 1e-14);
                let d = p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
                assert!((complex_inner_sq(&u, &v) - 0.5 * (1.0 + d)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ratio_pairs_cover_all_ratios() {
        let g = geometric_grid(1.0, 256.0, 9);
        let pairs = ratio_pairs(&g);
        assert_eq!(pairs.len(), 17);
        let mut ratios: Vec<f64> = pairs.iter().map(|(a, b)| (a / b).log2()).collect();
        ratios.sort_by(f64::total_cmp);
        for (k, r) in ratios.iter().enumerate() {
            assert!((r - (k as f64 - 8.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn ball_is_one_atom() {
        let k = StarBody::ball(2, 1.3).unwrap();
        let cert = membership_test(&k, &DictionaryConfig::default(), 1e-12).unwrap();
        assert_eq!(cert.verdict, Verdict::MemberWithinTol);
        assert!(cert.residual_rel < 1e-12);
        assert!(verify_certificate(&k, &cert).unwrap());
    }

    #[test]
    fn refuses_failed_certificate() {
        let k = StarBody::lq_ball(2, 3.0).unwrap();
        let mut cert = membership_test(&k, &DictionaryConfig { directions: Some(4), ..Default::default() }, 0.0).unwrap();
        cert.verdict = Verdict::Inconclusive;
        assert!(matches!(CertifiedMember::new(k, cert), Err(Error::NotCertified { .. })));
    }

    #[test]
    fn certificate_json_shape() {
        let k = StarBody::ball(2, 1.0).unwrap();
        let cert = membership_test(&k, &DictionaryConfig::default(), 1e-6).unwrap();
        let v: serde_json::Value = serde_json::to_value(&cert).unwrap();
        assert_eq!(v["verdict"], "member_within_tol");
        for key in ["a", "b", "xi", "w"] {
            assert!(v["atoms"][0].get(key).is_some());
        }
        assert!(v["dict"]["a_grid"].is_array());
    }

    #[test]
    fn ball_budget_one_is_exact() {
        let k = StarBody::ball(3, 0.8).unwrap();
        let ap = goodey_weil_approximate(&k, 1, &DictionaryConfig::default()).unwrap();
        assert_eq!(ap.atoms.len(), 1);
        assert!(ap.radial_error < 1e-12);
    }
}
