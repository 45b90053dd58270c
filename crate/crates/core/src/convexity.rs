//! Convexity of complex intersection bodies: sampled triangle inequalities,
//! the section-root inequality along a complex 2-plane, the one-dimensional
//! profile inequalities behind it, and a roundness estimate.

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::body::StarBody;
use crate::error::{Error, Result};
use crate::geometry::{complex_orthonormal_pairs, j_map, norm, random_unit};
use crate::inequalities::trial_rng;
use crate::parallel::par_try_map;
use crate::quadrature::{gauss_legendre, sphere_rule, RadialRule, SphereRule};
use crate::radon::{section_volume, RadonConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub trials: usize,
    pub violations: usize,
    /// Smallest `rhs - lhs` seen.
    pub worst_slack: f64,
}

impl ViolationReport {
    fn from_slacks(slacks: &[f64], tol: f64) -> Self {
        ViolationReport {
            trials: slacks.len(),
            violations: slacks.iter().filter(|s| **s < -tol).count(),
            worst_slack: slacks.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

/// Samples Gaussian pairs `(x, y)` and checks
/// `‖x + y‖_K ≤ ‖x‖_K + ‖y‖_K + tol`.
pub fn convexity_check(body: &StarBody, samples: usize, tol: f64, seed: u64) -> Result<ViolationReport> {
    let d = body.ambient().dim();
    let slacks = par_try_map(samples, |i| {
        let mut rng = trial_rng(seed, i as u64);
        let x = gaussian(&mut rng, d);
        let y = gaussian(&mut rng, d);
        let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        Ok(body.minkowski(&x)? + body.minkowski(&y)? - body.minkowski(&s)?)
    })?;
    Ok(ViolationReport::from_slacks(&slacks, tol))
}

/// A random complex subspace of complex dimension `k`, as a real orthonormal
/// basis of `k` pairs `(v, Jv)`, orthogonal to the `J`-closed family
/// `against`.
pub fn random_complex_subspace<R: Rng + ?Sized>(rng: &mut R, d: usize, k: usize, against: &[Vec<f64>]) -> Vec<Vec<f64>> {
    loop {
        let cands: Vec<Vec<f64>> = (0..k + 2).map(|_| gaussian(rng, d)).collect();
        let basis = complex_orthonormal_pairs(cands, against, k);
        if basis.len() == 2 * k {
            return basis;
        }
    }
}

/// `c₁p + c₂q` for complex coefficients `c = (Re c₁, Im c₁, Re c₂, Im c₂)`
/// and a basis `[p, Jp, q, Jq]`.
fn combine(c: &[f64], plane: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; plane[0].len()];
    for (k, v) in c.iter().zip(plane) {
        out.iter_mut().zip(v).for_each(|(o, x)| *o += k * x);
    }
    out
}

/// Complex unit normal, inside the plane, to `c₁p + c₂q`: `-c̄₂p + c̄₁q`.
fn plane_normal(c: &[f64]) -> [f64; 4] {
    [-c[2], c[3], c[0], -c[1]]
}

/// One configuration of the section-root inequality.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveTrial {
    /// Basis of the random complex `(n-2)`-subspace `S`.
    pub subspace: Vec<Vec<f64>>,
    /// `[p, Jp, q, Jq]` spanning `S^⊥`.
    pub plane: Vec<Vec<f64>>,
    pub u: [Vec<f64>; 3],
    /// Complex normals of `E_i = S ⊕ C u_i`.
    pub normals: [Vec<f64>; 3],
    /// `|u₁ + u₂|`.
    pub alpha: f64,
}

/// Draws `S`, two unit directions `u₁, u₂ ∈ S^⊥` and `u₃ = (u₁+u₂)/α`,
/// resampling while `|u₁ + u₂| < 1e-6`.
pub fn draw_curve_trial<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<CurveTrial> {
    if n < 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    let d = 2 * n;
    let subspace = random_complex_subspace(rng, d, n - 2, &[]);
    let plane = random_complex_subspace(rng, d, 2, &subspace);
    loop {
        let c1 = random_unit(rng, 4);
        let c2 = random_unit(rng, 4);
        let c3: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| a + b).collect();
        let alpha = norm(&c3);
        if alpha < 1e-6 {
            continue;
        }
        let c3: Vec<f64> = c3.iter().map(|v| v / alpha).collect();
        let u = [combine(&c1, &plane), combine(&c2, &plane), combine(&c3, &plane)];
        let normals = [
            combine(&plane_normal(&c1), &plane),
            combine(&plane_normal(&c2), &plane),
            combine(&plane_normal(&c3), &plane),
        ];
        return Ok(CurveTrial { subspace, plane, u, normals, alpha });
    }
}

/// Checks `α / r(u₃) ≤ 1/r(u₁) + 1/r(u₂) + tol` with
/// `r(u) = |K ∩ (S ⊕ Cu)|^{1/2}` over random trials.
pub fn busemann_curve_check(body: &StarBody, trials: usize, tol: f64, seed: u64, cfg: &RadonConfig) -> Result<ViolationReport> {
    let n = body.n();
    if n < 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    let slacks = par_try_map(trials, |i| {
        let mut rng = trial_rng(seed, i as u64);
        let t = draw_curve_trial(&mut rng, n)?;
        let mut r = [0.0; 3];
        for (ri, nu) in r.iter_mut().zip(&t.normals) {
            *ri = section_volume(body, nu, cfg)?.sqrt();
        }
        Ok(1.0 / r[0] + 1.0 / r[1] - t.alpha / r[2])
    })?;
    Ok(ViolationReport::from_slacks(&slacks, tol))
}

struct SliceNorm<'a> {
    body: &'a StarBody,
    basis: &'a [Vec<f64>],
    point: &'a [f64],
}

impl SliceNorm<'_> {
    fn at(&self, s: &[f64]) -> Vec<f64> {
        let mut x = self.point.to_vec();
        for (c, b) in s.iter().zip(self.basis) {
            x.iter_mut().zip(b).for_each(|(o, v)| *o += c * v);
        }
        x
    }
}

impl CostFunction for SliceNorm<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, s: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.body.minkowski(&self.at(s))?)
    }
}

/// `min_{s ∈ S} ‖p + s‖_K` and its minimizer (as a point of `p + S`).
fn slice_minimum(body: &StarBody, basis: &[Vec<f64>], point: &[f64]) -> Result<(f64, Vec<f64>)> {
    let k = basis.len();
    let f = SliceNorm { body, basis, point };
    let step = 0.25 * norm(point).max(0.1);
    let mut simplex = vec![vec![0.0; k]];
    for i in 0..k {
        let mut v = vec![0.0; k];
        v[i] = step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-15)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let res = Executor::new(f, solver)
        .configure(|state| state.max_iters(2000))
        .run()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let best = res.state.best_param.clone().unwrap_or_else(|| vec![0.0; k]);
    let f = SliceNorm { body, basis, point };
    let x = f.at(&best);
    Ok((body.minkowski(&x)?, x))
}

/// `sup {t ≥ 0 : ‖c + t w‖_K ≤ 1}` for `‖c‖_K < 1`, by bisection.
fn ray_exit(body: &StarBody, c: &[f64], w: &[f64]) -> Result<f64> {
    let at = |t: f64| -> Result<f64> {
        let x: Vec<f64> = c.iter().zip(w).map(|(a, b)| a + t * b).collect();
        body.minkowski(&x)
    };
    let mut hi = 1.0;
    while at(hi)? <= 1.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Degenerate { value: hi });
        }
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if at(mid)? <= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Parallel slices `K ∩ (p + S)` of a convex body and their
/// `(2n-4)`-dimensional volumes.
#[derive(Clone, Debug)]
pub struct SliceGeometry {
    basis: Vec<Vec<f64>>,
    rule: SphereRule,
}

impl SliceGeometry {
    /// `basis` spans `S`; slices are integrated in polar coordinates around
    /// an interior point with a rule of the given level on the unit sphere
    /// of `S`.
    pub fn new(basis: Vec<Vec<f64>>, level: usize) -> Result<Self> {
        let rule = sphere_rule(basis.len(), level, 0)?;
        Ok(SliceGeometry { basis, rule })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `|K ∩ (p + S)|`.
    pub fn area(&self, body: &StarBody, p: &[f64]) -> Result<f64> {
        let (m, c) = slice_minimum(body, &self.basis, p)?;
        if m >= 1.0 {
            return Ok(0.0);
        }
        let k = self.dim();
        let mut total = 0.0;
        for i in 0..self.rule.len() {
            let y = self.rule.node(i);
            let mut w = vec![0.0; p.len()];
            for (c, b) in y.iter().zip(&self.basis) {
                w.iter_mut().zip(b).for_each(|(o, v)| *o += c * v);
            }
            total += self.rule.weight(i) * ray_exit(body, &c, &w)?.powi(k as i32);
        }
        Ok(total / k as f64)
    }

    /// `sup {r : K ∩ (rθ + S) ≠ ∅} = 1 / min_{s ∈ S} ‖θ + s‖_K`.
    pub fn reach(&self, body: &StarBody, theta: &[f64]) -> Result<f64> {
        Ok(1.0 / slice_minimum(body, &self.basis, theta)?.0)
    }
}

/// `h(r) = |K ∩ (S + rθ)|` tabulated on quadrature points of `[0, R]`,
/// `R` the largest `r` with a nonempty slice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionProfile {
    pub theta: Vec<f64>,
    pub reach: f64,
    pub r: Vec<f64>,
    pub dr: Vec<f64>,
    pub h: Vec<f64>,
}

impl SectionProfile {
    pub fn compute(body: &StarBody, slices: &SliceGeometry, theta: &[f64], radial: &RadialRule) -> Result<Self> {
        let reach = slices.reach(body, theta)?;
        let pts = radial.points(0.0, reach);
        let h = par_try_map(pts.len(), |i| {
            let p: Vec<f64> = theta.iter().map(|t| pts[i].0 * t).collect();
            slices.area(body, &p)
        })?;
        Ok(SectionProfile { theta: theta.to_vec(), reach, r: pts.iter().map(|x| x.0).collect(), dr: pts.iter().map(|x| x.1).collect(), h })
    }

    /// `2π ∫_0^R r h(r) dr`, the volume of `K ∩ (S ⊕ Cθ)`.
    pub fn complex_section_volume(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.r.iter().zip(&self.dr).zip(&self.h).map(|((r, w), h)| r * w * h).sum::<f64>()
    }
}

/// Complex unit normal of `S ⊕ Cθ` in `C^n` when `S` has complex dimension
/// `n - 2`.
pub fn complement_normal(subspace: &[Vec<f64>], theta: &[f64]) -> Result<Vec<f64>> {
    let d = theta.len();
    let mut against = subspace.to_vec();
    let t = crate::geometry::normalized(theta).ok_or(Error::Degenerate { value: 0.0 })?;
    against.push(t.clone());
    against.push(j_map(&t));
    let cands = (0..d).map(|k| {
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        v
    });
    let out = complex_orthonormal_pairs(cands, &against, 1);
    out.into_iter().next().ok_or(Error::Degenerate { value: 0.0 })
}

/// Checks `h₃(r₃) ≥ h₁(r₁)^{1-t} h₂(r₂)^t - tol` for `t = r₁/(r₁+r₂)`,
/// `r₃ = α r₁r₂/(r₁+r₂)` at the given `(r₁, r₂)` pairs.
pub fn profile_mixing_check(
    body: &StarBody,
    slices: &SliceGeometry,
    trial: &CurveTrial,
    pairs: &[(f64, f64)],
    tol: f64,
) -> Result<ViolationReport> {
    let slacks = par_try_map(pairs.len(), |i| {
        let (r1, r2) = pairs[i];
        let t = r1 / (r1 + r2);
        let r3 = trial.alpha * r1 * r2 / (r1 + r2);
        let at = |r: f64, u: &[f64]| -> Result<f64> {
            let p: Vec<f64> = u.iter().map(|v| r * v).collect();
            slices.area(body, &p)
        };
        let h1 = at(r1, &trial.u[0])?;
        let h2 = at(r2, &trial.u[1])?;
        let h3 = at(r3, &trial.u[2])?;
        Ok(h3 - h1.powf(1.0 - t) * h2.powf(t))
    })?;
    Ok(ViolationReport::from_slacks(&slacks, tol))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallInequality {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `α / (1/A + 1/B)`.
    pub bound: f64,
    pub holds: bool,
}

/// Panelled Gauss-Legendre points on `[0, hi]`.
fn radial_points(hi: f64) -> Vec<(f64, f64)> {
    let (gx, gw) = gauss_legendre(16);
    let panels = 64;
    let h = hi / panels as f64;
    let mut out = Vec::with_capacity(panels * gx.len());
    for k in 0..panels {
        let lo = k as f64 * h;
        for (x, w) in gx.iter().zip(&gw) {
            out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}

fn pth_moment<F: Fn(f64) -> f64>(h: F, hi: f64, p: f64) -> f64 {
    radial_points(hi).into_iter().map(|(r, w)| w * r.powf(p - 1.0) * h(r)).sum::<f64>().powf(1.0 / p)
}

/// `sup_t h₁(r/(α(1-t)))^{1-t} h₂(r/(αt))^t`: the smallest value at `r`
/// compatible with the mixing inequality. The supremum is located by a scan
/// over `t` followed by golden-section refinement.
pub fn mixed_profile<F1, F2>(h1: &F1, h2: &F2, alpha: f64, r: f64) -> f64
where
    F1: Fn(f64) -> f64,
    F2: Fn(f64) -> f64,
{
    mixed_profile_on(h1, h2, alpha, r, 0.0, 1.0)
}

/// [`mixed_profile`] with `t` restricted to `(t_lo, t_hi)`, e.g. the range
/// where both arguments stay inside known supports.
pub fn mixed_profile_on<F1, F2>(h1: &F1, h2: &F2, alpha: f64, r: f64, t_lo: f64, t_hi: f64) -> f64
where
    F1: Fn(f64) -> f64,
    F2: Fn(f64) -> f64,
{
    let (t_lo, t_hi) = (t_lo.max(0.0), t_hi.min(1.0));
    if !(t_lo < t_hi) {
        return 0.0;
    }
    let log_at = |t: f64| -> f64 {
        let a = h1(r / (alpha * (1.0 - t)));
        let b = h2(r / (alpha * t));
        if a <= 0.0 || b <= 0.0 {
            return f64::NEG_INFINITY;
        }
        (1.0 - t) * a.ln() + t * b.ln()
    };
    let m = 64;
    let span = t_hi - t_lo;
    let grid: Vec<f64> = (1..m).map(|i| t_lo + span * i as f64 / m as f64).collect();
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for (i, t) in grid.iter().enumerate() {
        let v = log_at(*t);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    if best == f64::NEG_INFINITY {
        return 0.0;
    }
    let (mut lo, mut hi) = (
        if best_i == 0 { t_lo + 1e-12 * span } else { grid[best_i - 1] },
        if best_i + 1 == grid.len() { t_hi - 1e-12 * span } else { grid[best_i + 1] },
    );
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (log_at(x1), log_at(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = log_at(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = log_at(x1);
        }
    }
    best.max(f1).max(f2).exp()
}

/// `A = (∫ r^{p-1} h₁)^{1/p}`, `B` likewise, and `C` for the smallest `h₃`
/// satisfying the mixing inequality; checks `C ≥ α/(1/A + 1/B) - tol`.
///
/// `h_i` vanish beyond `support_i`.
pub fn ball_inequality_check<F1, F2>(h1: F1, support1: f64, h2: F2, support2: f64, p: f64, alpha: f64, tol: f64) -> Result<BallInequality>
where
    F1: Fn(f64) -> f64 + Sync,
    F2: Fn(f64) -> f64 + Sync,
{
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("exponent must be at least 1, got {p}")));
    }
    if !(alpha > 0.0 && support1 > 0.0 && support2 > 0.0) {
        return Err(Error::InvalidParameter("alpha and supports must be positive".into()));
    }
    let cut1 = |r: f64| if r < support1 { h1(r) } else { 0.0 };
    let cut2 = |r: f64| if r < support2 { h2(r) } else { 0.0 };
    let a = pth_moment(cut1, support1, p);
    let b = pth_moment(cut2, support2, p);
    if !(a > 0.0 || b > 0.0) {
        return Err(Error::ZeroProfiles);
    }
    let support3 = alpha * support1 * support2 / (support1 + support2);
    // both arguments inside their supports: t ∈ (r/(α s₂), 1 - r/(α s₁))
    let c = pth_moment(
        |r| mixed_profile_on(&cut1, &cut2, alpha, r, r / (alpha * support2), 1.0 - r / (alpha * support1)),
        support3,
        p,
    );
    let bound = if a > 0.0 && b > 0.0 { alpha / (1.0 / a + 1.0 / b) } else { 0.0 };
    Ok(BallInequality { a, b, c, bound, holds: c >= bound - tol })
}

/// `max ρ / min ρ` of `K` after the linear normalization making its second
/// moment matrix `∫_K x xᵀ` a multiple of the identity.
///
/// An upper-bound surrogate for the distance to the Euclidean ball, not a
/// Banach-Mazur distance.
pub fn roundness_estimate(body: &StarBody, rule: &SphereRule) -> Result<f64> {
    let d = body.ambient().dim();
    if rule.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: rule.dim() });
    }
    let reps = rule.reps();
    let rho = par_try_map(reps.len(), |i| body.radial(&reps[i]))?;
    // orbit average of θθᵀ is (θθᵀ + JθJθᵀ)/2
    let mut m = DMatrix::<f64>::zeros(d, d);
    for (i, th) in reps.iter().enumerate() {
        let w = 0.5 * rule.rep_weight(i) * rho[i].powi(d as i32 + 2);
        let jt = j_map(th);
        for r in 0..d {
            for c in 0..d {
                m[(r, c)] += w * (th[r] * th[c] + jt[r] * jt[c]);
            }
        }
    }
    let eig = SymmetricEigen::new(m);
    if eig.eigenvalues.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Degenerate { value: eig.eigenvalues.min() });
    }
    let sqrt = &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * eig.eigenvectors.transpose();
    // ρ_{TK}(v) = 1/‖T⁻¹v‖_K with T = M^{-1/2}
    let vals = par_try_map(reps.len(), |i| {
        let v = nalgebra::DVector::from_column_slice(&reps[i]);
        let x = &sqrt * v;
        Ok(1.0 / body.minkowski(x.as_slice())?)
    })?;
    let max = vals.iter().copied().fold(0.0, f64::max);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max / min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::ComplexEllipsoidParams;
    use crate::geometry::{complex_inner_sq, dot};
    use approx::assert_relative_eq;

    #[test]
    fn ball_has_no_violations() {
        let k = StarBody::ball(2, 1.0).unwrap();
        let rep = convexity_check(&k, 2000, 0.0, 1).unwrap();
        assert_eq!(rep.violations, 0);
    }

    #[test]
    fn quasi_norm_violates() {
        let k = StarBody::lq_ball(2, 0.5).unwrap();
        let rep = convexity_check(&k, 2000, 0.0, 1).unwrap();
        assert!(rep.violations > 0);
    }

    #[test]
    fn curve_trial_geometry() {
        let mut rng = trial_rng(3, 0);
        let t = draw_curve_trial(&mut rng, 4).unwrap();
        for (u, nu) in t.u.iter().zip(&t.normals) {
            assert_relative_eq!(norm(u), 1.0, epsilon = 1e-12);
            assert_relative_eq!(norm(nu), 1.0, epsilon = 1e-12);
            assert!(complex_inner_sq(u, nu) < 1e-24);
            for s in &t.subspace {
                assert!(dot(s, nu).abs() < 1e-12 && dot(s, u).abs() < 1e-12);
            }
        }
        assert!(t.alpha > 0.0 && t.alpha <= 2.0 + 1e-12);
    }

    #[test]
    fn ball_curve_check() {
        let k = StarBody::ball(3, 1.0).unwrap();
        let rep = busemann_curve_check(&k, 20, 1e-9, 0, &RadonConfig::with_level(3, 4).unwrap()).unwrap();
        assert_eq!(rep.violations, 0);
    }

    #[test]
    fn slice_area_of_ball() {
        // slices of the unit ball of R⁶ by translates of a complex line are discs
        let k = StarBody::ball(3, 1.0).unwrap();
        let mut rng = trial_rng(5, 0);
        let t = draw_curve_trial(&mut rng, 3).unwrap();
        let g = SliceGeometry::new(t.subspace.clone(), 8).unwrap();
        let p: Vec<f64> = t.u[0].iter().map(|v| 0.6 * v).collect();
        assert_relative_eq!(g.area(&k, &p).unwrap(), std::f64::consts::PI * 0.64, max_relative = 1e-10);
        assert_relative_eq!(g.reach(&k, &t.u[0]).unwrap(), 1.0, max_relative = 1e-10);
    }

    #[test]
    fn exponential_profiles_are_equality_cases() {
        let rep = ball_inequality_check(|r| (-2.0 * r).exp(), 40.0, |r| (-0.7 * r).exp(), 80.0, 2.0, 1.5, 1e-8).unwrap();
        assert!(rep.holds);
        assert_relative_eq!(rep.c, rep.bound, max_relative = 1e-8);
    }

    #[test]
    fn zero_profiles_rejected() {
        assert_eq!(ball_inequality_check(|_| 0.0, 1.0, |_| 0.0, 1.0, 2.0, 1.0, 1e-8).unwrap_err(), Error::ZeroProfiles);
    }

    #[test]
    fn ellipsoid_normalizes_to_ball() {
        let e = StarBody::ellipsoid(ComplexEllipsoidParams::new(1.0, 3.0, vec![0.6, 0.0, 0.0, 0.8]).unwrap()).unwrap();
        let rule = sphere_rule(4, 24, 0).unwrap();
        let r = roundness_estimate(&e, &rule).unwrap();
        assert!((r - 1.0).abs() < 1e-6, "{r}");
        let b = StarBody::ball(2, 2.0).unwrap();
        assert!((roundness_estimate(&b, &rule).unwrap() - 1.0).abs() < 1e-8);
    }
}
