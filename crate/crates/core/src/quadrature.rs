//! Quadrature on spheres, on complex hyperplane sections, and along rays.
//!
//! Sphere rules are products in complex polar coordinates
//! `z_k = r_k e^{iφ_k}`: Gauss-Legendre in the angles parametrizing the
//! moduli `(r_1, ..., r_m) ∈ S^{m-1}_+`, equispaced relative phases, and an
//! equispaced overall phase. The overall phase is the circle action, so
//! every node's orbit under `R_θ` is sampled at `2·level` angles and the rule
//! is stored as orbit representatives plus that orbit size.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::body::StarBody;
use crate::constants::sphere_area;
use crate::error::{Error, Result};
use crate::geometry::{apply_columns, random_unitary, HyperplaneFrame};
use crate::measure::Measure;
use crate::parallel::{par_sum, par_try_sum};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; order];
    let mut w = vec![0.0; order];
    for i in 0..order.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=order {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = order as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[order - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[order - 1 - i] = wi;
    }
    (x, w)
}

/// Nodes and weights of a quadrature rule on a sphere.
#[derive(Clone, Debug)]
pub struct SphereRule {
    dim: usize,
    sphere_dim: usize,
    level: usize,
    seed: u64,
    orbit: usize,
    reps: Vec<f64>,
    rep_weights: Vec<f64>,
    angles: Vec<(f64, f64)>,
}

impl SphereRule {
    /// Real dimension of the space the nodes live in.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The rule integrates over `S^{sphere_dim - 1}`.
    pub fn sphere_dim(&self) -> usize {
        self.sphere_dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of nodes on each circle orbit.
    pub fn orbit_size(&self) -> usize {
        self.orbit
    }

    pub fn rep_count(&self) -> usize {
        self.rep_weights.len()
    }

    pub fn len(&self) -> usize {
        self.rep_count() * self.orbit
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rep(&self, i: usize) -> &[f64] {
        &self.reps[i * self.dim..(i + 1) * self.dim]
    }

    /// Total weight of the orbit of representative `i`.
    pub fn rep_weight(&self, i: usize) -> f64 {
        self.rep_weights[i]
    }

    pub fn reps(&self) -> Vec<Vec<f64>> {
        (0..self.rep_count()).map(|i| self.rep(i).to_vec()).collect()
    }

    pub fn rep_weights(&self) -> &[f64] {
        &self.rep_weights
    }

    pub fn node(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.node_into(i, &mut out);
        out
    }

    fn node_into(&self, i: usize, out: &mut [f64]) {
        let (c, s) = self.angles[i % self.orbit];
        let rep = self.rep(i / self.orbit);
        for (o, p) in out.chunks_exact_mut(2).zip(rep.chunks_exact(2)) {
            o[0] = c * p[0] - s * p[1];
            o[1] = s * p[0] + c * p[1];
        }
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.rep_weights[i / self.orbit] / self.orbit as f64
    }

    pub fn nodes(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }

    pub fn total_weight(&self) -> f64 {
        crate::parallel::pairwise_sum(&self.rep_weights)
    }

    /// `Σ w_i f(x_i)` over all nodes.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        par_sum(self.len(), |i| {
            let mut x = vec![0.0; self.dim];
            self.node_into(i, &mut x);
            self.weight(i) * f(&x)
        })
    }

    pub fn try_integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        par_try_sum(self.len(), |i| {
            let mut x = vec![0.0; self.dim];
            self.node_into(i, &mut x);
            Ok(self.weight(i) * f(&x)?)
        })
    }

    /// Integral of a circle-invariant function: one evaluation per orbit.
    pub fn integrate_invariant<F>(&self, f: F) -> f64
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        par_sum(self.rep_count(), |i| self.rep_weights[i] * f(self.rep(i)))
    }

    pub fn try_integrate_invariant<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        par_try_sum(self.rep_count(), |i| Ok(self.rep_weights[i] * f(self.rep(i))?))
    }
}

/// Gauss-Legendre resolution and relative-phase count used at `level` for
/// the sphere of C^m.
fn resolution(m: usize, level: usize) -> (usize, usize) {
    let k = (2 * level).div_ceil(m).max(2);
    let p = if m == 2 { 2 * k } else { k };
    (k, p)
}

/// Builds the rule on `S^{d-1}`, `d ∈ {2, 4, 6, 8}`.
///
/// A nonzero `seed` applies a seeded random unitary map to all nodes; the
/// rule is exactly as accurate for every seed.
pub fn sphere_rule(d: usize, level: usize, seed: u64) -> Result<SphereRule> {
    if !matches!(d, 2 | 4 | 6 | 8) {
        return Err(Error::UnsupportedDimension(d));
    }
    if level == 0 {
        return Err(Error::InvalidParameter("level must be at least 1".into()));
    }
    let m = d / 2;
    let orbit = 2 * level;
    let angles = (0..orbit)
        .map(|j| {
            let (s, c) = (2.0 * PI * j as f64 / orbit as f64).sin_cos();
            (c, s)
        })
        .collect();

    let (mut reps, mut rep_weights) = if m == 1 {
        (vec![1.0, 0.0], vec![2.0 * PI])
    } else {
        product_reps(m, level)
    };

    if seed != 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(&mut rng, m);
        for rep in reps.chunks_exact_mut(d) {
            let y = apply_columns(&u, rep);
            rep.copy_from_slice(&y);
        }
    }
    rep_weights.shrink_to_fit();
    Ok(SphereRule { dim: d, sphere_dim: d, level, seed, orbit, reps, rep_weights, angles })
}

fn product_reps(m: usize, level: usize) -> (Vec<f64>, Vec<f64>) {
    let (k, p) = resolution(m, level);
    let (gx, gw) = gauss_legendre(k);
    // 1-D rules in t_i ∈ [0, π/2] with weight cos t · sin^{2(m-i)-1} t,
    // rescaled so that constants integrate exactly.
    let t_rules: Vec<(Vec<f64>, Vec<f64>)> = (1..m)
        .map(|i| {
            let e = 2 * (m - i) - 1;
            let ts: Vec<f64> = gx.iter().map(|x| PI / 4.0 * (x + 1.0)).collect();
            let mut ws: Vec<f64> = ts
                .iter()
                .zip(&gw)
                .map(|(t, w)| PI / 4.0 * w * t.cos() * t.sin().powi(e as i32))
                .collect();
            let exact = 1.0 / (2.0 * (m - i) as f64);
            let total: f64 = ws.iter().sum();
            ws.iter_mut().for_each(|w| *w *= exact / total);
            (ts, ws)
        })
        .collect();

    let phase_w = 2.0 * PI / p as f64;
    let base_w = 2.0 * PI * phase_w.powi((m - 1) as i32);
    let n_t = k.pow((m - 1) as u32);
    let n_p = p.pow((m - 1) as u32);
    let mut reps = Vec::with_capacity(n_t * n_p * 2 * m);
    let mut weights = Vec::with_capacity(n_t * n_p);
    let mut r = vec![0.0; m];
    for ti in 0..n_t {
        let mut idx = ti;
        let mut w_t = 1.0;
        let mut sin_prod = 1.0;
        for (i, (ts, ws)) in t_rules.iter().enumerate() {
            let j = idx % k;
            idx /= k;
            let (s, c) = ts[j].sin_cos();
            r[i] = sin_prod * c;
            sin_prod *= s;
            w_t *= ws[j];
        }
        r[m - 1] = sin_prod;
        for pi in 0..n_p {
            let mut idx = pi;
            reps.push(r[0]);
            reps.push(0.0);
            for rk in r.iter().skip(1) {
                let j = idx % p;
                idx /= p;
                let (s, c) = (2.0 * PI * j as f64 / p as f64).sin_cos();
                reps.push(rk * c);
                reps.push(rk * s);
            }
            weights.push(base_w * w_t);
        }
    }
    (reps, weights)
}

/// Maps a rule on `S^{2n-3}` into `S^{2n-1} ∩ H_ξ` through the frame basis.
pub fn subsphere_rule(frame: &HyperplaneFrame, base: &SphereRule) -> Result<SphereRule> {
    let d = frame.xi.len();
    if base.dim != d - 2 || base.sphere_dim != base.dim {
        return Err(Error::DimensionMismatch { expected: d - 2, got: base.dim });
    }
    let mut reps = Vec::with_capacity(base.rep_count() * d);
    let mut buf = vec![0.0; d];
    for i in 0..base.rep_count() {
        frame.embed_into(base.rep(i), &mut buf);
        reps.extend_from_slice(&buf);
    }
    Ok(SphereRule {
        dim: d,
        sphere_dim: base.sphere_dim,
        level: base.level,
        seed: base.seed,
        orbit: base.orbit,
        reps,
        rep_weights: base.rep_weights.clone(),
        angles: base.angles.clone(),
    })
}

/// `Σ w_i f(x_i)`.
pub fn integrate_sphere<F>(f: F, rule: &SphereRule) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    rule.integrate(f)
}

/// Composite Gauss-Legendre rule for one-dimensional integrals.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialRule {
    panels: usize,
    order: usize,
    x: Vec<f64>,
    w: Vec<f64>,
}

impl Default for RadialRule {
    fn default() -> Self {
        RadialRule::new(32, 8).expect("valid default")
    }
}

impl RadialRule {
    pub fn new(panels: usize, order: usize) -> Result<Self> {
        if panels == 0 || order == 0 {
            return Err(Error::InvalidParameter("radial rule needs panels, order >= 1".into()));
        }
        let (x, w) = gauss_legendre(order);
        Ok(RadialRule { panels, order, x, w })
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `∫_lo^hi g(r) dr`; zero when `hi <= lo`.
    pub fn integrate<G: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut g: G) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let h = (hi - lo) / self.panels as f64;
        let mut total = 0.0;
        for p in 0..self.panels {
            let a = lo + p as f64 * h;
            let mut s = 0.0;
            for (x, w) in self.x.iter().zip(&self.w) {
                s += w * g(a + 0.5 * h * (x + 1.0));
            }
            total += 0.5 * h * s;
        }
        total
    }

    /// Evaluation points and weights of the rule on `[lo, hi]`.
    pub fn points(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let h = (hi - lo) / self.panels as f64;
        let mut out = Vec::with_capacity(self.panels * self.order);
        for p in 0..self.panels {
            let a = lo + p as f64 * h;
            for (x, w) in self.x.iter().zip(&self.w) {
                out.push((a + 0.5 * h * (x + 1.0), 0.5 * h * w));
            }
        }
        out
    }
}

/// `γ(K) = Σ_θ w_θ ∫_0^{ρ_K(θ)} r^{2n-1} f(rθ) dr`.
pub fn polar_integrate(gamma: &Measure, body: &StarBody, rule: &SphereRule, radial: &RadialRule) -> Result<f64> {
    let d = body.ambient().dim();
    if rule.dim() != d || rule.sphere_dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: rule.dim() });
    }
    rule.try_integrate_invariant(|theta| {
        let rho = body.radial(theta)?;
        Ok(gamma.radial_integral(theta, rho, d - 1, radial))
    })
}

/// `|S^{d-1}|` of the sphere a rule integrates over.
pub fn expected_total(rule: &SphereRule) -> f64 {
    sphere_area(rule.sphere_dim())
}
