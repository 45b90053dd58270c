//! Complex hyperplane sections and the complex spherical Radon transform
//! `R_c f(ξ) = ∫_{S^{2n-1} ∩ H_ξ} f`.

use std::io::Write;
use std::sync::Arc;

use crate::body::StarBody;
use crate::error::{Error, Result};
use crate::geometry::{check_len, hyperplane_frame, HyperplaneFrame};
use crate::measure::Measure;
use crate::parallel::{pairwise_sum, par_map};
use crate::quadrature::{sphere_rule, RadialRule, SphereRule};

/// Frozen quadrature used for every section integral in C^n.
#[derive(Clone, Debug)]
pub struct RadonConfig {
    n: usize,
    base: Arc<SphereRule>,
    radial: RadialRule,
}

/// Default level of the section rule on `S^{2n-3}`.
pub fn default_section_level(n: usize) -> usize {
    match n {
        2 => 8,
        3 => 24,
        _ => 12,
    }
}

impl RadonConfig {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_level(n, default_section_level(n))
    }

    pub fn with_level(n: usize, level: usize) -> Result<Self> {
        Self::with_rules(n, level, 0, RadialRule::default())
    }

    pub fn with_rules(n: usize, level: usize, seed: u64, radial: RadialRule) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidAmbient(n));
        }
        let base = sphere_rule(2 * n - 2, level, seed)?;
        Ok(RadonConfig { n, base: Arc::new(base), radial })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn section_level(&self) -> usize {
        self.base.level()
    }

    pub fn section_seed(&self) -> u64 {
        self.base.seed()
    }

    /// Rule on `S^{2n-3}` mapped into every `H_ξ`.
    pub fn base(&self) -> &SphereRule {
        &self.base
    }

    pub fn radial(&self) -> &RadialRule {
        &self.radial
    }

    fn check(&self, xi: &[f64]) -> Result<HyperplaneFrame> {
        check_len(xi, 2 * self.n)?;
        hyperplane_frame(xi)
    }
}

/// `Σ_reps w f(x)` over the section rule of `H_ξ`, for circle-invariant `f`.
fn section_sum<F>(frame: &HyperplaneFrame, base: &SphereRule, mut f: F) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut x = vec![0.0; frame.xi.len()];
    let mut terms = Vec::with_capacity(base.rep_count());
    for i in 0..base.rep_count() {
        frame.embed_into(base.rep(i), &mut x);
        terms.push(base.rep_weight(i) * f(&x)?);
    }
    Ok(pairwise_sum(&terms))
}

/// `|L ∩ H_ξ| = (1/(2n-2)) ∫_{S^{2n-1} ∩ H_ξ} ρ_L^{2n-2}`.
pub fn section_volume(body: &StarBody, xi: &[f64], cfg: &RadonConfig) -> Result<f64> {
    if body.n() != cfg.n {
        return Err(Error::AmbientMismatch { left: body.n(), right: cfg.n });
    }
    let frame = cfg.check(xi)?;
    let p = 2 * cfg.n as i32 - 2;
    let s = section_sum(&frame, &cfg.base, |x| Ok(body.radial(x)?.powi(p)))?;
    Ok(s / p as f64)
}

/// `R_c f(ξ)` for an even, circle-invariant `f`.
pub fn radon_transform<F>(f: F, xi: &[f64], cfg: &RadonConfig) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    try_radon_transform(|x| Ok(f(x)), xi, cfg)
}

pub fn try_radon_transform<F>(f: F, xi: &[f64], cfg: &RadonConfig) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let frame = cfg.check(xi)?;
    section_sum(&frame, &cfg.base, f)
}

/// `γ(K ∩ H_ξ) = ∫_{S^{2n-1} ∩ H_ξ} ∫_0^{ρ_K(θ)} r^{2n-3} f(rθ) dr dθ`.
pub fn measure_of_section(gamma: &Measure, body: &StarBody, xi: &[f64], cfg: &RadonConfig) -> Result<f64> {
    if body.n() != cfg.n {
        return Err(Error::AmbientMismatch { left: body.n(), right: cfg.n });
    }
    if gamma.is_lebesgue() {
        return section_volume(body, xi, cfg);
    }
    let frame = cfg.check(xi)?;
    let p = 2 * cfg.n - 3;
    section_sum(&frame, &cfg.base, |theta| {
        let rho = body.radial(theta)?;
        Ok(gamma.radial_integral(theta, rho, p, &cfg.radial))
    })
}

/// Default cap on the number of stored operator entries.
pub const DEFAULT_ENTRY_CAP: usize = 50_000_000;

/// The discretized Radon operator: row `i` integrates over the section rule
/// of the `i`-th output node.
///
/// Output nodes are the orbit representatives of an outer rule on
/// `S^{2n-1}`; for circle-invariant functions these carry all information.
#[derive(Clone, Debug)]
pub struct RadonMatrix {
    dim: usize,
    out_nodes: Vec<Vec<f64>>,
    out_weights: Vec<f64>,
    row_len: usize,
    eval_points: Vec<f64>,
    entries: Vec<f64>,
}

impl RadonMatrix {
    pub fn build(cfg: &RadonConfig, outer: &SphereRule, cap: usize) -> Result<Self> {
        let dim = 2 * cfg.n;
        if outer.dim() != dim || outer.sphere_dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: outer.dim() });
        }
        let row_len = cfg.base.rep_count();
        let count = outer.rep_count().saturating_mul(row_len);
        if count > cap {
            return Err(Error::MemoryCap { entries: count, cap });
        }
        let rows: Vec<Result<Vec<f64>>> = par_map(outer.rep_count(), |i| {
            let frame = hyperplane_frame(outer.rep(i))?;
            let mut pts = vec![0.0; row_len * dim];
            for (j, chunk) in pts.chunks_exact_mut(dim).enumerate() {
                frame.embed_into(cfg.base.rep(j), chunk);
            }
            Ok(pts)
        });
        let mut eval_points = Vec::with_capacity(count * dim);
        for r in rows {
            eval_points.extend(r?);
        }
        let mut entries = Vec::with_capacity(count);
        for _ in 0..outer.rep_count() {
            entries.extend_from_slice(cfg.base.rep_weights());
        }
        Ok(RadonMatrix {
            dim,
            out_nodes: outer.reps(),
            out_weights: outer.rep_weights().to_vec(),
            row_len,
            eval_points,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.out_nodes.len()
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn out_nodes(&self) -> &[Vec<f64>] {
        &self.out_nodes
    }

    /// Outer-rule weight of every output node (its whole orbit).
    pub fn out_weights(&self) -> &[f64] {
        &self.out_weights
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn eval_point(&self, k: usize) -> &[f64] {
        &self.eval_points[k * self.dim..(k + 1) * self.dim]
    }

    /// Applies the operator to values tabulated at the evaluation points.
    pub fn apply_values(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.entries.len() {
            return Err(Error::DimensionMismatch { expected: self.entries.len(), got: values.len() });
        }
        Ok(par_map(self.rows(), |i| {
            let lo = i * self.row_len;
            let terms: Vec<f64> = (lo..lo + self.row_len).map(|k| self.entries[k] * values[k]).collect();
            pairwise_sum(&terms)
        }))
    }

    pub fn apply<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let values = par_map(self.entries.len(), |k| f(self.eval_point(k)));
        self.apply_values(&values).expect("sizes match by construction")
    }
}

/// Writes `(ξ, value)` rows with header `xi_1, ..., xi_d, value`.
pub fn write_section_table<W: Write>(out: W, xis: &[Vec<f64>], values: &[f64]) -> Result<()> {
    if xis.len() != values.len() {
        return Err(Error::DimensionMismatch { expected: xis.len(), got: values.len() });
    }
    let d = xis.first().map(|x| x.len()).unwrap_or(0);
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=d).map(|i| format!("xi_{i}")).collect();
    header.push("value".into());
    w.write_record(&header)?;
    for (x, v) in xis.iter().zip(values) {
        let mut rec: Vec<String> = x.iter().map(|c| format!("{c:e}")).collect();
        rec.push(format!("{v:e}"));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{ball_volume, sphere_area};
    use crate::geometry::{random_unit, rtheta_apply};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn radon_of_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..=4 {
            let cfg = RadonConfig::new(n).unwrap();
            let xi = random_unit(&mut rng, 2 * n);
            let v = radon_transform(|_| 1.0, &xi, &cfg).unwrap();
            assert_relative_eq!(v, sphere_area(2 * n - 2), max_relative = 1e-12);
        }
    }

    #[test]
    fn ball_sections() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 2..=3 {
            let cfg = RadonConfig::new(n).unwrap();
            let b = StarBody::ball(n, 1.0).unwrap();
            let xi = random_unit(&mut rng, 2 * n);
            assert_relative_eq!(section_volume(&b, &xi, &cfg).unwrap(), ball_volume(2 * n - 2), max_relative = 1e-12);
        }
    }

    #[test]
    fn linearity_and_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = RadonConfig::with_level(3, 8).unwrap();
        let f = |x: &[f64]| 1.0 + x[0] * x[0] + x[1] * x[1];
        let g = |x: &[f64]| (x[2] * x[2] + x[3] * x[3]).powi(2);
        let xi = random_unit(&mut rng, 6);
        let (a, b) = (0.7, -2.3);
        let lhs = radon_transform(|x| a * f(x) + b * g(x), &xi, &cfg).unwrap();
        let rhs = a * radon_transform(f, &xi, &cfg).unwrap() + b * radon_transform(g, &xi, &cfg).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
        let th: f64 = rng.random_range(0.0..6.0);
        let rot = radon_transform(f, &rtheta_apply(&xi, th).unwrap(), &cfg).unwrap();
        assert!((rot - radon_transform(f, &xi, &cfg).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn gaussian_section_mass() {
        let cfg = RadonConfig::new(2).unwrap();
        let b = StarBody::ball(2, 8.0).unwrap();
        let g = Measure::Gaussian { sigma: 1.0 };
        let v = measure_of_section(&g, &b, &[1.0, 0.0, 0.0, 0.0], &cfg).unwrap();
        assert_relative_eq!(v, (1.0 - (-32.0f64).exp()) / (2.0 * PI), max_relative = 1e-12);
    }

    #[test]
    fn matrix_row_sums_and_cap() {
        let cfg = RadonConfig::with_level(3, 4).unwrap();
        let outer = sphere_rule(6, 3, 0).unwrap();
        let a = RadonMatrix::build(&cfg, &outer, DEFAULT_ENTRY_CAP).unwrap();
        for v in a.apply(|_| 1.0) {
            assert_relative_eq!(v, 2.0 * PI * PI, max_relative = 1e-12);
        }
        assert!(a.entries().iter().all(|e| *e >= 0.0));
        assert!(matches!(RadonMatrix::build(&cfg, &outer, 10), Err(Error::MemoryCap { .. })));
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        write_section_table(&mut buf, &[vec![1.0, 0.0, 0.0, 0.0]], &[3.0]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("xi_1,xi_2,xi_3,xi_4,value\n"));
    }
}
