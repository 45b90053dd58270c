//! Complex star bodies represented by their radial functions.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_len, complex_inner_sq, dot, moduli_sq, norm, Ambient, UNIT_TOL};
use crate::radon::{section_volume, RadonConfig};

/// Smallest admissible radial value.
pub const RHO_FLOOR: f64 = 1e-8;

/// Default number of memoized directions of a lazily evaluated body.
pub const DEFAULT_MEMO_CAP: usize = 1 << 20;

/// Parameters of the complex ellipsoid `E_{a,b}(ξ)`:
/// `‖x‖² = |(x,ξ)_c|²/a² + (|x|² - |(x,ξ)_c|²)/b²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexEllipsoidParams {
    pub a: f64,
    pub b: f64,
    pub xi: Vec<f64>,
}

impl ComplexEllipsoidParams {
    pub fn new(a: f64, b: f64, xi: Vec<f64>) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("ellipsoid {name} must be positive, got {v}")));
            }
            if v < RHO_FLOOR {
                return Err(Error::Degenerate { value: v });
            }
        }
        if xi.len() < 4 || xi.len() % 2 != 0 {
            return Err(Error::DimensionMismatch { expected: 4, got: xi.len() });
        }
        let r = norm(&xi);
        if (r - 1.0).abs() >= UNIT_TOL {
            return Err(Error::NonUnit { norm: r });
        }
        Ok(ComplexEllipsoidParams { a, b, xi })
    }

    /// `‖x‖²` of the ellipsoid.
    pub fn norm_sq(&self, x: &[f64]) -> f64 {
        let s = complex_inner_sq(x, &self.xi);
        s / (self.a * self.a) + (dot(x, x) - s) / (self.b * self.b)
    }

    /// `‖x‖^{-2}`, the atom function used by membership certificates.
    pub fn atom(&self, x: &[f64]) -> f64 {
        1.0 / self.norm_sq(x)
    }

    /// The ellipsoid with the two radii exchanged.
    pub fn swapped(&self) -> Self {
        ComplexEllipsoidParams { a: self.b, b: self.a, xi: self.xi.clone() }
    }
}

/// Radial values stored at a fixed node set.
#[derive(Clone, Debug)]
pub struct Table {
    nodes: Vec<Vec<f64>>,
    values: HashMap<Vec<u64>, f64>,
}

fn direction_key(u: &[f64]) -> Vec<u64> {
    // +0.0 and -0.0 must share a key
    u.iter().map(|v| (v + 0.0).to_bits()).collect()
}

impl Table {
    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }
}

/// The complex intersection body of a source body, evaluated on demand.
pub struct LazyIntersection {
    source: StarBody,
    cfg: RadonConfig,
    memo: RwLock<HashMap<Vec<u64>, f64>>,
    cap: usize,
}

impl LazyIntersection {
    pub fn source(&self) -> &StarBody {
        &self.source
    }

    pub fn config(&self) -> &RadonConfig {
        &self.cfg
    }

    pub fn memo_len(&self) -> usize {
        self.memo.read().map(|m| m.len()).unwrap_or(0)
    }

    fn radial(&self, u: &[f64]) -> Result<f64> {
        let key = direction_key(u);
        if let Some(v) = self.memo.read().ok().and_then(|m| m.get(&key).copied()) {
            return Ok(v);
        }
        let vol = section_volume(&self.source, u, &self.cfg)?;
        assert!(vol > 0.0, "nonpositive section volume");
        let rho = (vol / std::f64::consts::PI).sqrt();
        if let Ok(mut m) = self.memo.write() {
            if m.len() < self.cap {
                m.insert(key, rho);
            }
        }
        Ok(rho)
    }
}

impl fmt::Debug for LazyIntersection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazyIntersection")
            .field("source", &self.source)
            .field("section_level", &self.cfg.section_level())
            .field("memo_len", &self.memo_len())
            .finish()
    }
}

#[derive(Clone, Debug)]
pub enum BodyKind {
    Ball { radius: f64 },
    /// `‖x‖ = (Σ_k |z_k|^q)^{1/q} / scale`.
    LqBall { q: f64, scale: f64 },
    Ellipsoid(ComplexEllipsoidParams),
    RadialSum(Vec<StarBody>),
    Tabulated(Arc<Table>),
    LazyIntersection(Arc<LazyIntersection>),
    Dilated { factor: f64, body: Box<StarBody> },
}

/// A complex star body in C^n = R^{2n}.
#[derive(Clone, Debug)]
pub struct StarBody {
    ambient: Ambient,
    kind: BodyKind,
}

impl StarBody {
    pub fn ball(n: usize, radius: f64) -> Result<Self> {
        let ambient = Ambient::new(n)?;
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius must be positive, got {radius}")));
        }
        if radius < RHO_FLOOR {
            return Err(Error::Degenerate { value: radius });
        }
        Ok(StarBody { ambient, kind: BodyKind::Ball { radius } })
    }

    pub fn lq_ball(n: usize, q: f64) -> Result<Self> {
        Self::lq_ball_scaled(n, q, 1.0)
    }

    pub fn lq_ball_scaled(n: usize, q: f64, scale: f64) -> Result<Self> {
        let ambient = Ambient::new(n)?;
        if !(q.is_finite() && q > 0.0) || !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!("lq ball needs q > 0 and scale > 0, got q={q}, scale={scale}")));
        }
        // max of Σ|z_k|^q over the unit sphere
        let peak = if q >= 2.0 { 1.0 } else { (n as f64).powf(1.0 - q / 2.0) };
        let min_rho = scale * peak.powf(-1.0 / q);
        if min_rho < RHO_FLOOR {
            return Err(Error::Degenerate { value: min_rho });
        }
        Ok(StarBody { ambient, kind: BodyKind::LqBall { q, scale } })
    }

    pub fn ellipsoid(params: ComplexEllipsoidParams) -> Result<Self> {
        let ambient = Ambient::new(params.xi.len() / 2)?;
        Ok(StarBody { ambient, kind: BodyKind::Ellipsoid(params) })
    }

    pub fn radial_sum_of(parts: Vec<StarBody>) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidParameter("radial sum of no bodies".into()))?;
        let ambient = first.ambient;
        for p in &parts {
            if p.ambient != ambient {
                return Err(Error::AmbientMismatch { left: ambient.n(), right: p.ambient.n() });
            }
        }
        Ok(StarBody { ambient, kind: BodyKind::RadialSum(parts) })
    }

    /// A body known only at `nodes`; querying any other direction fails.
    pub fn tabulated(n: usize, nodes: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        let ambient = Ambient::new(n)?;
        if nodes.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: nodes.len(), got: values.len() });
        }
        let mut map = HashMap::with_capacity(nodes.len());
        for (x, v) in nodes.iter().zip(&values) {
            ambient.check(x)?;
            if !v.is_finite() || *v < RHO_FLOOR {
                return Err(Error::Degenerate { value: *v });
            }
            map.insert(direction_key(x), *v);
        }
        Ok(StarBody { ambient, kind: BodyKind::Tabulated(Arc::new(Table { nodes, values: map })) })
    }

    /// The complex intersection body of `source` with a frozen section
    /// quadrature; radial values are memoized per queried direction.
    pub fn intersection_of(source: StarBody, cfg: RadonConfig) -> Result<Self> {
        Self::intersection_of_capped(source, cfg, DEFAULT_MEMO_CAP)
    }

    pub fn intersection_of_capped(source: StarBody, cfg: RadonConfig, cap: usize) -> Result<Self> {
        if cfg.n() != source.ambient.n() {
            return Err(Error::AmbientMismatch { left: source.ambient.n(), right: cfg.n() });
        }
        let ambient = source.ambient;
        let lazy = LazyIntersection { source, cfg, memo: RwLock::new(HashMap::new()), cap };
        Ok(StarBody { ambient, kind: BodyKind::LazyIntersection(Arc::new(lazy)) })
    }

    /// `λK`.
    pub fn dilate(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidParameter(format!("dilation factor must be positive, got {factor}")));
        }
        let kind = match &self.kind {
            BodyKind::Ball { radius } => BodyKind::Ball { radius: radius * factor },
            BodyKind::LqBall { q, scale } => BodyKind::LqBall { q: *q, scale: scale * factor },
            BodyKind::Ellipsoid(p) => BodyKind::Ellipsoid(ComplexEllipsoidParams { a: p.a * factor, b: p.b * factor, xi: p.xi.clone() }),
            BodyKind::RadialSum(parts) => BodyKind::RadialSum(parts.iter().map(|p| p.dilate(factor)).collect::<Result<_>>()?),
            BodyKind::Dilated { factor: f, body } => BodyKind::Dilated { factor: f * factor, body: body.clone() },
            _ => BodyKind::Dilated { factor, body: Box::new(self.clone()) },
        };
        Ok(StarBody { ambient: self.ambient, kind })
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn n(&self) -> usize {
        self.ambient.n()
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    /// `ρ_K(u)` for a unit direction `u`.
    pub fn radial(&self, u: &[f64]) -> Result<f64> {
        check_len(u, self.ambient.dim())?;
        self.radial_unchecked(u)
    }

    fn radial_unchecked(&self, u: &[f64]) -> Result<f64> {
        match &self.kind {
            BodyKind::Ball { radius } => Ok(*radius),
            BodyKind::LqBall { q, scale } => {
                let s: f64 = moduli_sq(u).map(|m| m.powf(0.5 * q)).sum();
                Ok(scale * s.powf(-1.0 / q))
            }
            BodyKind::Ellipsoid(p) => Ok(p.norm_sq(u).sqrt().recip()),
            BodyKind::RadialSum(parts) => {
                let mut s = 0.0;
                for p in parts {
                    s += p.radial_unchecked(u)?.powi(2);
                }
                Ok(s.sqrt())
            }
            BodyKind::Tabulated(t) => t.values.get(&direction_key(u)).copied().ok_or(Error::OffTable),
            BodyKind::LazyIntersection(l) => l.radial(u),
            BodyKind::Dilated { factor, body } => Ok(factor * body.radial_unchecked(u)?),
        }
    }

    /// `‖x‖_K = |x|₂ / ρ_K(x/|x|₂)`, zero at the origin.
    pub fn minkowski(&self, x: &[f64]) -> Result<f64> {
        check_len(x, self.ambient.dim())?;
        let r = norm(x);
        if r == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            BodyKind::Ball { radius } => Ok(r / radius),
            BodyKind::Ellipsoid(p) => Ok(p.norm_sq(x).sqrt()),
            BodyKind::LqBall { q, scale } => {
                let s: f64 = moduli_sq(x).map(|m| m.powf(0.5 * q)).sum();
                Ok(s.powf(1.0 / q) / scale)
            }
            _ => {
                let u: Vec<f64> = x.iter().map(|v| v / r).collect();
                Ok(r / self.radial_unchecked(&u)?)
            }
        }
    }
}

/// `‖x‖_K`.
pub fn minkowski_functional(body: &StarBody, x: &[f64]) -> Result<f64> {
    body.minkowski(x)
}

/// The complex radial sum: `ρ² = ρ_{K1}² + ρ_{K2}²`.
pub fn radial_sum(k1: &StarBody, k2: &StarBody) -> Result<StarBody> {
    StarBody::radial_sum_of(vec![k1.clone(), k2.clone()])
}

/// `max_i |ρ_K(u_i) - ρ_L(u_i)|` over a node set.
pub fn radial_distance(k: &StarBody, l: &StarBody, nodes: &[Vec<f64>]) -> Result<f64> {
    if k.ambient != l.ambient {
        return Err(Error::AmbientMismatch { left: k.n(), right: l.n() });
    }
    let diffs = crate::parallel::par_try_map(nodes.len(), |i| Ok((k.radial(&nodes[i])? - l.radial(&nodes[i])?).abs()))?;
    Ok(diffs.into_iter().fold(0.0, f64::max))
}

/// JSON description of a body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        radius: f64,
    },
    LqBall {
        q: f64,
        #[serde(default = "unit_scale")]
        scale: f64,
    },
    Ellipsoid {
        a: f64,
        b: f64,
        xi: Vec<f64>,
    },
    RadialSum {
        parts: Vec<BodySpec>,
    },
    IntersectionOf {
        body: Box<BodySpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        level: Option<usize>,
    },
}

fn unit_scale() -> f64 {
    1.0
}

impl BodySpec {
    /// Builds the body in C^n.
    pub fn build(&self, n: usize) -> Result<StarBody> {
        match self {
            BodySpec::Ball { radius } => StarBody::ball(n, *radius),
            BodySpec::LqBall { q, scale } => StarBody::lq_ball_scaled(n, *q, *scale),
            BodySpec::Ellipsoid { a, b, xi } => {
                if xi.len() != 2 * n {
                    return Err(Error::DimensionMismatch { expected: 2 * n, got: xi.len() });
                }
                let r = norm(xi);
                if (r - 1.0).abs() > 1e-9 {
                    return Err(Error::NonUnit { norm: r });
                }
                let xi = xi.iter().map(|v| v / r).collect();
                StarBody::ellipsoid(ComplexEllipsoidParams::new(*a, *b, xi)?)
            }
            BodySpec::RadialSum { parts } => {
                StarBody::radial_sum_of(parts.iter().map(|p| p.build(n)).collect::<Result<_>>()?)
            }
            BodySpec::IntersectionOf { body, level } => {
                let cfg = match level {
                    Some(l) => RadonConfig::with_level(n, *l)?,
                    None => RadonConfig::new(n)?,
                };
                StarBody::intersection_of(body.build(n)?, cfg)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{random_unit, rtheta_apply};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e1(d: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        v[0] = 1.0;
        v
    }

    fn sample_bodies(rng: &mut ChaCha8Rng) -> Vec<StarBody> {
        let xi = random_unit(rng, 6);
        vec![
            StarBody::ball(3, 1.3).unwrap(),
            StarBody::lq_ball(3, 1.0).unwrap(),
            StarBody::lq_ball(3, 3.5).unwrap(),
            StarBody::lq_ball(3, 0.5).unwrap(),
            StarBody::ellipsoid(ComplexEllipsoidParams::new(0.7, 1.9, xi.clone()).unwrap()).unwrap(),
            radial_sum(
                &StarBody::lq_ball(3, 2.5).unwrap(),
                &StarBody::ellipsoid(ComplexEllipsoidParams::new(2.0, 0.5, xi).unwrap()).unwrap(),
            )
            .unwrap(),
        ]
    }

    #[test]
    fn circle_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for k in sample_bodies(&mut rng) {
            for _ in 0..1000 {
                let x = random_unit(&mut rng, 6);
                let th: f64 = rng.random_range(-7.0..7.0);
                let a = k.radial(&x).unwrap();
                let b = k.radial(&rtheta_apply(&x, th).unwrap()).unwrap();
                assert!((a - b).abs() <= 1e-10, "{:?}: {a} vs {b}", k.kind());
                assert!(a > 0.0 && a.is_finite());
            }
        }
    }

    #[test]
    fn minkowski_homogeneity() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for k in sample_bodies(&mut rng) {
            for _ in 0..200 {
                let x: Vec<f64> = random_unit(&mut rng, 6).iter().map(|v| 2.0 * v).collect();
                let lam: f64 = rng.random_range(-10.0..10.0);
                let y: Vec<f64> = x.iter().map(|v| lam * v).collect();
                let a = k.minkowski(&y).unwrap();
                let b = lam.abs() * k.minkowski(&x).unwrap();
                assert!((a - b).abs() <= 1e-12 * b.max(1.0));
            }
            assert_eq!(k.minkowski(&[0.0; 6]).unwrap(), 0.0);
        }
    }

    #[test]
    fn minkowski_examples() {
        let ball = StarBody::ball(2, 1.0).unwrap();
        assert_relative_eq!(ball.minkowski(&[3.0, 4.0, 0.0, 0.0]).unwrap(), 5.0);
        let l3 = StarBody::lq_ball(2, 3.0).unwrap();
        assert_relative_eq!(l3.minkowski(&[1.0, 0.0, 1.0, 0.0]).unwrap(), 2f64.powf(1.0 / 3.0), max_relative = 1e-15);
        // E_{a,b}(e1) at x = (1, 0, 1, 0): 1/a² + 1/b²
        let e = StarBody::ellipsoid(ComplexEllipsoidParams::new(2.0, 0.5, e1(4)).unwrap()).unwrap();
        assert_relative_eq!(e.minkowski(&[1.0, 0.0, 1.0, 0.0]).unwrap(), (0.25f64 + 4.0).sqrt(), max_relative = 1e-15);
        assert!(ball.minkowski(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn radial_sums() {
        let b = StarBody::ball(2, 1.0).unwrap();
        let s = radial_sum(&b, &b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unit(&mut rng, 4);
        assert_relative_eq!(s.radial(&u).unwrap(), 2f64.sqrt(), max_relative = 1e-15);

        let xi = random_unit(&mut rng, 4);
        let e = StarBody::ellipsoid(ComplexEllipsoidParams::new(0.8, 1.7, xi.clone()).unwrap()).unwrap();
        let big = StarBody::ellipsoid(ComplexEllipsoidParams::new(0.8 * 2f64.sqrt(), 1.7 * 2f64.sqrt(), xi).unwrap()).unwrap();
        let es = radial_sum(&e, &e).unwrap();
        for _ in 0..100 {
            let u = random_unit(&mut rng, 4);
            assert!((es.radial(&u).unwrap() - big.radial(&u).unwrap()).abs() < 1e-12);
        }
        let other = StarBody::ball(3, 1.0).unwrap();
        assert!(matches!(radial_sum(&b, &other), Err(Error::AmbientMismatch { .. })));
    }

    #[test]
    fn radial_distance_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let nodes: Vec<Vec<f64>> = (0..50).map(|_| random_unit(&mut rng, 4)).collect();
        let b1 = StarBody::ball(2, 1.0).unwrap();
        let b2 = StarBody::ball(2, 2.0).unwrap();
        assert_eq!(radial_distance(&b1, &b1, &nodes).unwrap(), 0.0);
        assert_relative_eq!(radial_distance(&b1, &b2, &nodes).unwrap(), 1.0);

        let e = StarBody::ellipsoid(ComplexEllipsoidParams::new(2.0, 1.0, e1(4)).unwrap()).unwrap();
        let mut with_axis = nodes.clone();
        with_axis.push(e1(4));
        with_axis.push(vec![-1.0, 0.0, 0.0, 0.0]);
        assert_relative_eq!(radial_distance(&b1, &e, &with_axis).unwrap(), 1.0, max_relative = 1e-15);
        assert!(radial_distance(&b1, &e, &nodes).unwrap() <= 1.0);
    }

    #[test]
    fn tabulated_lookup() {
        let nodes = vec![e1(4), vec![0.0, -0.0, 1.0, 0.0]];
        let t = StarBody::tabulated(2, nodes, vec![1.5, 2.5]).unwrap();
        assert_eq!(t.radial(&e1(4)).unwrap(), 1.5);
        assert_eq!(t.radial(&[0.0, 0.0, 1.0, 0.0]).unwrap(), 2.5);
        assert_eq!(t.radial(&[0.0, 1.0, 0.0, 0.0]), Err(Error::OffTable));
        assert!(StarBody::tabulated(2, vec![e1(4)], vec![1e-9]).is_err());
    }

    #[test]
    fn constructors_reject_degenerate() {
        assert!(StarBody::ball(2, 1e-9).is_err());
        assert!(StarBody::ball(1, 1.0).is_err());
        assert!(StarBody::lq_ball(2, 0.0).is_err());
        assert!(ComplexEllipsoidParams::new(1.0, 0.0, e1(4)).is_err());
        assert!(ComplexEllipsoidParams::new(1.0, 1.0, vec![1.0, 1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn body_spec_json() {
        let s: BodySpec = serde_json::from_str(
            r#"{"type":"radial_sum","parts":[{"type":"ball","radius":1.0},{"type":"lq_ball","q":3}]}"#,
        )
        .unwrap();
        let k = s.build(2).unwrap();
        let u = e1(4);
        assert_relative_eq!(k.radial(&u).unwrap(), 2f64.sqrt(), max_relative = 1e-15);
        let bad = serde_json::from_str::<BodySpec>(r#"{"type":"ball","radius":1.0,"extra":2}"#);
        assert!(bad.is_err());
        let e: BodySpec = serde_json::from_str(r#"{"type":"ellipsoid","a":1,"b":2,"xi":[0,0,1,0]}"#).unwrap();
        assert!(e.build(2).is_ok());
        assert!(e.build(3).is_err());
    }

    #[test]
    fn dilation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for k in sample_bodies(&mut rng) {
            let k2 = k.dilate(1.7).unwrap();
            let u = random_unit(&mut rng, 6);
            assert_relative_eq!(k2.radial(&u).unwrap(), 1.7 * k.radial(&u).unwrap(), max_relative = 1e-14);
        }
    }
}
