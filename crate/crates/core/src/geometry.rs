//! Vectors of R^{2n} carrying the complex structure of C^n.
//!
//! Coordinates are stored as `(x11, x12, ..., xn1, xn2)`, i.e. the real and
//! imaginary parts of each complex coordinate are adjacent. The circle action
//! `R_θ` rotates every pair by the same angle; `J = R_{π/2}` is multiplication
//! by `i`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used to accept a direction as a unit vector.
pub const UNIT_TOL: f64 = 1e-12;

/// The ambient space C^n = R^{2n}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ambient {
    n: usize,
}

impl Ambient {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidAmbient(n));
        }
        Ok(Ambient { n })
    }

    /// Complex dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Real dimension `2n`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn check(&self, x: &[f64]) -> Result<()> {
        check_len(x, self.dim())
    }
}

pub(crate) fn check_len(x: &[f64], expected: usize) -> Result<()> {
    if x.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: x.len() });
    }
    Ok(())
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Returns `x / |x|`, or `None` for the zero vector.
pub fn normalized(x: &[f64]) -> Option<Vec<f64>> {
    let r = norm(x);
    if r == 0.0 || !r.is_finite() {
        return None;
    }
    Some(x.iter().map(|v| v / r).collect())
}

/// Multiplication by `i`: `(x11, x12, ...) -> (-x12, x11, ...)`.
pub fn j_map(x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for (o, p) in out.chunks_exact_mut(2).zip(x.chunks_exact(2)) {
        o[0] = -p[1];
        o[1] = p[0];
    }
    out
}

/// Applies the coordinate-wise rotation `R_θ` to every complex coordinate.
pub fn rtheta_apply(x: &[f64], theta: f64) -> Result<Vec<f64>> {
    if x.len() % 2 != 0 {
        return Err(Error::DimensionMismatch { expected: x.len() + 1, got: x.len() });
    }
    let mut out = x.to_vec();
    rotate_in_place(&mut out, theta);
    Ok(out)
}

pub(crate) fn rotate_in_place(x: &mut [f64], theta: f64) {
    let (s, c) = theta.sin_cos();
    for p in x.chunks_exact_mut(2) {
        let (a, b) = (p[0], p[1]);
        p[0] = c * a - s * b;
        p[1] = s * a + c * b;
    }
}

/// `|(x, ξ)_c|² = (x, ξ)² + (x, ξ^⊥)²`, the squared modulus of the Hermitian
/// product of `x` and `ξ` viewed as vectors of C^n.
pub fn complex_inner_sq(x: &[f64], xi: &[f64]) -> f64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (p, q) in x.chunks_exact(2).zip(xi.chunks_exact(2)) {
        // (x, ξ) and (x, Jξ) with Jξ = (-ξ2, ξ1)
        re += p[0] * q[0] + p[1] * q[1];
        im += -p[0] * q[1] + p[1] * q[0];
    }
    re * re + im * im
}

/// Squared moduli `|z_k|²` of the complex coordinates.
pub fn moduli_sq(x: &[f64]) -> impl Iterator<Item = f64> + '_ {
    x.chunks_exact(2).map(|p| p[0] * p[0] + p[1] * p[1])
}

/// Draws a direction uniformly from the unit sphere of R^d.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        if let Some(u) = normalized(&v) {
            return u;
        }
    }
}

/// A unit direction `ξ`, its complex partner `ξ^⊥ = Jξ`, and an orthonormal
/// basis of the complex hyperplane `H_ξ`.
///
/// The basis comes in pairs `(v, Jv)`, so mapping a point of C^{n-1} through
/// it commutes with the circle action.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperplaneFrame {
    pub xi: Vec<f64>,
    pub xi_perp: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
}

impl HyperplaneFrame {
    /// Maps coordinates `y` of C^{n-1} into `H_ξ ⊂ R^{2n}`.
    pub fn embed(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.xi.len()];
        self.embed_into(y, &mut out);
        out
    }

    pub(crate) fn embed_into(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (c, b) in y.iter().zip(&self.basis) {
            if *c == 0.0 {
                continue;
            }
            for (o, bv) in out.iter_mut().zip(b) {
                *o += c * bv;
            }
        }
    }
}

/// Builds the frame of `H_ξ` for a unit direction `xi`.
///
/// Standard basis vectors `e_{2k-1}` are orthonormalized against
/// `{ξ, ξ^⊥}` and the pairs accepted so far, visiting complex coordinates in
/// order of increasing `|ξ_k|`; each accepted vector brings its partner `Jv`.
pub fn hyperplane_frame(xi: &[f64]) -> Result<HyperplaneFrame> {
    let d = xi.len();
    if d < 4 || d % 2 != 0 {
        return Err(Error::DimensionMismatch { expected: d.max(4) + d % 2, got: d });
    }
    let r = norm(xi);
    if (r - 1.0).abs() >= UNIT_TOL {
        return Err(Error::NonUnit { norm: r });
    }
    let xi = xi.to_vec();
    let xi_perp = j_map(&xi);

    let mut order: Vec<(f64, usize)> =
        moduli_sq(&xi).enumerate().map(|(k, m)| (m, k)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let candidates = order.iter().map(|&(_, k)| {
        let mut v = vec![0.0; d];
        v[2 * k] = 1.0;
        v
    });
    let basis = complex_orthonormal_pairs(candidates, &[xi.clone(), xi_perp.clone()], d / 2 - 1);
    assert_eq!(basis.len(), d - 2, "rank deficiency building H_xi frame");
    Ok(HyperplaneFrame { xi, xi_perp, basis })
}

/// Orthonormalizes `candidates` into pairs `(v, Jv)` orthogonal to the
/// orthonormal, `J`-closed family `against`, stopping after `pairs` pairs.
/// Candidates whose residual is below `1e-3` are skipped.
pub fn complex_orthonormal_pairs<I>(candidates: I, against: &[Vec<f64>], pairs: usize) -> Vec<Vec<f64>>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut accepted: Vec<Vec<f64>> = against.to_vec();
    let mut out = Vec::with_capacity(2 * pairs);
    for mut v in candidates {
        if out.len() == 2 * pairs {
            break;
        }
        let scale = norm(&v);
        if scale == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= scale);
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for a in &accepted {
                let c = dot(&v, a);
                v.iter_mut().zip(a).for_each(|(x, y)| *x -= c * y);
            }
        }
        let len = norm(&v);
        if len < 1e-3 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= len);
        let jv = j_map(&v);
        accepted.push(v.clone());
        accepted.push(jv.clone());
        out.push(v);
        out.push(jv);
    }
    out
}

/// Random unitary map of C^m in real form: column pairs `(v_k, Jv_k)`,
/// returned as the list of images of the standard basis vectors.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<Vec<f64>> {
    loop {
        let cands: Vec<Vec<f64>> = (0..m).map(|_| random_unit(rng, 2 * m)).collect();
        let cols = complex_orthonormal_pairs(cands, &[], m);
        if cols.len() == 2 * m {
            return cols;
        }
    }
}

/// Applies a real-form linear map given by its columns.
pub fn apply_columns(cols: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; cols[0].len()];
    for (c, col) in y.iter().zip(cols) {
        for (o, v) in out.iter_mut().zip(col) {
            *o += c * v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn rotation_identity_and_quarter_turn() {
        let x = [0.3, -1.2, 2.0, 0.5];
        assert_eq!(rtheta_apply(&x, 0.0).unwrap(), x.to_vec());
        let y = rtheta_apply(&[1.0, 0.0, 0.0, 0.0], PI / 2.0).unwrap();
        assert!((y[0]).abs() < 1e-15 && (y[1] - 1.0).abs() < 1e-15);
        assert!(rtheta_apply(&[1.0, 2.0, 3.0], 0.1).is_err());
    }

    #[test]
    fn rotations_compose() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x = random_unit(&mut rng, 8);
            let a: f64 = rng.random_range(-10.0..10.0);
            let b: f64 = rng.random_range(-10.0..10.0);
            let lhs = rtheta_apply(&rtheta_apply(&x, a).unwrap(), b).unwrap();
            let rhs = rtheta_apply(&x, a + b).unwrap();
            let err: f64 = lhs.iter().zip(&rhs).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            assert!(err < 1e-12);
            let r = rtheta_apply(&x, a).unwrap();
            assert!((norm(&r) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn axis_frame() {
        let f = hyperplane_frame(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(f.xi_perp, vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(f.basis, vec![vec![0.0, 0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0, 1.0]]);
    }

    #[test]
    fn perp_pattern() {
        let xi = [0.5, -0.5, 0.5, 0.5];
        let f = hyperplane_frame(&xi).unwrap();
        assert_eq!(f.xi_perp, vec![0.5, 0.5, -0.5, 0.5]);
    }

    #[test]
    fn random_frames_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [4, 6, 8] {
            for _ in 0..50 {
                let xi = random_unit(&mut rng, d);
                let f = hyperplane_frame(&xi).unwrap();
                assert_eq!(f.basis.len(), d - 2);
                let mut all = vec![f.xi.clone(), f.xi_perp.clone()];
                all.extend(f.basis.iter().cloned());
                for (i, a) in all.iter().enumerate() {
                    for (j, b) in all.iter().enumerate() {
                        let g = dot(a, b);
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((g - want).abs() < 1e-12, "gram[{i}][{j}] = {g}");
                    }
                }
            }
        }
    }

    #[test]
    fn frame_rejects_non_unit() {
        assert!(matches!(hyperplane_frame(&[1.0, 0.0, 0.0, 0.1]), Err(Error::NonUnit { .. })));
    }

    #[test]
    fn frame_span_is_circle_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let xi = random_unit(&mut rng, 6);
            let f0 = hyperplane_frame(&xi).unwrap();
            let th: f64 = rng.random_range(0.0..2.0 * PI);
            let f1 = hyperplane_frame(&rtheta_apply(&xi, th).unwrap()).unwrap();
            for b in &f1.basis {
                let proj: Vec<f64> = f0.basis.iter().fold(vec![0.0; 6], |mut acc, e| {
                    let c = dot(b, e);
                    acc.iter_mut().zip(e).for_each(|(a, v)| *a += c * v);
                    acc
                });
                let res: f64 = b.iter().zip(&proj).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
                assert!(res < 1e-10);
            }
        }
    }

    #[test]
    fn random_unitary_commutes_with_j() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_unitary(&mut rng, 3);
        let x = random_unit(&mut rng, 6);
        let a = apply_columns(&u, &j_map(&x));
        let b = j_map(&apply_columns(&u, &x));
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).abs() < 1e-13);
        }
        assert!((norm(&apply_columns(&u, &x)) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn complex_inner_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_unit(&mut rng, 6);
        let xi = random_unit(&mut rng, 6);
        let want = dot(&x, &xi).powi(2) + dot(&x, &j_map(&xi)).powi(2);
        assert!((complex_inner_sq(&x, &xi) - want).abs() < 1e-15);
    }
}
