//! Complex intersection bodies, the closed-form Radon image of complex
//! ellipsoids, and the smoothing kernel built from them.

use crate::body::{ComplexEllipsoidParams, StarBody};
use crate::constants::{fourier_constant, sphere_area};
use crate::error::{Error, Result};
use crate::geometry::{check_len, hyperplane_frame};
use crate::quadrature::{gauss_legendre, SphereRule};
use crate::radon::RadonConfig;

/// `I_c(L)`: `π ρ(ξ)² = |L ∩ H_ξ|`, evaluated lazily with `cfg`.
pub fn intersection_body(body: &StarBody, cfg: &RadonConfig) -> Result<StarBody> {
    StarBody::intersection_of(body.clone(), cfg.clone())
}

/// Closed form of `R_c(‖·‖_{E_{a,b}(η)}^{-2n+2})(θ)`:
/// `(2π)^{2n-1} b^{2n-4} / C(n) · ‖θ‖_{E_{b,a}(η)}^{-2}`.
pub fn ellipsoid_radon_oracle(a: f64, b: f64, eta: &[f64], theta: &[f64], n: usize) -> Result<f64> {
    check_len(eta, 2 * n)?;
    check_len(theta, 2 * n)?;
    let swapped = ComplexEllipsoidParams::new(b, a, eta.to_vec())?;
    let c = (2.0 * std::f64::consts::PI).powi(2 * n as i32 - 1) * b.powi(2 * n as i32 - 4) / fourier_constant(n);
    Ok(c * swapped.atom(theta))
}

/// `‖θ‖_{E_{a,b}(η)}^{-2n+2}`, the function whose Radon image the oracle gives.
pub fn ellipsoid_power(params: &ComplexEllipsoidParams, x: &[f64]) -> f64 {
    let n = x.len() / 2;
    params.norm_sq(x).powi(-(n as i32 - 1))
}

/// Kernel value `(C(n)/a^{2n-4}) ‖θ‖_{E_{b,a}(ξ)}^{-2n+2}` as a function of
/// `s = |(θ, ξ)_c|²`.
fn kernel_at(s: f64, a: f64, b: f64, n: usize) -> f64 {
    let q = s / (b * b) + (1.0 - s) / (a * a);
    fourier_constant(n) / a.powi(2 * n as i32 - 4) * q.powi(-(n as i32 - 1))
}

/// Panels in `t = 1 - s`, geometrically refined toward `t = 0` where the
/// kernel concentrates for small `a`.
fn t_panels() -> Vec<(f64, f64)> {
    let mut edges = vec![0.0];
    let mut t = 1e-16;
    while t < 1.0 {
        edges.push(t);
        t *= 2.0;
    }
    edges.push(1.0);
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// `∫_{S^{2n-1}} k_{a,b}(θ, ξ) dθ`, reduced to one dimension using that
/// `|(θ, ξ)_c|²` has density `(n-1)(1-s)^{n-2}` on `[0, 1]`.
pub fn kernel_mass(a: f64, b: f64, n: usize) -> f64 {
    let (gx, gw) = gauss_legendre(12);
    let mut total = 0.0;
    for (lo, hi) in t_panels() {
        let h = hi - lo;
        for (x, w) in gx.iter().zip(&gw) {
            let t = lo + 0.5 * h * (x + 1.0);
            total += 0.5 * h * w * kernel_at(1.0 - t, a, b, n) * t.powi(n as i32 - 2);
        }
    }
    sphere_area(2 * n) * (n as f64 - 1.0) * total
}

/// The same mass evaluated with a sphere rule around an explicit `ξ`.
pub fn kernel_mass_on_rule(a: f64, b: f64, xi: &[f64], rule: &SphereRule) -> Result<f64> {
    let n = xi.len() / 2;
    hyperplane_frame(xi)?;
    Ok(rule.integrate_invariant(|theta| kernel_at(crate::geometry::complex_inner_sq(theta, xi), a, b, n)))
}

fn bisect_bandwidth<F: Fn(f64) -> f64>(a: f64, tol: f64, mass: F) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("bandwidth needs a > 0, got {a}")));
    }
    if !(tol > 1e-14) {
        return Err(Error::Bracket(format!("tolerance {tol:e} below quadrature resolution")));
    }
    let (mut lo, mut hi) = (a.ln(), a.ln());
    while mass(lo.exp()) > 1.0 {
        lo -= 1.0;
        if lo < a.ln() - 200.0 {
            return Err(Error::Bracket("kernel mass stays above 1".into()));
        }
    }
    while mass(hi.exp()) < 1.0 {
        hi += 1.0;
        if hi > a.ln() + 200.0 {
            return Err(Error::Bracket("kernel mass stays below 1".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let m = mass(mid.exp());
        if (m - 1.0).abs() <= tol {
            return Ok(mid.exp());
        }
        if m > 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::Bracket(format!("no b with |mass - 1| <= {tol:e}")))
}

/// The `b` making the kernel `(C(n)/a^{2n-4}) ‖·‖_{E_{b,a}(ξ)}^{-2n+2}` a
/// probability density on the sphere. Independent of `ξ`.
pub fn kernel_bandwidth(a: f64, n: usize, tol: f64) -> Result<f64> {
    bisect_bandwidth(a, tol, |b| kernel_mass(a, b, n))
}

/// [`kernel_bandwidth`] with the mass integrated by a sphere rule at `ξ`.
pub fn kernel_bandwidth_on_rule(a: f64, xi: &[f64], rule: &SphereRule, tol: f64) -> Result<f64> {
    hyperplane_frame(xi)?;
    let n = xi.len() / 2;
    bisect_bandwidth(a, tol, |b| rule.integrate_invariant(|theta| kernel_at(crate::geometry::complex_inner_sq(theta, xi), a, b, n)))
}

/// `∫_{S^{2n-1}} ρ_K(θ)² k_{a,b(a)}(θ, ξ) dθ`, which tends to `ρ_K(ξ)²` as
/// `a → 0`.
///
/// Integrated in coordinates adapted to `ξ`:
/// `θ = √s·ξ + √(1-s)·w`, `w ∈ S^{2n-1} ∩ H_ξ`, with `w` averaged by the
/// section rule of `cfg`.
pub fn smoothed_square(body: &StarBody, xi: &[f64], a: f64, cfg: &RadonConfig) -> Result<f64> {
    let n = body.n();
    let b = kernel_bandwidth(a, n, 1e-12)?;
    let frame = hyperplane_frame(xi)?;
    let base = cfg.base();
    let area = sphere_area(2 * n - 2);
    let mut w = vec![0.0; 2 * n];
    let (gx, gw) = gauss_legendre(12);
    let mut total = 0.0;
    for (lo, hi) in t_panels() {
        let h = hi - lo;
        for (x, wt) in gx.iter().zip(&gw) {
            let t = lo + 0.5 * h * (x + 1.0);
            let (cs, sn) = ((1.0 - t).sqrt(), t.sqrt());
            let mut avg = 0.0;
            for i in 0..base.rep_count() {
                frame.embed_into(base.rep(i), &mut w);
                let theta: Vec<f64> = xi.iter().zip(&w).map(|(p, q)| cs * p + sn * q).collect();
                avg += base.rep_weight(i) * body.radial(&theta)?.powi(2);
            }
            avg /= area;
            total += 0.5 * h * wt * kernel_at(1.0 - t, a, b, n) * t.powi(n as i32 - 2) * avg;
        }
    }
    Ok(sphere_area(2 * n) * (n as f64 - 1.0) * total)
}
