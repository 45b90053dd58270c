//! Ball volumes, sphere areas and the dimensional constants of the theory.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// `|B_2^d|`, by the recursion `|B^d| = (2π/d)|B^{d-2}|`.
pub fn ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / d as f64 * ball_volume(d - 2),
    }
}

/// `|S^{d-1}| = d·|B_2^d|`.
pub fn sphere_area(d: usize) -> f64 {
    d as f64 * ball_volume(d)
}

/// `d_n = |B_2^{2n}|^{(n-1)/n} / |B_2^{2n-2}|`.
pub fn d_n(n: usize) -> f64 {
    let nf = n as f64;
    ball_volume(2 * n).powf((nf - 1.0) / nf) / ball_volume(2 * n - 2)
}

/// The sharp constant `(n/(n-1))·d_n` of the hyperplane inequality for
/// general measures.
pub fn hyperplane_bound(n: usize) -> f64 {
    n as f64 / (n as f64 - 1.0) * d_n(n)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `C(n) = 2^{2n-2} π^n Γ(n-1)`, the constant relating the Fourier transform
/// of `‖·‖_E^{-2n+2}` for a complex ellipsoid to its complex Radon transform.
pub fn fourier_constant(n: usize) -> f64 {
    assert!(n >= 2, "fourier_constant needs n >= 2");
    2f64.powi(2 * n as i32 - 2) * PI.powi(n as i32) * factorial(n - 2)
}

/// The value `2^{2n-3} π^n Γ(n-1)` sometimes quoted for the same constant;
/// it is off by a factor of 2 and is kept only for comparison.
pub fn fourier_constant_uncorrected(n: usize) -> f64 {
    fourier_constant(n) / 2.0
}

/// The constants used by an experiment in complex dimension `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub n: usize,
    pub fourier_constant: f64,
    pub fourier_constant_uncorrected: f64,
    pub corrected_constant: bool,
    pub ball_volume: f64,
    pub ball_volume_section: f64,
    pub sphere_area: f64,
    pub sphere_area_section: f64,
    pub d_n: f64,
    pub hyperplane_bound: f64,
}

impl Constants {
    pub fn new(n: usize) -> Self {
        Constants {
            n,
            fourier_constant: fourier_constant(n),
            fourier_constant_uncorrected: fourier_constant_uncorrected(n),
            corrected_constant: true,
            ball_volume: ball_volume(2 * n),
            ball_volume_section: ball_volume(2 * n - 2),
            sphere_area: sphere_area(2 * n),
            sphere_area_section: sphere_area(2 * n - 2),
            d_n: d_n(n),
            hyperplane_bound: hyperplane_bound(n),
        }
    }
}
