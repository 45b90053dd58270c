//! Circle-invariant measures on R^{2n} given by densities.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{moduli_sq, norm};
use crate::quadrature::RadialRule;

/// A radial bump `f_j(r) = c_j (r - (1 - 1/j))² (1 - r)²` on `(1 - 1/j, 1)`
/// with `∫_0^1 f_j = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusDensity {
    pub j: u32,
}

impl AnnulusDensity {
    pub fn new(j: u32) -> Result<Self> {
        if j < 2 {
            return Err(Error::InvalidParameter(format!("annulus index j must be >= 2, got {j}")));
        }
        Ok(AnnulusDensity { j })
    }

    pub fn inner(&self) -> f64 {
        1.0 - 1.0 / self.j as f64
    }

    /// `c_j = 30 j^5`.
    pub fn normalization(&self) -> f64 {
        30.0 * (self.j as f64).powi(5)
    }

    pub fn profile(&self, r: f64) -> f64 {
        let lo = self.inner();
        if r <= lo || r >= 1.0 {
            return 0.0;
        }
        let a = r - lo;
        let b = 1.0 - r;
        self.normalization() * a * a * b * b
    }
}

/// A measure with an even, circle-invariant, nonnegative density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Measure {
    Lebesgue,
    /// `(2πσ²)^{-n} exp(-|x|²/2σ²)`.
    Gaussian { sigma: f64 },
    /// `Π_k (2πσ_k²)^{-1} exp(-|z_k|²/2σ_k²)`.
    ComplexGaussian { sigmas: Vec<f64> },
    /// Density `f_j(|x|₂)`.
    Annulus { j: u32 },
}

/// Effective support of Gaussian tails, in standard deviations.
const GAUSS_CUTOFF: f64 = 12.0;

impl Measure {
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            Measure::Lebesgue => Ok(()),
            Measure::Gaussian { sigma } => {
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::InvalidParameter(format!("gaussian sigma must be positive, got {sigma}")));
                }
                Ok(())
            }
            Measure::ComplexGaussian { sigmas } => {
                if sigmas.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: sigmas.len() });
                }
                if sigmas.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
                    return Err(Error::InvalidParameter("complex gaussian sigmas must be positive".into()));
                }
                Ok(())
            }
            Measure::Annulus { j } => AnnulusDensity::new(*j).map(|_| ()),
        }
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        match self {
            Measure::Lebesgue => 1.0,
            Measure::Gaussian { sigma } => {
                let n = x.len() / 2;
                let s2 = sigma * sigma;
                (2.0 * PI * s2).powi(-(n as i32)) * (-0.5 * norm(x).powi(2) / s2).exp()
            }
            Measure::ComplexGaussian { sigmas } => moduli_sq(x)
                .zip(sigmas)
                .map(|(m, s)| (-0.5 * m / (s * s)).exp() / (2.0 * PI * s * s))
                .product(),
            Measure::Annulus { j } => AnnulusDensity { j: *j }.profile(norm(x)),
        }
    }

    /// Radial interval outside of which the density along `θ` is zero or
    /// negligible.
    pub fn radial_support(&self, theta: &[f64]) -> (f64, f64) {
        match self {
            Measure::Lebesgue => (0.0, f64::INFINITY),
            Measure::Gaussian { sigma } => (0.0, GAUSS_CUTOFF * sigma),
            Measure::ComplexGaussian { sigmas } => {
                let q: f64 = moduli_sq(theta).zip(sigmas).map(|(m, s)| m / (s * s)).sum();
                (0.0, GAUSS_CUTOFF / q.sqrt())
            }
            Measure::Annulus { j } => (AnnulusDensity { j: *j }.inner(), 1.0),
        }
    }

    /// `∫_0^ρ r^p f(rθ) dr` for a unit direction `θ`.
    pub fn radial_integral(&self, theta: &[f64], rho: f64, p: usize, radial: &RadialRule) -> f64 {
        match self {
            Measure::Lebesgue => rho.powi(p as i32 + 1) / (p + 1) as f64,
            _ => {
                let (lo, hi) = self.radial_support(theta);
                let hi = hi.min(rho);
                let mut x = vec![0.0; theta.len()];
                radial.integrate(lo, hi, |r| {
                    x.iter_mut().zip(theta).for_each(|(xi, t)| *xi = r * t);
                    r.powi(p as i32) * self.density(&x)
                })
            }
        }
    }

    pub fn is_lebesgue(&self) -> bool {
        matches!(self, Measure::Lebesgue)
    }
}
