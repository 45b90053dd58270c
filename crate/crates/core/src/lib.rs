//! Numerical tools for complex star bodies in C^n = R^{2n}: radial
//! oracles, complex hyperplane sections and the complex spherical Radon
//! transform, complex intersection bodies, membership certificates over
//! complex-ellipsoid atoms, and checks of the associated measure and
//! convexity inequalities.

pub mod body;
pub mod constants;
pub mod convexity;
pub mod error;
pub mod geometry;
pub mod inequalities;
pub mod intersection;
pub mod measure;
pub mod membership;
pub mod nnls;
mod parallel;
pub mod quadrature;
pub mod radon;

pub use body::{minkowski_functional, radial_distance, radial_sum, BodyKind, BodySpec, ComplexEllipsoidParams, StarBody};
pub use error::{Error, Result};
pub use geometry::{hyperplane_frame, rtheta_apply, Ambient, HyperplaneFrame};
pub use measure::{AnnulusDensity, Measure};
pub use quadrature::{integrate_sphere, polar_integrate, sphere_rule, subsphere_rule, RadialRule, SphereRule};
pub use radon::{measure_of_section, radon_transform, section_volume, RadonConfig, RadonMatrix};
