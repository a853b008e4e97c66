//! Special functions, quadrature, optimisation and complex field vectors.

pub mod bessel;
pub mod optimize;
pub mod quadrature;
pub mod vec3;

pub use bessel::{bessel_j, bessel_j_seq, MAX_ORDER};
pub use optimize::{golden_max, scan_then_golden, Maximum};
pub use quadrature::{
    adaptive_integrate, integrate_real, integrate_with_estimate, Estimate, QuadValue,
    QuadratureSpec,
};
pub use vec3::{direction, rotated_polarization, ComplexVec3, Spherical};
