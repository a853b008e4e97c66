//! Exact source-free Maxwell modes with cylindrical symmetry.
//!
//! A mode `(k_t, m, s)` is the superposition of plane waves on the cone
//! `k_z = k·sqrt(1 - k_t²)` with azimuthal weight `e^{imφ_k}` and helicity-`s`
//! polarization:
//!
//! ```text
//! F(r) = (1/2π) ∮ dφ_k/2π  e^{imφ_k} ε̂_s(θ, φ_k) e^{i k·r}
//! ```
//!
//! The azimuthal integral has the closed form implemented by [`mode_field`];
//! [`mode_field_oracle`] evaluates it by brute force. Transverse momenta are in
//! units of `k`, lengths in wavelengths.

use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::numerics::{
    bessel_j, direction, integrate_real, rotated_polarization, ComplexVec3, QuadratureSpec,
};
use crate::real::Real;

/// Label `(k_t, m, s)` of a propagating mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeIndex<T> {
    /// Transverse wavenumber in units of `k`, in `(0, 1]`.
    pub k_t: T,
    pub m: i32,
    /// Helicity, `+1` or `-1`.
    pub s: i32,
}

impl<T: Real> ModeIndex<T> {
    pub fn new(k_t: T, m: i32, s: i32) -> Result<Self> {
        let mu = Self { k_t, m, s };
        mu.validate()?;
        Ok(mu)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_t > T::zero() && self.k_t <= T::one()) {
            return Err(invalid("k_t", format!("{} not in (0, 1]", self.k_t)));
        }
        if self.s != 1 && self.s != -1 {
            return Err(invalid("s", format!("{} is not ±1", self.s)));
        }
        if self.m.unsigned_abs() + 1 > crate::numerics::MAX_ORDER {
            return Err(invalid("m", format!("|m| = {} too large", self.m.abs())));
        }
        Ok(())
    }

    /// `k_z / k = sqrt(1 - k_t²)`.
    pub fn k_z(&self) -> T {
        (T::one() - self.k_t * self.k_t).max(T::zero()).sqrt()
    }
}

/// Point in cylindrical coordinates, lengths in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylindrical<T> {
    pub rho: T,
    pub phi: T,
    pub z: T,
}

impl<T: Real> Cylindrical<T> {
    pub fn new(rho: T, phi: T, z: T) -> Self {
        Self { rho, phi, z }
    }

    pub fn on_axis(z: T) -> Self {
        Self::new(T::zero(), T::zero(), z)
    }

    pub fn from_cartesian(x: T, y: T, z: T) -> Self {
        Self::new(x.hypot(y), y.atan2(x), z)
    }

    pub fn to_cartesian(&self) -> [T; 3] {
        let (s, c) = self.phi.sin_cos();
        [self.rho * c, self.rho * s, self.z]
    }
}

/// `i^n` for any integer `n`.
pub(crate) fn i_pow<T: Real>(n: i32) -> Complex<T> {
    match n.rem_euclid(4) {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

/// `J_n(x)` for signed `n` via `J_{-n} = (-1)^n J_n`.
pub(crate) fn bessel_signed<T: Real>(n: i32, x: T) -> Result<T> {
    let v = bessel_j(n.unsigned_abs(), x)?;
    Ok(if n < 0 && n % 2 != 0 { -v } else { v })
}

/// Closed-form mode function `F_μ(r)`.
pub fn mode_field<T: Real>(mu: &ModeIndex<T>, r: &Cylindrical<T>) -> Result<ComplexVec3<T>> {
    mu.validate()?;
    let k = T::two_pi();
    let u = mu.k_z();
    let s = T::lit(mu.s as f64);
    let half = T::lit(0.5);
    let x = k * mu.k_t * r.rho;
    let m = mu.m;
    let prefactor = Complex::from_polar(T::one() / T::two_pi(), k * u * r.z);
    let azimuth = |n: i32| Complex::from_polar(T::one(), T::lit(n as f64) * r.phi);

    let c_plus = i_pow::<T>(m - 1) * azimuth(m - 1) * (bessel_signed(m - 1, x)? * (u + s) * half);
    let c_minus = i_pow::<T>(m + 1) * azimuth(m + 1) * (bessel_signed(m + 1, x)? * (u - s) * half);
    let c_z = -(i_pow::<T>(m) * azimuth(m) * (bessel_signed(m, x)? * mu.k_t * T::FRAC_1_SQRT_2()));
    Ok(ComplexVec3::new(c_plus, c_minus, c_z).scale(prefactor))
}

/// Brute-force angular-spectrum evaluation of the same mode: trapezoidal rule
/// on the periodic azimuthal integral over the wavevector cone.
pub fn mode_field_oracle<T: Real>(
    mu: &ModeIndex<T>,
    r: &Cylindrical<T>,
    n_nodes: usize,
) -> Result<ComplexVec3<T>> {
    mu.validate()?;
    if n_nodes < 64 {
        return Err(invalid("n_nodes", "at least 64 azimuthal nodes required"));
    }
    let k = T::two_pi();
    let theta = mu.k_z().acos();
    let pos = r.to_cartesian();
    let mut acc = ComplexVec3::zero();
    let h = T::two_pi() / T::from_usize_lossy(n_nodes);
    for j in 0..n_nodes {
        let phi_k = h * T::from_usize_lossy(j);
        let dir = direction(theta, phi_k);
        let phase = k * (dir[0] * pos[0] + dir[1] * pos[1] + dir[2] * pos[2])
            + T::lit(mu.m as f64) * phi_k;
        acc += rotated_polarization(theta, phi_k, mu.s).scale(Complex::from_polar(T::one(), phase));
    }
    Ok(acc.scale_real(T::one() / (T::two_pi() * T::from_usize_lossy(n_nodes))))
}

/// Coefficient of `δ(k_t - k_t')/(2π k_t)` in the overlap of modes with equal
/// `k_t` and `m`: unity for equal helicities, zero otherwise.
pub fn closure_weight<T: Real>(k_t: T, s_a: i32, s_b: i32) -> T {
    let u = (T::one() - k_t * k_t).max(T::zero()).sqrt();
    let (sa, sb) = (T::lit(s_a as f64), T::lit(s_b as f64));
    ((u + sa) * (u + sb) + (u - sa) * (u - sb)) * T::lit(0.25) + k_t * k_t * T::lit(0.5)
}

/// Overlap `∫_{ρ ≤ window} dS F*_a · F_b` in the plane `z = 0`.
///
/// The δ-normalisation of the full-plane overlap shows up as a term growing
/// linearly with the window for equal `k_t` and helicity; everything else
/// stays bounded.
pub fn orthonormality_defect<T: Real>(
    k_t_a: T,
    k_t_b: T,
    m: i32,
    s_a: i32,
    s_b: i32,
    window_radius: T,
) -> Result<Complex<T>> {
    if window_radius < T::lit(50.0) {
        return Err(invalid("window_radius", "at least 50 wavelengths required"));
    }
    let a = ModeIndex::new(k_t_a, m, s_a)?;
    let b = ModeIndex::new(k_t_b, m, s_b)?;
    let k = T::two_pi();
    let (ua, ub) = (a.k_z(), b.k_z());
    let (sa, sb) = (T::lit(s_a as f64), T::lit(s_b as f64));
    let quarter = T::lit(0.25);
    let w_minus = (ua + sa) * (ub + sb) * quarter;
    let w_plus = (ua - sa) * (ub - sb) * quarter;
    let w_z = k_t_a * k_t_b * T::lit(0.5);
    let radial = |rho: T| -> T {
        let (xa, xb) = (k * k_t_a * rho, k * k_t_b * rho);
        let j = |n: i32, x: T| bessel_signed(n, x).unwrap_or_else(|_| T::nan());
        rho * (w_minus * j(m - 1, xa) * j(m - 1, xb)
            + w_plus * j(m + 1, xa) * j(m + 1, xb)
            + w_z * j(m, xa) * j(m, xb))
    };
    let spec = QuadratureSpec {
        rel_tol: 1e-12,
        abs_tol: 1e-14,
        max_depth: 40,
        min_nodes_per_oscillation: 8,
    };
    // split into unit-wavelength panels so the Bessel oscillations are resolved
    let panels = window_radius.ceil().to_usize().unwrap_or(1).max(1);
    let width = window_radius / T::from_usize_lossy(panels);
    let mut total = T::zero();
    for i in 0..panels {
        let lo = width * T::from_usize_lossy(i);
        total += integrate_real(radial, lo, lo + width, &spec)?;
    }
    // (1/2π)² from both modes times 2π from the azimuth
    Ok(Complex::new(total / T::two_pi(), T::zero()))
}
