//! `J = 0 → J = 1` atom driven by a focused field.
//!
//! Natural units throughout: `ε₀ = ħ = c = 1`, lengths in wavelengths, so
//! rates are in units of `c/λ`. The reduced dipole moment follows from the
//! decay rate, `d² = 3πΓ/k³`.

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::numerics::{ComplexVec3, Spherical};
use crate::real::Real;

const SPEED_OF_LIGHT: f64 = 299_792_458.0;
const HBAR: f64 = 1.054_571_817e-34;

/// Smallest atom-detector distance accepted by [`dipole_far_field`].
pub const FAR_FIELD_FLOOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSpec<T> {
    /// Transition wavelength in nm; the beam is resonant with it.
    pub lambda_nm: T,
    /// Decay rate of each excited sublevel in rad/s.
    pub gamma: T,
    /// Laser detuning `ω - ω_a` in rad/s.
    pub detuning: T,
    /// Position in wavelengths.
    pub position: [T; 3],
}

impl<T: Real> AtomSpec<T> {
    /// Cesium D2 line with the atom at `position`.
    pub fn cesium_d2(position: [T; 3]) -> Self {
        Self {
            lambda_nm: T::lit(852.0),
            gamma: T::two_pi() * T::lit(5e6),
            detuning: T::zero(),
            position,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_nm > T::zero() && self.lambda_nm.is_finite()) {
            return Err(invalid("lambda_nm", "must be positive and finite"));
        }
        if !(self.gamma > T::zero() && self.gamma.is_finite()) {
            return Err(invalid("gamma", "must be positive and finite"));
        }
        if !self.detuning.is_finite() {
            return Err(invalid("detuning", "must be finite"));
        }
        if !self.position.iter().all(|x| x.is_finite()) {
            return Err(invalid("position", "must be finite"));
        }
        Ok(())
    }

    /// Seconds per natural time unit `λ/c`.
    fn time_unit(&self) -> T {
        self.lambda_nm * T::lit(1e-9 / SPEED_OF_LIGHT)
    }

    /// Γ in units of `c/λ`.
    pub fn gamma_natural(&self) -> T {
        self.gamma * self.time_unit()
    }

    /// δ in units of `c/λ`.
    pub fn detuning_natural(&self) -> T {
        self.detuning * self.time_unit()
    }

    /// Reduced dipole matrix element `d = sqrt(3πΓ/k³)`.
    pub fn dipole(&self) -> T {
        let k = T::two_pi();
        (T::lit(3.0) * T::PI() * self.gamma_natural() / (k * k * k)).sqrt()
    }
}

/// Steady-state expectation values in the frame rotating at the laser
/// frequency. Components are ordered `(+1, 0, -1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomState<T> {
    /// `σ_eg^i = ⟨σ_i⁻⟩`.
    pub sigma_eg: [Complex<T>; 3],
    /// `σ_ee^{ij} = ⟨σ_i⁺ σ_j⁻⟩`.
    pub sigma_ee: [[Complex<T>; 3]; 3],
}

impl<T: Real> AtomState<T> {
    pub fn ground() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self {
            sigma_eg: [z; 3],
            sigma_ee: [[z; 3]; 3],
        }
    }

    /// Total excited-state population.
    pub fn excited_population(&self) -> T {
        (0..3).map(|i| self.sigma_ee[i][i].re).fold(T::zero(), |a, b| a + b)
    }

    /// Largest `|σ_ee^{ij} - conj(σ_ee^{ji})|`.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.sigma_ee[i][j] - self.sigma_ee[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part of `σ_ee`.
    pub fn min_eigenvalue(&self) -> T {
        min_eigenvalue_hermitian3(&self.sigma_ee)
    }

    /// Largest `|σ_ee^{ij} - conj(σ_eg^i) σ_eg^j|`, which vanishes as the
    /// drive goes to zero.
    pub fn factorization_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                let product = self.sigma_eg[i].conj() * self.sigma_eg[j];
                worst = worst.max((self.sigma_ee[i][j] - product).norm());
            }
        }
        worst
    }

    pub fn max_difference(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for i in 0..3 {
            worst = worst.max((self.sigma_eg[i] - other.sigma_eg[i]).norm());
            for j in 0..3 {
                worst = worst.max((self.sigma_ee[i][j] - other.sigma_ee[i][j]).norm());
            }
        }
        worst
    }
}

/// Rabi frequencies `Ω_i = 2d (û_i* · E)` for the local positive-frequency
/// field `E`, which already includes the drive amplitude.
pub fn rabi_vector<T: Real>(atom: &AtomSpec<T>, field: &ComplexVec3<T>) -> [Complex<T>; 3] {
    let two_d = T::lit(2.0) * atom.dipole();
    Spherical::ALL.map(|i| field.circular_component(i) * two_d)
}

/// Closed-form steady state. Only the bright superposition
/// `Σ (Ω_i/Ω)|e_i⟩` is driven, which reduces the problem to a two-level atom
/// with Rabi frequency `Ω = sqrt(Σ|Ω_i|²)`.
pub fn steady_state<T: Real>(omega: &[Complex<T>; 3], delta: T, gamma: T) -> Result<AtomState<T>> {
    if !(gamma > T::zero()) {
        return Err(invalid("gamma", "must be positive"));
    }
    let big_omega = omega.iter().map(|o| o.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
    if big_omega == T::zero() {
        return Ok(AtomState::ground());
    }
    let quarter = T::lit(0.25);
    let half = T::lit(0.5);
    let rho_bb = quarter * big_omega * big_omega
        / (delta * delta + quarter * gamma * gamma + half * big_omega * big_omega);
    let coherence = Complex::new(T::zero(), half * big_omega * (T::one() - T::lit(2.0) * rho_bb))
        / Complex::new(half * gamma, -delta);
    let c = omega.map(|o| o / big_omega);
    let mut state = AtomState::ground();
    for i in 0..3 {
        state.sigma_eg[i] = c[i] * coherence;
        for j in 0..3 {
            state.sigma_ee[i][j] = c[i].conj() * c[j] * rho_bb;
        }
    }
    Ok(state)
}

type Matrix4<T> = [[Complex<T>; 4]; 4];

/// Time-independent Lindblad generator for the four levels `g, e₊, e₀, e₋`.
fn lindblad<T: Real>(rho: &Matrix4<T>, h: &Matrix4<T>, gamma: T) -> Matrix4<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    let mut out = [[zero; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut comm = zero;
            for c in 0..4 {
                comm += h[a][c] * rho[c][b] - rho[a][c] * h[c][b];
            }
            out[a][b] = -i * comm;
        }
    }
    let half = T::lit(0.5);
    for e in 1..4 {
        // L = sqrt(Γ)|g⟩⟨e|
        out[0][0] += rho[e][e] * gamma;
        for b in 0..4 {
            out[e][b] -= rho[e][b] * (half * gamma);
            out[b][e] -= rho[b][e] * (half * gamma);
        }
    }
    out
}

/// Brute-force steady state: classical RK4 integration of the density
/// matrix from the ground state up to `t_end`.
pub fn steady_state_oracle<T: Real>(
    omega: &[Complex<T>; 3],
    delta: T,
    gamma: T,
    t_end: T,
) -> Result<AtomState<T>> {
    if !(gamma > T::zero()) {
        return Err(invalid("gamma", "must be positive"));
    }
    if !(t_end >= T::lit(10.0) / gamma) {
        return Err(invalid("t_end", "must be at least 10/gamma"));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let mut h = [[zero; 4]; 4];
    for i in 0..3 {
        h[i + 1][i + 1] = Complex::new(-delta, T::zero());
        h[i + 1][0] = -omega[i] * T::lit(0.5);
        h[0][i + 1] = h[i + 1][0].conj();
    }
    let rate = omega.iter().map(|o| o.norm()).fold(gamma + delta.abs(), |a, b| a + b);
    let steps = (t_end * rate / T::lit(0.02)).ceil().to_f64_lossy().max(100.0) as usize;
    let dt = t_end / T::from_usize_lossy(steps);
    let half_dt = dt * T::lit(0.5);

    let axpy = |base: &Matrix4<T>, k: &Matrix4<T>, s: T| {
        let mut out = *base;
        for a in 0..4 {
            for b in 0..4 {
                out[a][b] += k[a][b] * s;
            }
        }
        out
    };
    let mut rho = [[zero; 4]; 4];
    rho[0][0] = Complex::new(T::one(), T::zero());
    let sixth = T::one() / T::lit(6.0);
    for step in 0..steps {
        let k1 = lindblad(&rho, &h, gamma);
        let k2 = lindblad(&axpy(&rho, &k1, half_dt), &h, gamma);
        let k3 = lindblad(&axpy(&rho, &k2, half_dt), &h, gamma);
        let k4 = lindblad(&axpy(&rho, &k3, dt), &h, gamma);
        for a in 0..4 {
            for b in 0..4 {
                rho[a][b] += (k1[a][b] + (k2[a][b] + k3[a][b]) * T::lit(2.0) + k4[a][b]) * (dt * sixth);
            }
        }
        let trace = (0..4).fold(zero, |s, a| s + rho[a][a]);
        let drift = (trace - Complex::new(T::one(), T::zero())).norm();
        if !(drift <= T::lit(1e-8)) {
            return Err(Error::Integration {
                drift: drift.to_f64_lossy(),
                t: (dt * T::from_usize_lossy(step + 1)).to_f64_lossy(),
            });
        }
    }
    let mut state = AtomState::ground();
    for i in 0..3 {
        // ⟨|g⟩⟨e_i|⟩ = ρ_{e_i g}
        state.sigma_eg[i] = rho[i + 1][0];
        for j in 0..3 {
            // ⟨|e_i⟩⟨e_j|⟩ = ρ_{e_j e_i}
            state.sigma_ee[i][j] = rho[j + 1][i + 1];
        }
    }
    Ok(state)
}

/// Far field radiated by the dipole `d·û_i` at `r_rel` from the atom:
/// `(k²/4π) d [û_i - (û_i·r̂) r̂] e^{ikr}/r`.
pub fn dipole_far_field<T: Real>(
    atom: &AtomSpec<T>,
    i: Spherical,
    r_rel: [T; 3],
) -> Result<ComplexVec3<T>> {
    let r = (r_rel[0] * r_rel[0] + r_rel[1] * r_rel[1] + r_rel[2] * r_rel[2]).sqrt();
    if !(r >= T::lit(FAR_FIELD_FLOOR)) {
        return Err(Error::NearField {
            r: r_rel.map(|x| x.to_f64_lossy()),
            floor: FAR_FIELD_FLOOR,
        });
    }
    let k = T::two_pi();
    let n = ComplexVec3::from_real(r_rel.map(|x| x / r));
    let u = ComplexVec3::unit_circular(i);
    let transverse = u - n.scale(u.dot(&n));
    let prefactor = Complex::from_polar(k * k / (T::lit(4.0) * T::PI()) * atom.dipole() / r, k * r);
    Ok(transverse.scale(prefactor))
}

/// Resonant cross section and two-level saturation intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiativeConstants<T> {
    /// `3λ²/2π` in λ² units.
    pub cross_section: T,
    pub cross_section_m2: T,
    /// `ħω_a Γ / 2σ` in natural units.
    pub saturation_intensity: T,
    pub saturation_intensity_w_m2: T,
}

pub fn radiative_constants<T: Real>(atom: &AtomSpec<T>) -> RadiativeConstants<T> {
    let sigma = T::lit(3.0) / T::two_pi();
    let lambda_m = atom.lambda_nm * T::lit(1e-9);
    let sigma_m2 = sigma * lambda_m * lambda_m;
    let omega_a = T::two_pi() * T::lit(SPEED_OF_LIGHT) / lambda_m;
    RadiativeConstants {
        cross_section: sigma,
        cross_section_m2: sigma_m2,
        saturation_intensity: T::two_pi() * atom.gamma_natural() / (T::lit(2.0) * sigma),
        saturation_intensity_w_m2: T::lit(HBAR) * omega_a * atom.gamma / (T::lit(2.0) * sigma_m2),
    }
}

/// Smallest eigenvalue of the Hermitian part of a 3×3 complex matrix, by
/// cyclic Jacobi rotations on its 6×6 real symmetric embedding.
fn min_eigenvalue_hermitian3<T: Real>(m: &[[Complex<T>; 3]; 3]) -> T {
    let half = T::lit(0.5);
    let mut a = [[T::zero(); 6]; 6];
    for i in 0..3 {
        for j in 0..3 {
            let h = (m[i][j] + m[j][i].conj()) * half;
            a[i][j] = h.re;
            a[i + 3][j + 3] = h.re;
            a[i + 3][j] = h.im;
            a[i][j + 3] = -h.im;
        }
    }
    for _sweep in 0..50 {
        let off: T = (0..6)
            .flat_map(|p| (0..6).filter(move |&q| q != p).map(move |q| (p, q)))
            .fold(T::zero(), |s, (p, q)| s + a[p][q] * a[p][q]);
        if off <= T::min_positive_value() {
            break;
        }
        for p in 0..5 {
            for q in p + 1..6 {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = (t * t + T::one()).sqrt().recip();
                let s = t * c;
                for k in 0..6 {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..6 {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..6).fold(T::infinity(), |lo, i| lo.min(a[i][i]))
}
