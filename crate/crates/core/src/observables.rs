//! Intensities and zero-delay photon correlations seen by a detector around
//! the driven atom.
//!
//! With `a = αF(r)` the coherent laser amplitude and `Ψ_i` the dipole field of
//! sublevel `i`, the detected positive-frequency field operator is
//! `a + Σ_i Ψ_i σ_i⁻`. Normal-ordered moments follow from the steady state,
//! using `σ_i⁻σ_j⁻ = 0`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atom::{dipole_far_field, rabi_vector, steady_state, AtomSpec, AtomState};
use crate::error::{invalid, Error, Result};
use crate::focusing::{find_focus, FocusedBeam, SpotMetrics};
use crate::modes::Cylindrical;
use crate::numerics::{golden_max, ComplexVec3, Spherical};
use crate::real::Real;

/// Drives with `Ω/Γ` at or below this count as weak.
pub const WEAK_DRIVE: f64 = 0.05;

/// Beam, atom at the focus, drive amplitude and the resulting steady state.
#[derive(Debug, Clone)]
pub struct Scene<T> {
    beam: FocusedBeam<T>,
    atom: AtomSpec<T>,
    spot: SpotMetrics,
    alpha: Complex<T>,
    state: AtomState<T>,
}

impl<T: Real> Scene<T> {
    /// Places the atom at the on-axis intensity maximum and picks a real drive
    /// amplitude with `Ω = omega_over_gamma · Γ` there.
    pub fn at_focus(beam: FocusedBeam<T>, atom: AtomSpec<T>, omega_over_gamma: T) -> Result<Self> {
        atom.validate()?;
        if !(omega_over_gamma >= T::zero() && omega_over_gamma.is_finite()) {
            return Err(invalid("omega_over_gamma", "must be non-negative and finite"));
        }
        let spot = find_focus(&beam, None)?;
        let z = T::lit(spot.z_focus);
        let atom = AtomSpec {
            position: [T::zero(), T::zero(), z],
            ..atom
        };
        let local = beam.field(&Cylindrical::on_axis(z))?;
        let unit_rabi = rabi_vector(&atom, &local)
            .iter()
            .map(|o| o.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        if unit_rabi == T::zero() {
            return Err(Error::Undefined("drive amplitude for a dark focus"));
        }
        let alpha = Complex::new(omega_over_gamma * atom.gamma_natural() / unit_rabi, T::zero());
        Self::with_alpha(beam, atom, spot, alpha)
    }

    /// Atom at `atom.position` driven with the given amplitude.
    pub fn with_alpha(beam: FocusedBeam<T>, atom: AtomSpec<T>, spot: SpotMetrics, alpha: Complex<T>) -> Result<Self> {
        atom.validate()?;
        let p = atom.position;
        let local = beam.field_cartesian(p)?.scale(alpha);
        let omega = rabi_vector(&atom, &local);
        let state = steady_state(&omega, atom.detuning_natural(), atom.gamma_natural())?;
        Ok(Self {
            beam,
            atom,
            spot,
            alpha,
            state,
        })
    }

    /// Same scene with the atom removed (left in its ground state).
    pub fn without_atom(&self) -> Self {
        Self {
            state: AtomState::ground(),
            ..self.clone()
        }
    }

    pub fn beam(&self) -> &FocusedBeam<T> {
        &self.beam
    }

    pub fn atom(&self) -> &AtomSpec<T> {
        &self.atom
    }

    pub fn spot(&self) -> &SpotMetrics {
        &self.spot
    }

    pub fn alpha(&self) -> Complex<T> {
        self.alpha
    }

    pub fn state(&self) -> &AtomState<T> {
        &self.state
    }

    pub fn set_state(&mut self, state: AtomState<T>) {
        self.state = state;
    }

    /// `Ω/Γ` at the atom.
    pub fn drive_strength(&self) -> Result<T> {
        let local = self.beam.field_cartesian(self.atom.position)?.scale(self.alpha);
        let o = rabi_vector(&self.atom, &local)
            .iter()
            .map(|o| o.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        Ok(o / self.atom.gamma_natural())
    }

    /// Laser amplitude and dipole fields at `r_rel` from the atom.
    fn fields(&self, r_rel: [T; 3]) -> Result<(ComplexVec3<T>, [ComplexVec3<T>; 3])> {
        let p = self.atom.position;
        let r = [p[0] + r_rel[0], p[1] + r_rel[1], p[2] + r_rel[2]];
        let a = self.beam.field_cartesian(r)?.scale(self.alpha);
        let psi = [
            dipole_far_field(&self.atom, Spherical::Plus, r_rel)?,
            dipole_far_field(&self.atom, Spherical::Zero, r_rel)?,
            dipole_far_field(&self.atom, Spherical::Minus, r_rel)?,
        ];
        Ok((a, psi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intensities<T> {
    pub laser: T,
    pub dipole: T,
    pub interference: T,
    pub total: T,
}

/// Correlation data at one detector point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection<T> {
    pub intensities: Intensities<T>,
    /// Normal-ordered `G²(0)`.
    pub g2_numerator: T,
}

impl<T: Real> Detection<T> {
    pub fn g2(&self) -> Result<T> {
        let i = self.intensities.total;
        if !(i > T::zero()) {
            return Err(Error::Undefined("g2 with vanishing intensity"));
        }
        Ok(self.g2_numerator / (i * i))
    }
}

fn detect<T: Real>(a: &ComplexVec3<T>, psi: &[ComplexVec3<T>; 3], state: &AtomState<T>) -> Detection<T> {
    let two = T::lit(2.0);
    let zero = Complex::new(T::zero(), T::zero());
    let laser = a.norm_sqr();
    let mut dipole = zero;
    let mut cross = zero;
    let mut coherent = zero;
    for i in 0..3 {
        coherent += a.cdot(&psi[i]) * state.sigma_eg[i];
        for j in 0..3 {
            let s = state.sigma_ee[i][j];
            dipole += psi[i].cdot(&psi[j]) * s;
            // (a·Ψ_i*)(a*·Ψ_j)
            cross += psi[i].cdot(a) * a.cdot(&psi[j]) * s;
        }
    }
    let interference = two * coherent.re;
    let total = laser + dipole.re + interference;
    let g2_numerator = laser * laser
        + two * laser * dipole.re
        + T::lit(4.0) * laser * coherent.re
        + two * cross.re;
    Detection {
        intensities: Intensities {
            laser,
            dipole: dipole.re,
            interference,
            total,
        },
        g2_numerator,
    }
}

/// Intensity split at `r_rel` from the atom.
pub fn intensities<T: Real>(scene: &Scene<T>, r_rel: [T; 3]) -> Result<Intensities<T>> {
    Ok(detection(scene, r_rel)?.intensities)
}

/// Zero-delay second-order correlation `G²/I²` at `r_rel` from the atom.
pub fn g2_zero_delay<T: Real>(scene: &Scene<T>, r_rel: [T; 3]) -> Result<T> {
    detection(scene, r_rel)?.g2()
}

pub fn detection<T: Real>(scene: &Scene<T>, r_rel: [T; 3]) -> Result<Detection<T>> {
    let (a, psi) = scene.fields(r_rel)?;
    Ok(detect(&a, &psi, &scene.state))
}

/// Detection with the laser field blocked at the detector: fluorescence only.
pub fn fluorescence_detection<T: Real>(scene: &Scene<T>, r_rel: [T; 3]) -> Result<Detection<T>> {
    let (_, psi) = scene.fields(r_rel)?;
    Ok(detect(&ComplexVec3::zero(), &psi, &scene.state))
}

/// Detector at polar angle `phi` from the beam axis on a sphere of radius
/// `radius` around the atom, in the x–z plane.
pub fn detector_position<T: Real>(radius: T, phi: T) -> [T; 3] {
    let (s, c) = phi.sin_cos();
    [radius * s, T::zero(), radius * c]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Detector distance from the atom in wavelengths.
    pub radius: f64,
    pub phi_min: f64,
    pub phi_max: f64,
    pub count: usize,
    pub omega_over_gamma: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            radius: 50.0,
            phi_min: 0.0,
            phi_max: std::f64::consts::FRAC_PI_2,
            count: 200,
            omega_over_gamma: 0.01,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius >= crate::atom::FAR_FIELD_FLOOR) {
            return Err(invalid("radius", format!("{} is inside the far-field floor", self.radius)));
        }
        if self.count < 2 {
            return Err(invalid("phi_steps", "need at least two angles"));
        }
        if !(self.phi_min.is_finite() && self.phi_max.is_finite() && self.phi_min < self.phi_max) {
            return Err(invalid("phi_max", "angle range must be increasing and finite"));
        }
        if !(self.omega_over_gamma >= 0.0 && self.omega_over_gamma.is_finite()) {
            return Err(invalid("omega_over_gamma", "must be non-negative and finite"));
        }
        Ok(())
    }

    pub fn is_weak(&self) -> bool {
        self.omega_over_gamma <= WEAK_DRIVE
    }

    pub fn angles(&self) -> Vec<f64> {
        let n = self.count - 1;
        (0..self.count)
            .map(|i| {
                if i == n {
                    self.phi_max
                } else {
                    self.phi_min + (self.phi_max - self.phi_min) * i as f64 / n as f64
                }
            })
            .collect()
    }
}

/// One detector angle; intensities relative to `I_d(φ=0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub phi: f64,
    pub i_laser: f64,
    pub i_dipole: f64,
    pub i_interference: f64,
    pub i_total: f64,
    pub g2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    /// First angle where the laser and dipole intensities cross.
    pub crossover_phi: Option<f64>,
    pub max_g2_phi: f64,
    pub max_g2: f64,
    /// Interference term at the g² maximum, relative to `I_d(φ=0)`.
    pub interference_at_max_g2: f64,
    pub g2_forward: f64,
    /// `I_L/I_d` at `φ = 0`.
    pub forward_ratio: f64,
    /// `I_d(φ=0)` in natural units; the scale of every row.
    pub dipole_forward: f64,
    pub drive_strength: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
    pub summary: ScanSummary,
}

fn detection_at(scene: &Scene<f64>, radius: f64, phi: f64) -> Result<Detection<f64>> {
    detection(scene, detector_position(radius, phi))
        .map_err(|e| e.with_context(format!("detector at phi={phi} rad, R={radius}")))
}

/// Scan of the detector over polar angles at fixed distance from the atom.
pub fn angular_scan(scene: &Scene<f64>, config: &ScanConfig) -> Result<ScanResult> {
    config.validate()?;
    let r = config.radius;
    let forward = detection_at(scene, r, 0.0)?;
    let norm = forward.intensities.dipole;
    if !(norm > 0.0) {
        return Err(Error::Undefined("normalization by a vanishing forward dipole intensity"));
    }
    let angles = config.angles();
    let detections: Vec<Result<Detection<f64>>> =
        angles.par_iter().map(|&phi| detection_at(scene, r, phi)).collect();
    let mut rows = Vec::with_capacity(angles.len());
    for (phi, d) in angles.iter().zip(detections) {
        let d = d?;
        let i = d.intensities;
        rows.push(ScanRow {
            phi: *phi,
            i_laser: i.laser / norm,
            i_dipole: i.dipole / norm,
            i_interference: i.interference / norm,
            i_total: i.total / norm,
            g2: d.g2()?,
        });
    }

    let crossover_phi = match rows
        .windows(2)
        .find(|w| (w[0].i_laser - w[0].i_dipole) * (w[1].i_laser - w[1].i_dipole) <= 0.0)
    {
        Some(w) => Some(crossover(scene, r, w[0].phi, w[1].phi)?),
        None => None,
    };

    let (k, _) = rows
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, row)| if row.g2 > best.1 { (i, row.g2) } else { best });
    let (mut max_g2_phi, mut max_g2) = (rows[k].phi, rows[k].g2);
    if k > 0 && k + 1 < rows.len() {
        let refined = golden_max(
            |phi| detection_at(scene, r, phi)?.g2(),
            rows[k - 1].phi,
            rows[k + 1].phi,
            1e-6,
        )?;
        if refined.value > max_g2 {
            max_g2_phi = refined.x;
            max_g2 = refined.value;
        }
    }
    let at_max = detection_at(scene, r, max_g2_phi)?;

    Ok(ScanResult {
        rows,
        summary: ScanSummary {
            crossover_phi,
            max_g2_phi,
            max_g2,
            interference_at_max_g2: at_max.intensities.interference / norm,
            g2_forward: forward.g2()?,
            forward_ratio: forward.intensities.laser / norm,
            dipole_forward: norm,
            drive_strength: scene.drive_strength()?,
        },
    })
}

/// Bisection for `I_L = I_d` between two bracketing angles, to 1e-4 rad.
fn crossover(scene: &Scene<f64>, r: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let diff = |phi: f64| -> Result<f64> {
        let i = detection_at(scene, r, phi)?.intensities;
        Ok(i.laser - i.dipole)
    };
    let mut f_lo = diff(lo)?;
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        let f_mid = diff(mid)?;
        if f_lo * f_mid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Cell grid for intensity maps: transverse `x` and axial `Z = z - z₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub z_min: f64,
    pub z_max: f64,
    pub nz: usize,
}

impl Default for MapGrid {
    fn default() -> Self {
        Self {
            x_min: -5.0,
            x_max: 5.0,
            nx: 41,
            z_min: -30.0,
            z_max: 10.0,
            nz: 81,
        }
    }
}

impl MapGrid {
    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.nz < 2 {
            return Err(invalid("map_nx", "map needs at least two cells per axis"));
        }
        if !(self.x_min < self.x_max) {
            return Err(invalid("map_x_max", "x range must be increasing"));
        }
        if !(self.z_min < self.z_max) {
            return Err(invalid("map_z_max", "Z range must be increasing"));
        }
        Ok(())
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_min, self.x_max, self.nx)
    }

    pub fn zs(&self) -> Vec<f64> {
        Self::axis(self.z_min, self.z_max, self.nz)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapCell {
    pub x: f64,
    /// Axial offset from the geometric waist, `z - z₀`.
    pub z_rel: f64,
    /// `|F·ε₊|²` relative to its maximum on the grid.
    pub plus: f64,
    /// `|F|²` relative to the same maximum.
    pub total: f64,
}

/// Intensity of the focused beam on an `x`–`z` grid, cells in row-major
/// order over `Z` then `x`.
pub fn focal_map(beam: &FocusedBeam<f64>, grid: &MapGrid) -> Result<Vec<MapCell>> {
    grid.validate()?;
    let z0 = beam.params().z_0;
    let points: Vec<(f64, f64)> = grid
        .zs()
        .into_iter()
        .flat_map(|z| grid.xs().into_iter().map(move |x| (x, z)))
        .collect();
    if let Some(&(_, z)) = points.iter().find(|&&(_, z)| z + z0 < 0.0) {
        return Err(invalid("map_z_min", format!("Z={z} lies in front of the lens")));
    }
    let fields: Vec<Result<ComplexVec3<f64>>> = points
        .par_iter()
        .map(|&(x, z)| beam.field_cartesian([x, 0.0, z + z0]))
        .collect();
    let mut raw = Vec::with_capacity(points.len());
    for (&(x, z), f) in points.iter().zip(fields) {
        let f = f?;
        raw.push((x, z, f.c_plus.norm_sqr(), f.norm_sqr()));
    }
    let peak = raw.iter().fold(0.0_f64, |m, c| m.max(c.2));
    if !(peak > 0.0) {
        return Err(Error::Undefined("map normalization by a dark grid"));
    }
    Ok(raw
        .into_iter()
        .map(|(x, z_rel, p, t)| MapCell {
            x,
            z_rel,
            plus: p / peak,
            total: t / peak,
        })
        .collect())
}
