//! Scattering ratio of a focused beam and its optimization over the lens and
//! input-beam parameters.

use serde::{Deserialize, Serialize};

use crate::atom::AtomSpec;
use crate::error::{invalid, Error, Result};
use crate::focusing::{find_focus, BeamModel, BeamSpec, FocusedBeam, SpotMetrics};
use crate::modes::Cylindrical;
use crate::numerics::{golden_max, ComplexVec3};
use crate::observables::{detection, detector_position, Scene};

/// Resonant cross section `3λ²/2π` in λ² units.
pub const CROSS_SECTION: f64 = 3.0 / std::f64::consts::TAU;

/// Which dipole orientation the numerator of the scattering ratio projects on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DipolePolicy {
    /// Along the local polarization of the field at the atom.
    #[default]
    Aligned,
    /// Fixed to `ε₊`.
    ComponentPlus,
}

impl DipolePolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            DipolePolicy::Aligned => "aligned",
            DipolePolicy::ComponentPlus => "component_plus",
        }
    }
}

impl std::str::FromStr for DipolePolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aligned" => Ok(DipolePolicy::Aligned),
            "component_plus" => Ok(DipolePolicy::ComponentPlus),
            other => Err(invalid("policy", format!("`{other}` is neither aligned nor component_plus"))),
        }
    }
}

/// `σ |û·E|² / P` for a field `E` at the atom and plane power `P`.
pub fn scattering_ratio_from(field: &ComplexVec3<f64>, plane_power: f64, policy: DipolePolicy) -> Result<f64> {
    if !(plane_power > 0.0) {
        return Err(Error::Undefined("scattering ratio with zero beam power"));
    }
    let projected = match policy {
        DipolePolicy::Aligned => field.norm_sqr(),
        DipolePolicy::ComponentPlus => field.c_plus.norm_sqr(),
    };
    Ok(CROSS_SECTION * projected / plane_power)
}

/// Scattering ratio with the atom at the on-axis intensity maximum.
pub fn scattering_ratio(beam: &FocusedBeam<f64>, spot: &SpotMetrics, policy: DipolePolicy) -> Result<f64> {
    let field = beam.field(&Cylindrical::on_axis(spot.z_focus))?;
    // the normalized field carries unit power through every plane
    scattering_ratio_from(&field, 1.0, policy)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub f: f64,
    pub z_in: f64,
    pub model: BeamModel,
    pub policy: DipolePolicy,
    pub z_r: f64,
    pub z_0: f64,
    pub z_focus: f64,
    pub r_s: f64,
    /// `I_L/I_d` in the forward direction, when computed.
    pub forward_ratio: Option<f64>,
    pub spot: SpotMetrics,
}

/// Detector distance used for forward ratios.
pub const FORWARD_RADIUS: f64 = 50.0;

/// `I_L/I_d` at `φ = 0` for the atom at the focus of `scene`.
pub fn forward_ratio(scene: &Scene<f64>) -> Result<f64> {
    let d = detection(scene, detector_position(FORWARD_RADIUS, 0.0))?;
    if !(d.intensities.dipole > 0.0) {
        return Err(Error::Undefined("forward ratio without scattered light"));
    }
    Ok(d.intensities.laser / d.intensities.dipole)
}

/// Scattering ratio, focus and optionally the forward ratio for one beam.
pub fn coupling_report(
    spec: BeamSpec<f64>,
    policy: DipolePolicy,
    atom: Option<(&AtomSpec<f64>, f64)>,
) -> Result<CouplingReport> {
    let beam = FocusedBeam::new(spec)?;
    let params = *beam.params();
    let (spot, forward) = match atom {
        Some((atom, drive)) => {
            let scene = Scene::at_focus(beam.clone(), *atom, drive)?;
            (*scene.spot(), Some(forward_ratio(&scene)?))
        }
        None => (find_focus(&beam, None)?, None),
    };
    let r_s = scattering_ratio(&beam, &spot, policy)?;
    Ok(CouplingReport {
        f: spec.f,
        z_in: spec.z_in,
        model: spec.model,
        policy,
        z_r: params.z_r,
        z_0: params.z_0,
        z_focus: spot.z_focus,
        r_s,
        forward_ratio: forward,
        spot,
    })
}

fn r_s_only(f: f64, z_in: f64, model: BeamModel, policy: DipolePolicy) -> Result<f64> {
    let spec = BeamSpec::new(f, z_in, model)?;
    let beam = FocusedBeam::new(spec)?;
    let spot = find_focus(&beam, None)?;
    scattering_ratio(&beam, &spot, policy)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub report: CouplingReport,
    /// The maximum sits on an edge of the search box.
    pub at_boundary: bool,
}

/// Maximizes `R_s` over `z_in ∈ [lo, hi]` at fixed focal length by golden
/// section in `ln z_in`, to relative tolerance `tol`.
pub fn optimize_zin(
    f: f64,
    bounds: (f64, f64),
    tol: f64,
    model: BeamModel,
    policy: DipolePolicy,
) -> Result<Optimum> {
    let (lo, hi) = bounds;
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(invalid("z_in_bounds", format!("[{lo}, {hi}] is not a positive interval")));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    let best = golden_max(|ln_z| r_s_only(f, ln_z.exp(), model, policy), lo.ln(), hi.ln(), tol)?;
    let report = coupling_report(BeamSpec::new(f, best.x.exp(), model)?, policy, None)?;
    Ok(Optimum {
        report,
        at_boundary: best.at_boundary,
    })
}

/// Search box for the joint optimization: focal length in wavelengths and
/// the ratio `z_in/f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointBounds {
    pub f: (f64, f64),
    pub z_in_over_f: (f64, f64),
}

impl Default for JointBounds {
    fn default() -> Self {
        Self {
            f: (1.5, 500.0),
            z_in_over_f: (0.25, 1000.0),
        }
    }
}

/// Maximizes `R_s` over `(f, z_in)`: the best point of an 8×8 logarithmic
/// grid seeds alternating golden-section sweeps along each coordinate.
pub fn optimize_joint(bounds: JointBounds, tol: f64, model: BeamModel, policy: DipolePolicy) -> Result<Optimum> {
    const GRID: usize = 8;
    let (lf, hf) = (bounds.f.0.ln(), bounds.f.1.ln());
    let (lz, hz) = (bounds.z_in_over_f.0.ln(), bounds.z_in_over_f.1.ln());
    if !(lf < hf && lz < hz) || !(bounds.f.0 > 0.0 && bounds.z_in_over_f.0 > 0.0) {
        return Err(invalid("joint_bounds", "bounds must be positive increasing intervals"));
    }
    let node = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (GRID - 1) as f64;
    let eval = |ln_f: f64, ln_q: f64| r_s_only(ln_f.exp(), (ln_f + ln_q).exp(), model, policy);

    let mut best = (lf, lz, f64::NEG_INFINITY);
    for i in 0..GRID {
        for j in 0..GRID {
            let (x, y) = (node(lf, hf, i), node(lz, hz, j));
            let v = eval(x, y)?;
            if v > best.2 {
                best = (x, y, v);
            }
        }
    }
    let (mut x, mut y, mut v) = best;
    let mut edge = false;
    for _ in 0..6 {
        let before = v;
        let along_f = golden_max(|t| eval(t, y), lf, hf, tol)?;
        if along_f.value >= v {
            x = along_f.x;
            v = along_f.value;
        }
        let along_z = golden_max(|t| eval(x, t), lz, hz, tol)?;
        if along_z.value >= v {
            y = along_z.x;
            v = along_z.value;
        }
        edge = along_f.at_boundary || along_z.at_boundary;
        if (v - before).abs() <= tol * v.abs() {
            break;
        }
    }
    let report = coupling_report(BeamSpec::new(x.exp(), (x + y).exp(), model)?, policy, None)?;
    Ok(Optimum {
        report,
        at_boundary: edge,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    #[test]
    fn paraxial_closed_form() {
        for (f, z_in) in [(500.0, 6e4), (50.0, 300.0), (10.0, 10.0)] {
            let spec = BeamSpec::paraxial(f, z_in).unwrap();
            let rep = coupling_report(spec, DipolePolicy::Aligned, None).unwrap();
            let w2 = rep.z_r / std::f64::consts::PI;
            let want = 2.0 * CROSS_SECTION / (std::f64::consts::PI * w2);
            assert!((rep.r_s - want).abs() <= 1e-9 * want, "{} vs {want}", rep.r_s);
        }
        let rep = coupling_report(BeamSpec::paraxial(500.0, 6e4).unwrap(), DipolePolicy::Aligned, None).unwrap();
        assert!((rep.r_s - 0.229).abs() < 2e-3);
    }

    #[test]
    fn invariant_under_amplitude_rescaling() {
        let beam = FocusedBeam::new(BeamSpec::exact(2.0, 4.0).unwrap()).unwrap();
        let e = beam.field(&Cylindrical::new(0.2, 0.3, 1.2)).unwrap();
        let p = 1.0;
        let alpha = Complex::new(5.0, 0.0);
        for policy in [DipolePolicy::Aligned, DipolePolicy::ComponentPlus] {
            let a = scattering_ratio_from(&e, p, policy).unwrap();
            let b = scattering_ratio_from(&e.scale(alpha), p * alpha.norm_sqr(), policy).unwrap();
            assert!((a - b).abs() <= 1e-12 * a);
        }
    }

    #[test]
    fn aligned_dominates_component_plus() {
        let beam = FocusedBeam::new(BeamSpec::exact(2.0, 4.0).unwrap()).unwrap();
        let off_axis = beam.field(&Cylindrical::new(0.4, 0.3, 1.2)).unwrap();
        let a = scattering_ratio_from(&off_axis, 1.0, DipolePolicy::Aligned).unwrap();
        let b = scattering_ratio_from(&off_axis, 1.0, DipolePolicy::ComponentPlus).unwrap();
        assert!(a > b);
        let spot = find_focus(&beam, None).unwrap();
        let a = scattering_ratio(&beam, &spot, DipolePolicy::Aligned).unwrap();
        let b = scattering_ratio(&beam, &spot, DipolePolicy::ComponentPlus).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn golden_section_agrees_with_refined_grid() {
        let (f, lo, hi) = (20.0, 5.0, 2000.0);
        let opt = optimize_zin(f, (lo, hi), 1e-4, BeamModel::Exact, DipolePolicy::Aligned).unwrap();
        assert!(!opt.at_boundary);
        let n = 25;
        let grid: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let t = lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64;
                (t, r_s_only(f, t.exp(), BeamModel::Exact, DipolePolicy::Aligned).unwrap())
            })
            .collect();
        let k = (1..n - 1).max_by(|&a, &b| grid[a].1.total_cmp(&grid[b].1)).unwrap();
        let ((x0, y0), (x1, y1), (x2, y2)) = (grid[k - 1], grid[k], grid[k + 1]);
        let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
        let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
        let vertex = x1 - 0.5 * num / den;
        let step = (hi.ln() - lo.ln()) / (n - 1) as f64;
        assert!((opt.report.z_in.ln() - vertex).abs() <= 0.1 * step, "{} vs {}", opt.report.z_in.ln(), vertex);
        assert!(opt.report.r_s >= y1);
    }

    #[test]
    fn boundary_optimum_is_flagged() {
        // R_s grows with z_in up to z_in ~ f for the paraxial beam; cap below it
        let opt = optimize_zin(100.0, (1.0, 10.0), 1e-3, BeamModel::Paraxial, DipolePolicy::Aligned).unwrap();
        assert!(opt.at_boundary);
    }

    #[test]
    fn forward_ratio_needs_scattered_light() {
        let beam = FocusedBeam::new(BeamSpec::exact(2.0, 4.0).unwrap()).unwrap();
        let scene = Scene::at_focus(beam, AtomSpec::cesium_d2([0.0; 3]), 0.01).unwrap();
        assert!(forward_ratio(&scene).unwrap() > 1.0);
        assert!(matches!(forward_ratio(&scene.without_atom()), Err(Error::Undefined(_))));
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("component_plus".parse::<DipolePolicy>().unwrap(), DipolePolicy::ComponentPlus);
        assert!("sideways".parse::<DipolePolicy>().is_err());
        assert!(optimize_zin(10.0, (5.0, 1.0), 1e-3, BeamModel::Exact, DipolePolicy::Aligned).is_err());
    }
}
