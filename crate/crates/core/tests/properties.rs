use num_complex::Complex;
use proptest::prelude::*;
use qaperture_core::atom::{steady_state, steady_state_oracle};
use qaperture_core::coupling::{scattering_ratio_from, DipolePolicy};
use qaperture_core::focusing::{find_focus, kappa, kappa_numeric};
use qaperture_core::modes::{mode_field, mode_field_oracle};
use qaperture_core::numerics::QuadratureSpec;
use qaperture_core::observables::{detection, detector_position, fluorescence_detection};
use qaperture_core::{AtomSpec, BeamSpec, Cylindrical, FocusedBeam, ModeIndex, Scene};

fn drive() -> impl Strategy<Value = [Complex<f64>; 3]> {
    prop::array::uniform3((-2.0..2.0f64, -2.0..2.0f64)).prop_map(|a| a.map(|(re, im)| Complex::new(re, im)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn modes_match_angular_spectrum(
        t in 0.02..1.0f64,
        m in -3..4i32,
        s in prop::sample::select(vec![1, -1]),
        rho in 0.0..4.0f64,
        phi in 0.0..std::f64::consts::TAU,
        z in -5.0..5.0f64,
    ) {
        let mu = ModeIndex::new(t, m, s).unwrap();
        let r = Cylindrical::new(rho, phi, z);
        let a = mode_field(&mu, &r).unwrap();
        let b = mode_field_oracle(&mu, &r, 256).unwrap();
        prop_assert!((a - b).norm() <= 1e-9 * a.norm().max(1e-3 / std::f64::consts::TAU));
    }

    #[test]
    fn steady_state_matches_master_equation(omega in drive(), delta in -2.0..2.0f64) {
        let exact = steady_state(&omega, delta, 1.0).unwrap();
        let oracle = steady_state_oracle(&omega, delta, 1.0, 40.0).unwrap();
        prop_assert!(exact.max_difference(&oracle) <= 1e-6);
        prop_assert!(exact.min_eigenvalue() >= -1e-12);
        prop_assert!(exact.excited_population() <= 0.5 + 1e-12);
    }

    #[test]
    fn scattering_ratio_ignores_drive_amplitude(re in -1e3..1e3f64, im in -1e3..1e3f64) {
        prop_assume!(re.hypot(im) > 1e-6);
        let beam = FocusedBeam::new(BeamSpec::exact(20.0, 40.0).unwrap()).unwrap();
        let field = beam.field(&Cylindrical::on_axis(19.0)).unwrap();
        let alpha = Complex::new(re, im);
        for policy in [DipolePolicy::Aligned, DipolePolicy::ComponentPlus] {
            let base = scattering_ratio_from(&field, 1.0, policy).unwrap();
            let scaled = scattering_ratio_from(&field.scale(alpha), alpha.norm_sqr(), policy).unwrap();
            prop_assert!((scaled - base).abs() <= 1e-12 * base);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kappa_matches_projection(f in 2.0..200.0f64, ratio in 0.5..20.0f64, t in 0.05..0.95f64) {
        let spec = BeamSpec::exact(f, f * ratio).unwrap();
        // far in the Gaussian tail the projection is pure cancellation noise
        prop_assume!(std::f64::consts::PI * t * t * spec.params().z_r < 10.0);
        let quad = QuadratureSpec::new(1e-10, 1e-13);
        for s in [1, -1] {
            let a = kappa(&spec, t, 1, s);
            let n = kappa_numeric(&spec, t, 1, s, &quad).unwrap();
            prop_assert!((n - a).norm() <= 1e-8 * a.norm(), "{n} vs {a}");
        }
    }

    #[test]
    fn detection_is_consistent(drive in 0.0..3.0f64, phi in 0.0..1.5707f64) {
        let beam = FocusedBeam::new(BeamSpec::exact(2.0, 4.0).unwrap()).unwrap();
        let scene = Scene::at_focus(beam, AtomSpec::cesium_d2([0.0; 3]), drive).unwrap();
        let r = detector_position(50.0, phi);
        let d = detection(&scene, r).unwrap();
        let i = d.intensities;
        prop_assert!((i.total - (i.laser + i.dipole + i.interference)).abs() <= 1e-12 * i.total.max(i.laser));
        prop_assert!(i.total >= 0.0);
        prop_assert!(d.g2_numerator >= -1e-12 * i.total * i.total);
        let laser = detection(&scene.without_atom(), r).unwrap();
        prop_assert_eq!(laser.g2_numerator, laser.intensities.total * laser.intensities.total);
        prop_assert_eq!(fluorescence_detection(&scene, r).unwrap().g2_numerator, 0.0);
    }

    #[test]
    fn tight_focus_sits_before_geometric_focus(f in 2.0..50.0f64, ratio in 1.0..10.0f64) {
        let beam = FocusedBeam::new(BeamSpec::exact(f, f * ratio).unwrap()).unwrap();
        let spot = find_focus(&beam, None).unwrap();
        prop_assert!(spot.z_focus < beam.params().z_0);
        prop_assert!(spot.area_halfmax > 0.0);
    }
}
