//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex-valued
//! integrands, with an initial partition dense enough to resolve a known
//! oscillation rate.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::vec3::ComplexVec3;
use crate::real::Real;

/// Values the integrator can accumulate: scalars, complex numbers and
/// complex field vectors.
pub trait QuadValue<T: Real>: Copy + Add<Output = Self> + Sub<Output = Self> {
    fn zero() -> Self;
    fn scale(self, w: T) -> Self;
    fn magnitude(&self) -> T;
    fn is_finite_value(&self) -> bool;
}

impl<T: Real> QuadValue<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn scale(self, w: T) -> Self {
        self * w
    }
    fn magnitude(&self) -> T {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl<T: Real> QuadValue<T> for Complex<T> {
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn scale(self, w: T) -> Self {
        self * w
    }
    fn magnitude(&self) -> T {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl<T: Real> QuadValue<T> for ComplexVec3<T> {
    fn zero() -> Self {
        ComplexVec3::zero()
    }
    fn scale(self, w: T) -> Self {
        self.scale_real(w)
    }
    fn magnitude(&self) -> T {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Nodes per Kronrod panel.
pub const NODES_PER_PANEL: usize = 15;

/// Hard cap on the number of live panels, independent of `max_depth`.
const MAX_PANELS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections applied to any initial panel.
    pub max_depth: u32,
    pub min_nodes_per_oscillation: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_depth: 30,
            min_nodes_per_oscillation: 6,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(invalid("rel_tol", "must be positive"));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(invalid("abs_tol", "must be non-negative"));
        }
        if self.max_depth < 1 {
            return Err(invalid("max_depth", "must be at least 1"));
        }
        if self.min_nodes_per_oscillation < 4 {
            return Err(invalid("min_nodes_per_oscillation", "must be at least 4"));
        }
        Ok(())
    }
}

/// Integral estimate with its error bound and the work spent.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<T, V = Complex<T>> {
    pub value: V,
    pub error: T,
    pub evaluations: usize,
}

struct Panel<T, V> {
    a: T,
    b: T,
    value: V,
    error: T,
    depth: u32,
}

impl<T: Real, V> PartialEq for Panel<T, V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real, V> Eq for Panel<T, V> {}
impl<T: Real, V> PartialOrd for Panel<T, V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real, V> Ord for Panel<T, V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

fn gauss_kronrod<T, V, F>(f: &mut F, a: T, b: T) -> (V, T)
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc.scale(T::lit(WGK[7]));
    let mut gauss = fc.scale(T::lit(WG[3]));
    let mut abs_sum = fc.magnitude() * T::lit(WGK[7]);
    let mut fv = [V::zero(); 14];
    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        kronrod = kronrod + (f1 + f2).scale(T::lit(WGK[j]));
        abs_sum += (f1.magnitude() + f2.magnitude()) * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2).scale(T::lit(WG[j / 2]));
        }
    }
    let mean = kronrod.scale(T::lit(0.5));
    let mut asc = (fc - mean).magnitude() * T::lit(WGK[7]);
    for j in 0..7 {
        asc += ((fv[2 * j] - mean).magnitude() + (fv[2 * j + 1] - mean).magnitude())
            * T::lit(WGK[j]);
    }
    let value = kronrod.scale(half_len);
    let raw = (kronrod - gauss).scale(half_len).magnitude();
    let res_asc = asc * half_len.abs();
    let res_abs = abs_sum * half_len.abs();
    (value, rescale_error(raw, res_abs, res_asc))
}

fn rescale_error<T: Real>(err: T, res_abs: T, res_asc: T) -> T {
    let mut scaled = err;
    if res_asc != T::zero() && scaled != T::zero() {
        let scale = (T::lit(200.0) * scaled / res_asc).powf(T::lit(1.5));
        scaled = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let floor = T::lit(50.0) * T::epsilon() * res_abs;
    if floor > scaled {
        scaled = floor;
    }
    scaled
}

/// Number of initial panels needed so that every oscillation of period
/// `2π / phase_rate` gets at least `spec.min_nodes_per_oscillation` nodes.
pub fn initial_panels(a: f64, b: f64, phase_rate: f64, spec: &QuadratureSpec) -> usize {
    let oscillations = phase_rate.abs() * (b - a) / std::f64::consts::TAU;
    let nodes = oscillations * spec.min_nodes_per_oscillation as f64;
    ((nodes / NODES_PER_PANEL as f64).ceil() as usize).clamp(1, MAX_PANELS / 4)
}

/// Integrates `f` over `[a, b]` until the summed panel error drops below
/// `max(rel_tol * |I|, abs_tol)`.
///
/// `phase_rate` is an upper bound on the local phase derivative of the
/// integrand (radians per unit of the integration variable); it sets the
/// density of the initial partition.
pub fn adaptive_integrate<T, F>(
    mut f: F,
    a: T,
    b: T,
    spec: &QuadratureSpec,
    phase_rate: T,
) -> Result<Complex<T>>
where
    T: Real,
    F: FnMut(T) -> Complex<T>,
{
    integrate_with_estimate(&mut f, a, b, spec, phase_rate).map(|e| e.value)
}

/// As [`adaptive_integrate`] but for any [`QuadValue`], returning the error
/// bound and node count as well.
pub fn integrate_with_estimate<T, V, F>(
    f: &mut F,
    a: T,
    b: T,
    spec: &QuadratureSpec,
    phase_rate: T,
) -> Result<Estimate<T, V>>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    spec.validate()?;
    if !(a < b) {
        return Err(invalid("a", "integration requires a < b"));
    }
    let n0 = initial_panels(a.to_f64_lossy(), b.to_f64_lossy(), phase_rate.to_f64_lossy(), spec);
    let width = (b - a) / T::from_usize_lossy(n0);
    let mut heap = BinaryHeap::with_capacity(2 * n0);
    let mut total = V::zero();
    let mut total_err = T::zero();
    let mut evaluations = 0;
    for i in 0..n0 {
        let pa = a + width * T::from_usize_lossy(i);
        let pb = if i + 1 == n0 { b } else { pa + width };
        let (value, error) = gauss_kronrod(f, pa, pb);
        evaluations += NODES_PER_PANEL;
        if !value.is_finite_value() {
            return Err(invalid("f", format!("integrand not finite on [{pa}, {pb}]")));
        }
        total = total + value;
        total_err += error;
        heap.push(Panel {
            a: pa,
            b: pb,
            value,
            error,
            depth: 0,
        });
    }
    let rel = T::lit(spec.rel_tol);
    let abs = T::lit(spec.abs_tol);
    loop {
        let target = (rel * total.magnitude()).max(abs);
        if total_err <= target {
            return Ok(Estimate {
                value: total,
                error: total_err,
                evaluations,
            });
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        if worst.depth >= spec.max_depth || heap.len() + 2 > MAX_PANELS {
            heap.push(worst);
            break;
        }
        let mid = T::lit(0.5) * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gauss_kronrod(f, worst.a, mid);
        let (v2, e2) = gauss_kronrod(f, mid, worst.b);
        evaluations += 2 * NODES_PER_PANEL;
        total = total - worst.value + v1 + v2;
        total_err = total_err - worst.error + e1 + e2;
        for (pa, pb, value, error) in [(worst.a, mid, v1, e1), (mid, worst.b, v2, e2)] {
            heap.push(Panel {
                a: pa,
                b: pb,
                value,
                error,
                depth: worst.depth + 1,
            });
        }
    }
    // resum to shed accumulated cancellation in the running totals
    let value = heap.iter().fold(V::zero(), |s, p| s + p.value);
    let error = heap.iter().fold(T::zero(), |s, p| s + p.error);
    if error <= (rel * value.magnitude()).max(abs) {
        return Ok(Estimate {
            value,
            error,
            evaluations,
        });
    }
    Err(Error::NonConvergence {
        a: a.to_f64_lossy(),
        b: b.to_f64_lossy(),
        estimate: value.magnitude().to_f64_lossy(),
        error_bound: error.to_f64_lossy(),
    })
}

/// Real-valued convenience wrapper.
pub fn integrate_real<T, F>(mut f: F, a: T, b: T, spec: &QuadratureSpec) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    integrate_with_estimate(&mut f, a, b, spec, T::zero()).map(|e| e.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::bessel::bessel_j;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn sine_over_half_period() {
        let spec = QuadratureSpec::new(1e-12, 0.0);
        let v = adaptive_integrate(|x: f64| c(x.sin()), 0.0, std::f64::consts::PI, &spec, 1.0)
            .unwrap();
        assert!((v.re - 2.0).abs() < 1e-10);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn oscillatory_exponential() {
        let spec = QuadratureSpec::new(1e-11, 0.0);
        let v = adaptive_integrate(
            |x: f64| Complex::new(0.0, 200.0 * x).exp(),
            0.0,
            1.0,
            &spec,
            200.0,
        )
        .unwrap();
        let want = (Complex::new(0.0, 200.0).exp() - 1.0) / Complex::new(0.0, 200.0);
        assert!((v - want).norm() < 1e-8, "{v} vs {want}");
    }

    #[test]
    fn bessel_moment_against_simpson() {
        let f = |x: f64| x * bessel_j(0, 5.0 * x).unwrap();
        let spec = QuadratureSpec::new(1e-12, 0.0);
        let v = integrate_real(f, 0.0, 1.0, &spec).unwrap();
        let exact = bessel_j(1, 5.0).unwrap() / 5.0;
        assert!((v - exact).abs() < 1e-9);

        // independent dense composite Simpson
        let n = 20_000;
        let h = 1.0 / n as f64;
        let mut s = f(0.0) + f(1.0);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        s *= h / 3.0;
        assert!((s - exact).abs() < 1e-9);
    }

    #[test]
    fn initial_partition_respects_node_floor() {
        let spec = QuadratureSpec {
            min_nodes_per_oscillation: 8,
            ..QuadratureSpec::default()
        };
        let panels = initial_panels(0.0, 1.0, 2.0 * std::f64::consts::PI * 100.0, &spec);
        assert!(panels * NODES_PER_PANEL >= 800);
    }

    #[test]
    fn reports_non_convergence_with_estimate() {
        let spec = QuadratureSpec {
            rel_tol: 1e-15,
            abs_tol: 0.0,
            max_depth: 2,
            min_nodes_per_oscillation: 4,
        };
        let err = adaptive_integrate(|x: f64| c(x.abs().sqrt()), -1.0, 1.0, &spec, 0.0)
            .unwrap_err();
        match err {
            Error::NonConvergence {
                estimate,
                error_bound,
                ..
            } => {
                assert!((estimate - 4.0 / 3.0).abs() < 1e-2);
                assert!(error_bound > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let mut spec = QuadratureSpec::default();
        spec.min_nodes_per_oscillation = 3;
        assert!(spec.validate().is_err());
        spec = QuadratureSpec::default();
        spec.rel_tol = 0.0;
        assert!(spec.validate().is_err());
        assert!(adaptive_integrate(|_x: f64| c(1.0), 1.0, 0.0, &QuadratureSpec::default(), 0.0)
            .is_err());
    }
}
