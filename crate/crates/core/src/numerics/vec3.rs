//! Complex field vectors stored in the circular basis (ε₊, ε₋, ẑ).

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex;

use crate::real::Real;

/// Field amplitude `c_plus·ε₊ + c_minus·ε₋ + c_z·ẑ` with
/// `ε± = (x̂ ± iŷ)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexVec3<T> {
    pub c_plus: Complex<T>,
    pub c_minus: Complex<T>,
    pub c_z: Complex<T>,
}

impl<T: Real> ComplexVec3<T> {
    pub fn new(c_plus: Complex<T>, c_minus: Complex<T>, c_z: Complex<T>) -> Self {
        Self {
            c_plus,
            c_minus,
            c_z,
        }
    }

    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self::new(z, z, z)
    }

    /// ε₊
    pub fn e_plus() -> Self {
        Self::new(Complex::new(T::one(), T::zero()), Complex::default(), Complex::default())
    }

    /// ε₋
    pub fn e_minus() -> Self {
        Self::new(Complex::default(), Complex::new(T::one(), T::zero()), Complex::default())
    }

    /// ẑ
    pub fn e_z() -> Self {
        Self::new(Complex::default(), Complex::default(), Complex::new(T::one(), T::zero()))
    }

    pub fn from_cartesian(v: [Complex<T>; 3]) -> Self {
        let s = T::FRAC_1_SQRT_2();
        let i = Complex::new(T::zero(), T::one());
        Self {
            c_plus: (v[0] - i * v[1]) * s,
            c_minus: (v[0] + i * v[1]) * s,
            c_z: v[2],
        }
    }

    pub fn to_cartesian(&self) -> [Complex<T>; 3] {
        let s = T::FRAC_1_SQRT_2();
        let i = Complex::new(T::zero(), T::one());
        [
            (self.c_plus + self.c_minus) * s,
            i * (self.c_plus - self.c_minus) * s,
            self.c_z,
        ]
    }

    /// Real Cartesian vector embedded as a complex field.
    pub fn from_real(v: [T; 3]) -> Self {
        Self::from_cartesian(v.map(|x| Complex::new(x, T::zero())))
    }

    pub fn norm_sqr(&self) -> T {
        self.c_plus.norm_sqr() + self.c_minus.norm_sqr() + self.c_z.norm_sqr()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Hermitian product `self* · other`.
    pub fn cdot(&self, other: &Self) -> Complex<T> {
        self.c_plus.conj() * other.c_plus
            + self.c_minus.conj() * other.c_minus
            + self.c_z.conj() * other.c_z
    }

    /// Bilinear product `self · other` without conjugation.
    ///
    /// In the circular basis `ε₊·ε₊ = 0` and `ε₊·ε₋ = 1`.
    pub fn dot(&self, other: &Self) -> Complex<T> {
        self.c_plus * other.c_minus + self.c_minus * other.c_plus + self.c_z * other.c_z
    }

    pub fn conj(&self) -> Self {
        // conjugating Cartesian components swaps the circular ones
        Self {
            c_plus: self.c_minus.conj(),
            c_minus: self.c_plus.conj(),
            c_z: self.c_z.conj(),
        }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new(self.c_plus * s, self.c_minus * s, self.c_z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self::new(self.c_plus * s, self.c_minus * s, self.c_z * s)
    }

    pub fn is_finite(&self) -> bool {
        [self.c_plus, self.c_minus, self.c_z]
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Component along the `i`-th circular unit vector `û_i`
    /// (`i = +1 → ε₊`, `0 → ẑ`, `-1 → ε₋`), i.e. `û_i* · self`.
    pub fn circular_component(&self, i: Spherical) -> Complex<T> {
        match i {
            Spherical::Plus => self.c_plus,
            Spherical::Zero => self.c_z,
            Spherical::Minus => self.c_minus,
        }
    }

    pub fn unit_circular(i: Spherical) -> Self {
        match i {
            Spherical::Plus => Self::e_plus(),
            Spherical::Zero => Self::e_z(),
            Spherical::Minus => Self::e_minus(),
        }
    }
}

/// Circular polarization index `i ∈ {+1, 0, -1}` of an atomic sublevel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spherical {
    Plus,
    Zero,
    Minus,
}

impl Spherical {
    pub const ALL: [Spherical; 3] = [Spherical::Plus, Spherical::Zero, Spherical::Minus];

    pub fn index(self) -> usize {
        match self {
            Spherical::Plus => 0,
            Spherical::Zero => 1,
            Spherical::Minus => 2,
        }
    }
}

impl<T: Real> Add for ComplexVec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.c_plus + o.c_plus, self.c_minus + o.c_minus, self.c_z + o.c_z)
    }
}

impl<T: Real> AddAssign for ComplexVec3<T> {
    fn add_assign(&mut self, o: Self) {
        self.c_plus += o.c_plus;
        self.c_minus += o.c_minus;
        self.c_z += o.c_z;
    }
}

impl<T: Real> Sub for ComplexVec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.c_plus - o.c_plus, self.c_minus - o.c_minus, self.c_z - o.c_z)
    }
}

impl<T: Real> Neg for ComplexVec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.c_plus, -self.c_minus, -self.c_z)
    }
}

impl<T: Real> Mul<Complex<T>> for ComplexVec3<T> {
    type Output = Self;
    fn mul(self, s: Complex<T>) -> Self {
        self.scale(s)
    }
}

/// Unit polarization `ε̂_s(k̂)` of a plane wave travelling along
/// `k̂ = (sinθ cosφ_k, sinθ sinφ_k, cosθ)`: the helicity vector `ε̂_s` of a
/// wave along ẑ carried over by `R_z(φ_k) R_y(θ)`, with the phase fixed so
/// that the ε̂₊ coefficient is `(cosθ + s)/2 · e^{-iφ_k}`.
pub fn rotated_polarization<T: Real>(theta: T, phi_k: T, s: i32) -> ComplexVec3<T> {
    let s = T::lit(s.signum() as f64);
    let half = T::lit(0.5);
    let (st, ct) = theta.sin_cos();
    let e_minus_phi = Complex::from_polar(T::one(), -phi_k);
    let e_plus_phi = Complex::from_polar(T::one(), phi_k);
    ComplexVec3 {
        c_plus: e_minus_phi * ((ct + s) * half),
        c_minus: e_plus_phi * ((ct - s) * half),
        c_z: Complex::new(-st * T::FRAC_1_SQRT_2(), T::zero()),
    }
}

/// Unit wavevector direction for polar angle θ and azimuth φ_k.
pub fn direction<T: Real>(theta: T, phi_k: T) -> [T; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi_k.sin_cos();
    [st * cp, st * sp, ct]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PI: f64 = std::f64::consts::PI;

    fn close(a: Complex<f64>, b: Complex<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn no_rotation_gives_e_plus() {
        let e = rotated_polarization(0.0_f64, 0.0, 1);
        assert_eq!(e, ComplexVec3::e_plus());
        // any azimuth only changes the global phase
        let e = rotated_polarization(0.0_f64, 1.3, 1);
        assert!((e.c_plus.norm() - 1.0).abs() < 1e-15);
        assert!(e.c_minus.norm() < 1e-15 && e.c_z.norm() < 1e-15);
    }

    #[test]
    fn quarter_turn_about_y() {
        let e = rotated_polarization(PI / 2.0, 0.0_f64, 1);
        assert!(close(e.c_plus, Complex::new(0.5, 0.0), 1e-15));
        assert!(close(e.c_minus, Complex::new(-0.5, 0.0), 1e-15));
        assert!(close(e.c_z, Complex::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0), 1e-15));

        // explicit matrix route: R_y(π/2) maps (x̂+iŷ)/√2 to (-ẑ+iŷ)/√2
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let by_matrix = ComplexVec3::from_cartesian([
            Complex::new(0.0, 0.0),
            Complex::new(0.0, s),
            Complex::new(-s, 0.0),
        ]);
        assert!((e - by_matrix).norm() < 1e-15);
    }

    #[test]
    fn unit_norm_single_case() {
        let e = rotated_polarization(1.0_f64, 2.0, -1);
        assert!((e.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn grid_is_unit_and_transverse() {
        for i in 0..20 {
            for j in 0..20 {
                let theta = PI / 2.0 * i as f64 / 19.0;
                let phi = 2.0 * PI * j as f64 / 20.0;
                for s in [1, -1] {
                    let e = rotated_polarization(theta, phi, s);
                    assert!((e.norm() - 1.0).abs() <= 1e-13);
                    let k = ComplexVec3::from_real(direction(theta, phi));
                    assert!(e.dot(&k).norm() <= 1e-13);
                }
            }
        }
    }

    #[test]
    fn bilinear_products_of_basis() {
        let p = ComplexVec3::<f64>::e_plus();
        let m = ComplexVec3::<f64>::e_minus();
        assert_eq!(p.dot(&p), Complex::new(0.0, 0.0));
        assert_eq!(p.dot(&m), Complex::new(1.0, 0.0));
        assert_eq!(p.cdot(&p), Complex::new(1.0, 0.0));
        assert_eq!(p.conj(), m);
    }

    fn arb_vec() -> impl Strategy<Value = ComplexVec3<f64>> {
        prop::array::uniform6(-10.0..10.0_f64).prop_map(|a| {
            ComplexVec3::new(
                Complex::new(a[0], a[1]),
                Complex::new(a[2], a[3]),
                Complex::new(a[4], a[5]),
            )
        })
    }

    proptest! {
        #[test]
        fn cartesian_round_trip(v in arb_vec()) {
            let back = ComplexVec3::from_cartesian(v.to_cartesian());
            prop_assert!((back - v).norm() <= 1e-14 * v.norm().max(1.0));
            let cart = v.to_cartesian();
            let cart_norm: f64 = cart.iter().map(|c| c.norm_sqr()).sum();
            prop_assert!((cart_norm - v.norm_sqr()).abs() <= 1e-13 * v.norm_sqr().max(1.0));
        }

        #[test]
        fn products_match_cartesian(a in arb_vec(), b in arb_vec()) {
            let (ca, cb) = (a.to_cartesian(), b.to_cartesian());
            let bil: Complex<f64> = ca.iter().zip(&cb).map(|(x, y)| x * y).sum();
            let her: Complex<f64> = ca.iter().zip(&cb).map(|(x, y)| x.conj() * y).sum();
            prop_assert!((a.dot(&b) - bil).norm() <= 1e-12 * (1.0 + bil.norm()));
            prop_assert!((a.cdot(&b) - her).norm() <= 1e-12 * (1.0 + her.norm()));
        }
    }
}
