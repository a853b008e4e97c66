//! Integer-order Bessel functions of the first kind.
//!
//! Three regimes:
//! * power series for `x < 8` (beyond that high orders cancel badly),
//! * Hankel asymptotic expansion once `x >= max(30, n^2)`,
//! * Miller's downward recurrence normalised by `J_0 + 2 sum J_2k = 1` in between.

use crate::error::{invalid, Error, Result};
use crate::real::Real;

/// Largest supported order.
pub const MAX_ORDER: u32 = 32;

const SERIES_MARGIN: f64 = 8.0;
const ASYMPTOTIC_FLOOR: f64 = 30.0;

/// `J_n(x)` for `0 <= n <= 32`. Negative `x` is handled through the parity
/// `J_n(-x) = (-1)^n J_n(x)`.
pub fn bessel_j<T: Real>(n: u32, x: T) -> Result<T> {
    if n > MAX_ORDER {
        return Err(Error::UnsupportedOrder {
            order: n,
            max: MAX_ORDER,
        });
    }
    if !x.is_finite() {
        return Err(invalid("x", "Bessel argument must be finite"));
    }
    if x < T::zero() {
        let v = bessel_j(n, -x)?;
        return Ok(if n % 2 == 1 { -v } else { v });
    }
    Ok(j_nonneg(n, x))
}

/// Fills `out[k] = J_k(x)` for `k = 0..out.len()`, sharing work between orders.
pub fn bessel_j_seq<T: Real>(x: T, out: &mut [T]) -> Result<()> {
    if out.is_empty() {
        return Ok(());
    }
    let nmax = (out.len() - 1) as u32;
    if nmax > MAX_ORDER {
        return Err(Error::UnsupportedOrder {
            order: nmax,
            max: MAX_ORDER,
        });
    }
    if !x.is_finite() || x < T::zero() {
        return Err(invalid("x", "Bessel argument must be finite and non-negative"));
    }
    let xf = x.to_f64_lossy();
    if xf < SERIES_MARGIN {
        for (n, slot) in out.iter_mut().enumerate() {
            *slot = series(n as u32, x);
        }
    } else if xf >= ASYMPTOTIC_FLOOR.max(2.0 * nmax as f64) {
        // upward recurrence is stable for n < x
        out[0] = asymptotic(0, x);
        if nmax >= 1 {
            out[1] = asymptotic(1, x);
        }
        for n in 1..nmax as usize {
            out[n + 1] = T::lit(2.0 * n as f64) / x * out[n] - out[n - 1];
        }
    } else {
        miller(x, out);
    }
    Ok(())
}

fn j_nonneg<T: Real>(n: u32, x: T) -> T {
    let xf = x.to_f64_lossy();
    if xf < SERIES_MARGIN {
        series(n, x)
    } else if xf >= ASYMPTOTIC_FLOOR.max((n * n) as f64) {
        asymptotic(n, x)
    } else {
        let mut buf = [T::zero(); MAX_ORDER as usize + 1];
        miller(x, &mut buf[..=n as usize]);
        buf[n as usize]
    }
}

fn series<T: Real>(n: u32, x: T) -> T {
    let half = x / T::lit(2.0);
    let mut term = T::one();
    for k in 1..=n {
        term = term * half / T::lit(k as f64);
    }
    if term == T::zero() {
        return T::zero();
    }
    let q = half * half;
    let mut sum = term;
    let mut m = 0.0;
    loop {
        m += 1.0;
        term = -term * q / T::lit(m * (m + n as f64));
        sum += term;
        if term.abs() <= T::epsilon() * T::lit(0.25) * sum.abs().max(T::min_positive_value()) {
            break;
        }
        if m > 500.0 {
            break;
        }
    }
    sum
}

fn asymptotic<T: Real>(n: u32, x: T) -> T {
    let mu = T::lit(4.0 * (n as f64) * (n as f64));
    let eight_x = T::lit(8.0) * x;
    let mut p = T::one();
    let mut q = T::zero();
    let mut term = T::one();
    let mut last = T::infinity();
    for k in 1..200 {
        let odd = T::lit((2 * k - 1) as f64);
        term = term * (mu - odd * odd) / (T::lit(k as f64) * eight_x);
        let mag = term.abs();
        if mag > last {
            break;
        }
        last = mag;
        // a_k / x^k contributes to P for even k, to Q for odd k, with alternating signs
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if mag <= T::epsilon() * T::lit(1e-2) {
            break;
        }
    }
    let chi = x - T::lit(2.0 * n as f64 + 1.0) * T::FRAC_PI_4();
    (T::lit(2.0) / (T::PI() * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Downward recurrence from a starting order well past the turning point.
fn miller<T: Real>(x: T, out: &mut [T]) {
    let nmax = out.len() - 1;
    let xf = x.to_f64_lossy();
    let start = (nmax as f64).max(xf) + 20.0 + 10.0 * xf.cbrt();
    let mut m = start.ceil() as usize;
    if m % 2 == 1 {
        m += 1;
    }
    let big = T::max_value().sqrt();
    let two_over_x = T::lit(2.0) / x;
    let mut j_next = T::zero();
    let mut j_cur = T::min_positive_value().sqrt();
    let mut norm = T::zero();
    for slot in out.iter_mut() {
        *slot = T::zero();
    }
    for k in (1..=m).rev() {
        let j_prev = T::from_usize_lossy(k) * two_over_x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        let order = k - 1;
        if order <= nmax {
            out[order] = j_cur;
        }
        if order % 2 == 0 && order > 0 {
            norm += j_cur;
        }
        if j_cur.abs() > big {
            let s = T::one() / big;
            j_cur = j_cur * s;
            j_next = j_next * s;
            norm = norm * s;
            for slot in out.iter_mut() {
                *slot = *slot * s;
            }
        }
    }
    let total = j_cur + T::lit(2.0) * norm;
    for slot in out.iter_mut() {
        *slot = *slot / total;
    }
}
