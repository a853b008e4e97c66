//! One-dimensional golden-section maximisation.

use crate::error::{Error, Result};
use crate::real::Real;

/// Location and value of a maximum found by [`golden_max`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum<T> {
    pub x: T,
    pub value: T,
    /// The maximiser sits within `tol` of one of the bracket ends.
    pub at_boundary: bool,
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `tol`.
pub fn golden_max<T, F>(mut f: F, lo: T, hi: T, tol: T) -> Result<Maximum<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    if !(lo < hi) || !(tol > T::zero()) {
        return Err(Error::Bracketing {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
        });
    }
    let inv_phi = T::lit(0.618_033_988_749_894_9);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let (x, value) = if fc >= fd { (c, fc) } else { (d, fd) };
    let at_boundary = x - lo <= tol || hi - x <= tol;
    Ok(Maximum {
        x,
        value,
        at_boundary,
    })
}

/// Samples `f` on `samples` evenly spaced points of `[lo, hi]`, then refines the
/// best sample with golden section between its neighbours.
///
/// Fails with [`Error::Bracketing`] when the best sample is an end point.
pub fn scan_then_golden<T, F>(mut f: F, lo: T, hi: T, samples: usize, tol: T) -> Result<Maximum<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let n = samples.max(3);
    let step = (hi - lo) / T::from_usize_lossy(n - 1);
    let mut best = 0;
    let mut best_val = T::neg_infinity();
    for i in 0..n {
        let v = f(lo + step * T::from_usize_lossy(i))?;
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    if best == 0 || best == n - 1 {
        return Err(Error::Bracketing {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
        });
    }
    let a = lo + step * T::from_usize_lossy(best - 1);
    let b = lo + step * T::from_usize_lossy(best + 1);
    let m = golden_max(&mut f, a, b, tol)?;
    Ok(Maximum {
        at_boundary: false,
        ..m
    })
}
