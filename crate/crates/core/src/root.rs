//! Bracketing bisection for monotone scalar functions.

use crate::{Error, Result};

/// Outcome of a bisection run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub root: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

/// Bisects `f` on `[lo, hi]`, where `f(lo)` and `f(hi)` have opposite signs,
/// until the bracket is narrower than `tol`. Returns the bracket midpoint.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<Bisection>
where
    F: FnMut(f64) -> f64,
{
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::Numeric(format!(
            "bad bisection setup: [{lo}, {hi}] tol {tol}"
        )));
    }
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(Bisection { root: lo, lo, hi: lo, iterations: 0 });
    }
    if f_hi == 0.0 {
        return Ok(Bisection { root: hi, lo: hi, hi, iterations: 0 });
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::Numeric(format!(
            "root not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}"
        )));
    }
    let lo_positive = f_lo > 0.0;
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        iterations += 1;
        if v == 0.0 {
            return Ok(Bisection { root: mid, lo: mid, hi: mid, iterations });
        }
        if (v > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Bisection {
        root: 0.5 * (lo + hi),
        lo,
        hi,
        iterations,
    })
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
/// Returns `(argmin, min)`; ties between the probes keep the left one.
pub fn golden_section_min<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    if hi - lo <= tol {
        let x = 0.5 * (lo + hi);
        return (x, f(x));
    }
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    while hi - lo > tol {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        }
        if !(a > lo && b < hi) {
            break;
        }
    }
    // endpoints of the final bracket are candidates too
    let mut best = if fa <= fb { (a, fa) } else { (b, fb) };
    for x in [lo, hi] {
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let b = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((b.root - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bisect_decreasing() {
        let b = bisect(|x| 1.0 - x, 0.0, 3.0, 1e-12).unwrap();
        assert!((b.root - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bisect_rejects_unbracketed() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-6).is_err());
    }

    #[test]
    fn golden_finds_parabola_min() {
        let (x, v) = golden_section_min(|x| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn golden_handles_boundary_min() {
        let (x, _) = golden_section_min(|x| x, 0.0, 1.0, 1e-12);
        assert!(x < 1e-10);
    }
}
