use serde::Serialize;

use super::operator::{MeshFunction, OperatorMatrix};
use crate::{Error, Result};

const MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralRadius {
    pub spr: f64,
    pub eigenfunction: MeshFunction,
    pub iterations: usize,
    /// final Collatz–Wielandt bracket `[min_j (Mv)_j/v_j, max_j (Mv)_j/v_j]`
    pub lower: f64,
    pub upper: f64,
}

/// Dominant eigenvalue of a nonnegative matrix by power iteration from the
/// constant vector with sup-norm normalization.
///
/// For a strictly positive iterate `v`, every ratio `(Mv)_j / v_j` brackets
/// the spectral radius from one side; iteration stops once the bracket is
/// narrower than `tol`, so `sup |MΦ − spr Φ| ≤ tol · sup Φ` on return.
pub fn spectral_radius(matrix: &OperatorMatrix, tol: f64) -> Result<SpectralRadius> {
    let m = matrix.size();
    let mut v = vec![1.0; m];
    let mut trace: Vec<(f64, f64)> = Vec::new();
    for iteration in 1..=MAX_ITERATIONS {
        let u = matrix.apply(&v);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (a, b) in u.iter().zip(&v) {
            let q = a / b;
            lo = lo.min(q);
            hi = hi.max(q);
        }
        if !(lo > 0.0) || !hi.is_finite() {
            return Err(Error::Numeric("iterate lost strict positivity".into()));
        }
        if hi - lo <= tol {
            return Ok(SpectralRadius {
                spr: 0.5 * (lo + hi),
                eigenfunction: MeshFunction(v),
                iterations: iteration,
                lower: lo,
                upper: hi,
            });
        }
        if trace.len() < 16 || iteration % 1000 == 0 {
            trace.push((lo, hi));
        }
        let norm = u.iter().copied().fold(0.0, f64::max);
        v = u.into_iter().map(|x| x / norm).collect();
    }
    Err(Error::Numeric(format!(
        "power iteration did not converge in {MAX_ITERATIONS} steps; bracket trace {trace:?}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_radius() {
        let m = OperatorMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = spectral_radius(&m, 1e-12).unwrap();
        assert_eq!(s.spr, 1.0);
        assert!(s.eigenfunction.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn symmetric_two_by_two() {
        let m = OperatorMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!((spectral_radius(&m, 1e-12).unwrap().spr - 3.0).abs() < 1e-12);
    }

    #[test]
    fn nonsymmetric_three_by_three() {
        // constant row sums 1.5 give a positive eigenvector, hence spr = 1.5
        let m = OperatorMatrix::from_dense(&[
            vec![0.5, 1.0, 0.0],
            vec![0.0, 0.5, 1.0],
            vec![0.5, 0.5, 0.5],
        ])
        .unwrap();
        let s = spectral_radius(&m, 1e-12).unwrap();
        assert!((s.spr - 1.5).abs() < 1e-11, "{}", s.spr);
        let lv = m.apply(s.eigenfunction.values());
        for (a, b) in lv.iter().zip(s.eigenfunction.values()) {
            assert!((a - s.spr * b).abs() < 1e-11);
        }
    }
}
