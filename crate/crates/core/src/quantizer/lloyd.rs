use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::cost::SegmentCost;
use super::{quant_error, Codebook, Diagnostics, Method, QuantizationResult};
use crate::{AtomicMeasure, Error, Result};

const MAX_ITERATIONS: usize = 500;
const REL_TOL: f64 = 1e-10;

fn derive_seed(seed: u64, restart: usize) -> u64 {
    seed ^ (restart as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Cell boundaries `[start, end)` in atom indices for a sorted codebook,
/// with left-biased ties.
fn cells(mu: &AtomicMeasure, codebook: &[f64]) -> Vec<(usize, usize)> {
    let x = mu.atoms();
    let mut bounds = Vec::with_capacity(codebook.len());
    let mut start = 0;
    for k in 0..codebook.len() {
        let end = if k + 1 == codebook.len() {
            x.len()
        } else {
            let mid = 0.5 * (codebook[k] + codebook[k + 1]);
            start + x[start..].partition_point(|&v| v <= mid)
        };
        bounds.push((start, end));
        start = end;
    }
    bounds
}

fn single_run(mu: &AtomicMeasure, cost: &SegmentCost<'_>, n: usize, r: f64, seed: u64) -> (Codebook, f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = sample(&mut rng, mu.len(), n).into_vec();
    idx.sort_unstable();
    let mut points: Vec<f64> = idx.into_iter().map(|i| mu.atoms()[i]).collect();
    let mut err = quant_error(mu, &Codebook::new(points.clone()).expect("nonempty"), r);
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        for (k, (i, j)) in cells(mu, &points).into_iter().enumerate() {
            if j > i {
                points[k] = cost.center(i, j);
            }
        }
        points.sort_by(f64::total_cmp);
        let next = quant_error(mu, &Codebook::new(points.clone()).expect("nonempty"), r);
        let change = (err - next).abs() / err.max(f64::MIN_POSITIVE);
        err = next;
        if change < REL_TOL {
            break;
        }
    }
    (Codebook::new(points).expect("nonempty"), err, iterations)
}

/// Best of `restarts` Lloyd runs (alternating nearest-codepoint assignment
/// and per-cell optimal centers) from random atom subsets. An upper bound on
/// `V_{n,r}`; for `r < 1` it is the only method available.
pub fn lloyd(mu: &AtomicMeasure, n: usize, r: f64, restarts: usize, seed: u64) -> Result<QuantizationResult> {
    if n == 0 {
        return Err(Error::Model("n must be at least 1".into()));
    }
    if !(r > 0.0) {
        return Err(Error::Model(format!("r must be positive, got {r}")));
    }
    let upper_bound_only = r < 1.0;
    if n >= mu.len() {
        return Ok(QuantizationResult {
            n,
            r,
            error: 0.0,
            codebook: Codebook::new(mu.atoms().to_vec())?,
            method: Method::Lloyd,
            diagnostics: Diagnostics { iterations: 0, restarts: 0, upper_bound_only },
        });
    }
    let restarts = restarts.max(1);
    let cost = SegmentCost::new(mu, r);
    let runs: Vec<(Codebook, f64, usize)> = (0..restarts)
        .into_par_iter()
        .map(|k| single_run(mu, &cost, n, r, derive_seed(seed, k)))
        .collect();
    let mut best = 0;
    for (k, run) in runs.iter().enumerate() {
        if run.1 < runs[best].1 {
            best = k;
        }
    }
    let iterations = runs.iter().map(|r| r.2).sum();
    let (codebook, error, _) = runs.into_iter().nth(best).expect("at least one run");
    Ok(QuantizationResult {
        n,
        r,
        error,
        codebook,
        method: Method::Lloyd,
        diagnostics: Diagnostics { iterations, restarts, upper_bound_only },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantizer::optimal_quantizer_dp;

    #[test]
    fn single_cell_matches_dp() {
        let mu = crate::measure::invariant_atoms_mid(&crate::IfsModel::moebius_pair(), 8).unwrap();
        for r in [1.0, 2.0, 2.5] {
            let a = lloyd(&mu, 1, r, 3, 9).unwrap();
            let b = optimal_quantizer_dp(&mu, 1, r).unwrap();
            assert!((a.error - b.error).abs() < 1e-12, "r={r}");
        }
    }

    #[test]
    fn uniform_grid_eight_cells_near_optimal() {
        let mu = AtomicMeasure::uniform_grid(1 << 12);
        let a = lloyd(&mu, 8, 2.0, 20, 11).unwrap();
        let b = optimal_quantizer_dp(&mu, 8, 2.0).unwrap();
        assert!(a.error >= b.error - 1e-12);
        assert!(a.error <= b.error * 1.005, "{} vs {}", a.error, b.error);
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        let mu = crate::measure::invariant_atoms_mid(&crate::IfsModel::cantor(), 8).unwrap();
        let a = lloyd(&mu, 5, 2.0, 4, 3).unwrap();
        let b = lloyd(&mu, 5, 2.0, 4, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sub_linear_order_is_flagged() {
        let mu = AtomicMeasure::uniform_grid(64);
        let q = lloyd(&mu, 4, 0.5, 4, 1).unwrap();
        assert!(q.diagnostics.upper_bound_only);
        assert!(q.error > 0.0);
    }
}
