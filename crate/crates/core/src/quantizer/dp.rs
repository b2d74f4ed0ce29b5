//! Exact 1-D quantization by dynamic programming over contiguous blocks.
//!
//! For `r ≥ 1` the cost `t ↦ t^r` is convex, so optimal cells of a measure
//! on the line are runs of consecutive atoms. Layer `k` holds
//! `best[j] = min_{i<j} best_{k-1}[i] + cost(i, j)`; the optimal split
//! point is monotone in `j`, which lets each layer be filled by divide and
//! conquer in `O(m log m)` cost evaluations.

// split points index two arrays at once
#![allow(clippy::needless_range_loop)]

use rayon::prelude::*;

use super::cost::SegmentCost;
use super::{quant_error, Codebook, Diagnostics, Method, QuantizationResult};
use crate::{AtomicMeasure, Error, Result};

fn check_order(r: f64) -> Result<()> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::Unsupported(format!(
            "exact quantization needs r >= 1 (got {r}); contiguity of optimal cells is not guaranteed"
        )));
    }
    Ok(())
}

struct Layers {
    /// `splits[k][j]`: start of the last block in the best `(k+1)`-block
    /// partition of the first `j` atoms
    splits: Vec<Vec<usize>>,
}

#[allow(clippy::too_many_arguments)]
fn fill_layer(
    cost: &SegmentCost<'_>,
    prev: &[f64],
    cur: &mut [f64],
    split: &mut [usize],
    lo: usize,
    hi: usize,
    opt_lo: usize,
    opt_hi: usize,
) {
    if lo > hi {
        return;
    }
    let mid = (lo + hi) / 2;
    let mut best = f64::INFINITY;
    let mut arg = opt_lo;
    let top = opt_hi.min(mid - 1);
    for i in opt_lo..=top {
        let v = prev[i] + cost.cost(i, mid);
        if v < best {
            best = v;
            arg = i;
        }
    }
    cur[mid] = best;
    split[mid] = arg;
    if mid > lo {
        fill_layer(cost, prev, cur, split, lo, mid - 1, opt_lo, arg);
    }
    if mid < hi {
        fill_layer(cost, prev, cur, split, mid + 1, hi, arg, opt_hi);
    }
}

fn solve_layers(cost: &SegmentCost<'_>, layers: usize) -> Layers {
    let m = cost.len();
    let mut prev: Vec<f64> = (0..=m).map(|j| cost.cost(0, j)).collect();
    let mut splits = vec![vec![0usize; m + 1]];
    for k in 1..layers {
        let mut cur = vec![f64::INFINITY; m + 1];
        let mut split = vec![0usize; m + 1];
        // a k+1 block partition needs at least k+1 atoms
        if k < m {
            fill_layer(cost, &prev, &mut cur, &mut split, k + 1, m, k, m - 1);
        }
        prev = cur;
        splits.push(split);
    }
    Layers { splits }
}

/// Reference DP that scans every split point. `O(n m²)`.
fn solve_layers_full(cost: &SegmentCost<'_>, layers: usize) -> Layers {
    let m = cost.len();
    let mut prev: Vec<f64> = (0..=m).map(|j| cost.cost(0, j)).collect();
    let mut splits = vec![vec![0usize; m + 1]];
    for k in 1..layers {
        let row: Vec<(f64, usize)> = (0..=m)
            .into_par_iter()
            .map(|j| {
                if j < k + 1 {
                    return (f64::INFINITY, 0);
                }
                let mut best = (f64::INFINITY, k);
                for i in k..j {
                    let v = prev[i] + cost.cost(i, j);
                    if v < best.0 {
                        best = (v, i);
                    }
                }
                best
            })
            .collect();
        prev = row.iter().map(|p| p.0).collect();
        splits.push(row.iter().map(|p| p.1).collect());
    }
    Layers { splits }
}

fn backtrack(cost: &SegmentCost<'_>, layers: &Layers, blocks: usize) -> Vec<f64> {
    let mut centers = Vec::with_capacity(blocks);
    let mut j = cost.len();
    for k in (0..blocks).rev() {
        let i = if k == 0 { 0 } else { layers.splits[k][j] };
        centers.push(cost.center(i, j));
        j = i;
    }
    centers.reverse();
    centers
}

fn result_for(mu: &AtomicMeasure, cost: &SegmentCost<'_>, layers: &Layers, n: usize, r: f64) -> QuantizationResult {
    let m = mu.len();
    let (error, codebook) = if n >= m {
        (0.0, Codebook::new(mu.atoms().to_vec()).expect("nonempty"))
    } else {
        let centers = backtrack(cost, layers, n);
        let codebook = Codebook::new(centers).expect("nonempty");
        // recomputed directly; the prefix-sum costs only steer the search
        (quant_error(mu, &codebook, r), codebook)
    };
    QuantizationResult {
        n,
        r,
        error,
        codebook,
        method: Method::DpExact,
        diagnostics: Diagnostics::default(),
    }
}

/// Globally optimal `n`-point quantizer of `mu` under `|x − a|^r`, `r ≥ 1`.
pub fn optimal_quantizer_dp(mu: &AtomicMeasure, n: usize, r: f64) -> Result<QuantizationResult> {
    Ok(dp_sweep(mu, n, r)?.pop().expect("n >= 1"))
}

/// Same as [`optimal_quantizer_dp`] using the quadratic reference DP.
pub fn optimal_quantizer_dp_full(mu: &AtomicMeasure, n: usize, r: f64) -> Result<QuantizationResult> {
    check_order(r)?;
    if n == 0 {
        return Err(Error::Model("n must be at least 1".into()));
    }
    let cost = SegmentCost::new(mu, r);
    let layers = solve_layers_full(&cost, n.min(mu.len()));
    Ok(result_for(mu, &cost, &layers, n, r))
}

/// Optimal quantizers for every `n = 1..=n_max` from one DP run.
pub fn dp_sweep(mu: &AtomicMeasure, n_max: usize, r: f64) -> Result<Vec<QuantizationResult>> {
    check_order(r)?;
    if n_max == 0 {
        return Err(Error::Model("n must be at least 1".into()));
    }
    let cost = SegmentCost::new(mu, r);
    let layers = solve_layers(&cost, n_max.min(mu.len()));
    Ok((1..=n_max)
        .map(|n| result_for(mu, &cost, &layers, n, r))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enough_points_give_zero() {
        let mu = AtomicMeasure::equal_steps(7);
        for n in [7, 8, 20] {
            let q = optimal_quantizer_dp(&mu, n, 2.0).unwrap();
            assert_eq!(q.error, 0.0);
            assert_eq!(q.codebook.points(), mu.atoms());
        }
        assert!(optimal_quantizer_dp(&mu, 6, 2.0).unwrap().error > 0.0);
    }

    #[test]
    fn uniform_grid_one_and_two_cells() {
        let mu = AtomicMeasure::uniform_grid(1 << 12);
        let q1 = optimal_quantizer_dp(&mu, 1, 2.0).unwrap();
        assert!((q1.codebook.points()[0] - 0.5).abs() < 1e-12);
        assert!((q1.error - 1.0 / 12.0).abs() < 1e-4);
        let q2 = optimal_quantizer_dp(&mu, 2, 2.0).unwrap();
        let c = q2.codebook.points();
        assert!((c[0] - 0.25).abs() < 1e-9 && (c[1] - 0.75).abs() < 1e-9);
        assert!((q2.error - 1.0 / 48.0).abs() < 1e-4);
    }

    #[test]
    fn sub_linear_order_is_unsupported() {
        let mu = AtomicMeasure::equal_steps(4);
        assert!(matches!(optimal_quantizer_dp(&mu, 2, 0.5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn sweep_is_nonincreasing() {
        let mu = crate::measure::invariant_atoms_mid(&crate::IfsModel::moebius_pair(), 9).unwrap();
        for r in [1.0, 2.0, 3.0] {
            let sweep = dp_sweep(&mu, 24, r).unwrap();
            for pair in sweep.windows(2) {
                assert!(pair[1].error <= pair[0].error + 1e-15);
            }
        }
    }

    #[test]
    fn divide_and_conquer_matches_full_scan() {
        let mu = crate::measure::invariant_atoms_mid(&crate::IfsModel::cantor(), 7).unwrap();
        for r in [1.0, 1.5, 2.0, 3.0] {
            for n in [1, 2, 3, 5, 9, 17] {
                let a = optimal_quantizer_dp(&mu, n, r).unwrap();
                let b = optimal_quantizer_dp_full(&mu, n, r).unwrap();
                assert!((a.error - b.error).abs() <= 1e-12 * b.error.max(1e-300) + 1e-18, "r={r} n={n}");
            }
        }
    }
}
