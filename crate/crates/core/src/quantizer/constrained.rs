//! `u_{n,r}(μ) = inf_A ∫ d(x, A ∪ G^c)^r dμ` for an open set `G` given as a
//! finite union of open intervals.

// split points index two arrays at once
#![allow(clippy::needless_range_loop)]

use rayon::prelude::*;
use serde::Serialize;

use super::cost::SegmentCost;
use crate::ifs::Interval;
use crate::{AtomicMeasure, Error, Result};

/// Distance from `x` to the complement of `G`.
pub fn distance_to_complement(x: f64, g: &[Interval]) -> f64 {
    g.iter()
        .filter(|c| c.contains_open(x))
        .map(|c| (x - c.lo).min(c.hi - x))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstrainedError {
    pub value: f64,
    /// `G` was empty, so every atom sits in `G^c` and the value is 0.
    pub degenerate: bool,
}

/// `∫ d(x, A ∪ G^c)^r dμ` for a fixed codebook `A` (possibly empty).
pub fn constrained_error_u(mu: &AtomicMeasure, codebook: &[f64], g: &[Interval], r: f64) -> ConstrainedError {
    let degenerate = g.is_empty();
    let value = mu
        .iter()
        .map(|(x, w)| {
            let to_a = codebook
                .iter()
                .map(|&a| (x - a).abs())
                .fold(f64::INFINITY, f64::min);
            w * to_a.min(distance_to_complement(x, g)).powf(r)
        })
        .sum();
    ConstrainedError { value, degenerate }
}

/// Optimal constrained quantizer with at most `n` codepoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstrainedQuantization {
    pub n: usize,
    pub r: f64,
    pub u: f64,
    pub codepoints: Vec<f64>,
}

#[derive(Clone, Copy)]
enum Step {
    Inherit,
    Free,
    Block(usize),
}

/// Exact `u_{n,r}` for `r ≥ 1`.
///
/// Each atom pays the smaller of its distance to `A` and to `G^c`. The set
/// of points closer to a codepoint `a` than to `G^c` is an interval, so an
/// optimal configuration splits the atoms into consecutive runs that are
/// either left to the boundary (each atom paying `d(x, G^c)^r`) or served
/// by one center. The DP below searches exactly those configurations.
pub fn optimal_constrained_dp(mu: &AtomicMeasure, n: usize, g: &[Interval], r: f64) -> Result<ConstrainedQuantization> {
    if !(r >= 1.0) {
        return Err(Error::Unsupported(format!("exact u_(n,r) needs r >= 1, got {r}")));
    }
    let m = mu.len();
    let cost = SegmentCost::new(mu, r);
    let free: Vec<f64> = mu
        .iter()
        .map(|(x, w)| w * distance_to_complement(x, g).powf(r))
        .collect();
    let mut prev: Vec<f64> = std::iter::once(0.0)
        .chain(free.iter().scan(0.0, |acc, &f| {
            *acc += f;
            Some(*acc)
        }))
        .collect();
    let mut steps: Vec<Vec<Step>> = vec![(0..=m).map(|_| Step::Free).collect()];
    for _k in 1..=n.min(m) {
        let block: Vec<(f64, usize)> = (0..=m)
            .into_par_iter()
            .map(|j| {
                let mut best = (f64::INFINITY, 0);
                for i in 0..j {
                    let v = prev[i] + cost.cost(i, j);
                    if v < best.0 {
                        best = (v, i);
                    }
                }
                best
            })
            .collect();
        let mut cur = vec![0.0; m + 1];
        let mut step = vec![Step::Inherit; m + 1];
        for j in 1..=m {
            let mut best = (prev[j], Step::Inherit);
            let f = cur[j - 1] + free[j - 1];
            if f < best.0 {
                best = (f, Step::Free);
            }
            if block[j].0 < best.0 {
                best = (block[j].0, Step::Block(block[j].1));
            }
            cur[j] = best.0;
            step[j] = best.1;
        }
        prev = cur;
        steps.push(step);
    }
    let mut codepoints = Vec::new();
    let (mut k, mut j) = (steps.len() - 1, m);
    while j > 0 {
        match steps[k][j] {
            Step::Inherit => k -= 1,
            Step::Free => j -= 1,
            Step::Block(i) => {
                codepoints.push(cost.center(i, j));
                k -= 1;
                j = i;
            }
        }
    }
    codepoints.reverse();
    let u = constrained_error_u(mu, &codepoints, g, r).value;
    Ok(ConstrainedQuantization { n, r, u, codepoints })
}
