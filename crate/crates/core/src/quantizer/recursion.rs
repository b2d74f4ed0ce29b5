//! Numeric checks of the two quantization recursions over a finite maximal
//! antichain `Λ`:
//!
//! * upper: `V_{n,r} ≤ C₂^r Σ_{w∈Λ} p_w T_w^r V_{n_w,r}` for any allocation
//!   with `n_w ≥ 1`, `Σ n_w ≤ n`;
//! * lower: `u_{n,r} ≥ C₂^{-r} Σ_{w∈Λ} p_w R_w^r u_{n_w,r}` where `n_w`
//!   counts the codepoints of an optimal `u_{n,r}` codebook inside
//!   `f_w(G)`, once every cell holds at least one.

use std::collections::BTreeMap;

use serde::Serialize;

use super::constrained::optimal_constrained_dp;
use super::dp::dp_sweep;
use crate::ifs::{verify_antichain, IfsModel, Interval, Word, CONSTANT_SLACK};
use crate::{AtomicMeasure, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpperRecursionReport {
    pub n: usize,
    pub r: f64,
    pub allocation: Vec<usize>,
    pub c2_used: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerRecursionReport {
    pub n: usize,
    pub r: f64,
    pub cell_counts: Vec<usize>,
    /// every cell `f_w(G)` holds a codepoint
    pub applicable: bool,
    pub c2_used: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

fn check_antichain(model: &IfsModel, antichain: &[Word]) -> Result<()> {
    let cert = verify_antichain(antichain, model.probs());
    if !cert.is_valid() {
        return Err(Error::Model(format!("not a finite maximal antichain: {cert:?}")));
    }
    Ok(())
}

/// Upper recursion with `C₂` inflated by [`CONSTANT_SLACK`](crate::ifs::CONSTANT_SLACK).
#[allow(clippy::too_many_arguments)]
pub fn recursion_check_upper(
    model: &IfsModel,
    mu: &AtomicMeasure,
    antichain: &[Word],
    n: usize,
    r: f64,
    allocation: &[usize],
    c2_estimate: f64,
    mesh_size: usize,
) -> Result<UpperRecursionReport> {
    check_antichain(model, antichain)?;
    if allocation.len() != antichain.len() {
        return Err(Error::Model("allocation and antichain differ in length".into()));
    }
    if allocation.contains(&0) || allocation.iter().sum::<usize>() > n {
        return Err(Error::Model(format!(
            "allocation {allocation:?} needs n_w >= 1 and total <= {n}"
        )));
    }
    let top = allocation.iter().copied().max().unwrap_or(1).max(n);
    let sweep = dp_sweep(mu, top, r)?;
    let v = |k: usize| sweep[k - 1].error;
    let c2 = c2_estimate * CONSTANT_SLACK;
    let mut sum = 0.0;
    for (w, &k) in antichain.iter().zip(allocation) {
        let t = model.word_bounds(w, mesh_size)?.t;
        sum += w.weight(model.probs()) * t.powf(r) * v(k);
    }
    let lhs = v(n);
    let rhs = c2.powf(r) * sum;
    Ok(UpperRecursionReport {
        n,
        r,
        allocation: allocation.to_vec(),
        c2_used: c2,
        lhs,
        rhs,
        slack: rhs - lhs,
        holds: lhs <= rhs,
    })
}

fn open_set(model: &IfsModel) -> Result<&[Interval]> {
    model
        .sosc_set()
        .ok_or_else(|| Error::Model("model declares no SOSC open set".into()))
}

/// `f_w(G)` as open intervals.
fn cell_of(model: &IfsModel, w: &Word, g: &[Interval]) -> Vec<(f64, f64)> {
    g.iter()
        .map(|c| {
            let (a, b) = (model.apply_word(w, c.lo), model.apply_word(w, c.hi));
            (a.min(b), a.max(b))
        })
        .collect()
}

fn cell_counts(model: &IfsModel, antichain: &[Word], g: &[Interval], codepoints: &[f64]) -> Vec<usize> {
    antichain
        .iter()
        .map(|w| {
            let cell = cell_of(model, w, g);
            codepoints
                .iter()
                .filter(|&&a| cell.iter().any(|&(lo, hi)| a > lo && a < hi))
                .count()
        })
        .collect()
}

/// Lower recursion with `C₂` inflated by [`CONSTANT_SLACK`](crate::ifs::CONSTANT_SLACK).
pub fn recursion_check_lower(
    model: &IfsModel,
    mu: &AtomicMeasure,
    antichain: &[Word],
    n: usize,
    r: f64,
    c2_estimate: f64,
    mesh_size: usize,
) -> Result<LowerRecursionReport> {
    check_antichain(model, antichain)?;
    let g = open_set(model)?;
    let opt = optimal_constrained_dp(mu, n, g, r)?;
    let counts = cell_counts(model, antichain, g, &opt.codepoints);
    let mut cache: BTreeMap<usize, f64> = BTreeMap::new();
    let c2 = c2_estimate * CONSTANT_SLACK;
    let mut sum = 0.0;
    for (w, &k) in antichain.iter().zip(&counts) {
        let u_k = match cache.get(&k) {
            Some(&u) => u,
            None => {
                let u = optimal_constrained_dp(mu, k, g, r)?.u;
                cache.insert(k, u);
                u
            }
        };
        let rw = model.word_bounds(w, mesh_size)?.r;
        sum += w.weight(model.probs()) * rw.powf(r) * u_k;
    }
    let rhs = c2.powf(-r) * sum;
    Ok(LowerRecursionReport {
        n,
        r,
        applicable: counts.iter().all(|&k| k >= 1),
        cell_counts: counts,
        c2_used: c2,
        lhs: opt.u,
        rhs,
        slack: opt.u - rhs,
        holds: opt.u >= rhs,
    })
}

/// Smallest `n ≤ n_max` for which every cell `f_w(G)`, `w ∈ Λ`, captures at
/// least one codepoint of an optimal `u_{n,r}` codebook.
pub fn detect_n0(model: &IfsModel, mu: &AtomicMeasure, antichain: &[Word], r: f64, n_max: usize) -> Result<Option<usize>> {
    check_antichain(model, antichain)?;
    let g = open_set(model)?;
    for n in antichain.len()..=n_max {
        let opt = optimal_constrained_dp(mu, n, g, r)?;
        if cell_counts(model, antichain, g, &opt.codepoints).iter().all(|&k| k >= 1) {
            return Ok(Some(n));
        }
    }
    Ok(None)
}
