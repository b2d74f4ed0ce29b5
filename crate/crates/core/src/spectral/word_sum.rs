use crate::ifs::IfsModel;
use crate::root::bisect;
use crate::{Error, Result};

use super::solve::{SigmaMethod, SigmaSolveResult, WordSumDetail};
use super::sigma_from_exponent;

/// Which derivative bound enters the level sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// `T_w = max Df_w`
    Max,
    /// `R_w = min Df_w`
    Min,
}

/// `Σ_{|w|=n} (p_w B_w^r)^s` from precomputed logs `ln(p_w B_w^r)`.
fn sum_from_logs(logs: &[f64], s: f64) -> f64 {
    logs.iter().map(|&l| (s * l).exp()).sum()
}

fn level_logs(model: &IfsModel, r: f64, depth: usize, mesh_size: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    // word sums must be complete, so the level is never subsampled
    let table = model.level_table(depth, mesh_size, crate::ifs::DEFAULT_WORD_CAP)?;
    let mut t_logs = Vec::with_capacity(table.len());
    let mut r_logs = Vec::with_capacity(table.len());
    for (p, b) in table {
        t_logs.push(p.ln() + r * b.t.ln());
        r_logs.push(p.ln() + r * b.r.ln());
    }
    Ok((t_logs, r_logs))
}

/// `Σ_{|w|=depth} (p_w B_w^r)^s` for the chosen bound.
pub fn level_sum(model: &IfsModel, r: f64, s: f64, depth: usize, bound: BoundKind, mesh_size: usize) -> Result<f64> {
    let (t, rr) = level_logs(model, r, depth, mesh_size)?;
    Ok(sum_from_logs(if bound == BoundKind::Max { &t } else { &rr }, s))
}

const S_TOL: f64 = 1e-15;

/// Roots of `(1/n) log Σ_{|w|=n} (p_w T_w^r)^{σ/(r+σ)} = 0` and of the same
/// sum with `R_w`. The result's `sigma` is the `T_w` root; the `R_w` root
/// and the gap between them are kept in `word_sum`.
pub fn word_sum_sigma(model: &IfsModel, r: f64, depth: usize, tol: f64, mesh_size: usize) -> Result<SigmaSolveResult> {
    if depth == 0 {
        return Err(Error::Model("depth must be at least 1".into()));
    }
    if !(r > 0.0) {
        return Err(Error::Model(format!("r must be positive, got {r}")));
    }
    if model.len() == 1 {
        return Err(Error::Model("a single map has dimension 0; word sums are degenerate".into()));
    }
    let (t_logs, r_logs) = level_logs(model, r, depth, mesh_size)?;
    let n = depth as f64;
    let mut trace = Vec::new();
    let t_root = {
        let f = |s: f64| {
            let v = sum_from_logs(&t_logs, s).ln() / n;
            trace.push((sigma_from_exponent(s, r), v));
            v
        };
        bisect(f, 0.0, 1.0, S_TOL.max(tol * 1e-3).min(1e-12))?
    };
    let r_root = bisect(|s| sum_from_logs(&r_logs, s).ln() / n, 0.0, 1.0, S_TOL.max(tol * 1e-3).min(1e-12))?;
    let sigma_t = sigma_from_exponent(t_root.root, r);
    let sigma_r = sigma_from_exponent(r_root.root, r);
    // the endpoints 0 and 1 are evaluated first and do not belong to the
    // bisection path proper, but they are valid points of the curve
    trace.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(SigmaSolveResult {
        sigma: sigma_t,
        spr_trace: trace,
        bracket: (
            sigma_from_exponent(t_root.lo, r),
            sigma_from_exponent(t_root.hi, r).min(f64::MAX),
        ),
        method: SigmaMethod::WordSum,
        tol,
        r,
        mesh_size: None,
        word_sum: Some(WordSumDetail {
            depth,
            sigma_t,
            sigma_r,
            gap: (sigma_t - sigma_r).abs(),
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::closed_form_sigma;

    #[test]
    fn similitude_roots_coincide_with_closed_form() {
        let model = IfsModel::similitude(&[1.0 / 3.0, 1.0 / 4.0], &[0.0, 0.75], &[0.7, 0.3]).unwrap();
        for r in [1.0, 2.0] {
            let closed = closed_form_sigma(&[0.7, 0.3], &[1.0 / 3.0, 0.25], r).unwrap();
            for depth in [1, 5, 10] {
                let res = word_sum_sigma(&model, r, depth, 1e-12, 9).unwrap();
                let d = res.word_sum.unwrap();
                assert!(d.gap < 1e-12);
                assert!((d.sigma_t - closed).abs() < 1e-10, "depth {depth}: {} vs {closed}", d.sigma_t);
            }
        }
    }

    #[test]
    fn moebius_gap_shrinks_with_depth() {
        let model = IfsModel::moebius_pair();
        let g8 = word_sum_sigma(&model, 1.0, 8, 1e-12, 9).unwrap().word_sum.unwrap();
        let g14 = word_sum_sigma(&model, 1.0, 14, 1e-12, 9).unwrap().word_sum.unwrap();
        assert!(g14.gap < g8.gap);
        assert!(g14.sigma_t > g14.sigma_r);
    }

    #[test]
    fn level_too_large_is_a_resource_error() {
        let model = IfsModel::cantor();
        assert!(matches!(word_sum_sigma(&model, 1.0, 20, 1e-12, 9), Err(Error::Resource(_))));
    }
}
