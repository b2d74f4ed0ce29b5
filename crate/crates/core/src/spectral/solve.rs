use std::fmt;

use serde::Serialize;

use super::operator::{assemble_operator, Mesh};
use super::power::spectral_radius;
use crate::ifs::IfsModel;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMethod {
    ClosedForm,
    WordSum,
    Spectral,
}

impl fmt::Display for SigmaMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SigmaMethod::ClosedForm => "closed_form",
            SigmaMethod::WordSum => "word_sum",
            SigmaMethod::Spectral => "spectral",
        })
    }
}

/// Both word-sum roots and their distortion-induced gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WordSumDetail {
    pub depth: usize,
    pub sigma_t: f64,
    pub sigma_r: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaSolveResult {
    pub sigma: f64,
    /// `(σ, spr(σ))` for spectral solves, `(σ, (1/n) log level-sum)` for
    /// word sums; sorted by σ
    pub spr_trace: Vec<(f64, f64)>,
    pub bracket: (f64, f64),
    pub method: SigmaMethod,
    pub tol: f64,
    pub r: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word_sum: Option<WordSumDetail>,
}

impl SigmaSolveResult {
    /// The recorded values decrease strictly as σ increases.
    pub fn trace_is_strictly_decreasing(&self) -> bool {
        self.spr_trace.windows(2).all(|p| p[0].0 < p[1].0 && p[1].1 < p[0].1)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    /// CSV `sigma,spr` of the trace.
    pub fn trace_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["sigma", "spr"])?;
        for (s, v) in &self.spr_trace {
            w.write_record([s.to_string(), v.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

/// `[0, 10 r]`.
pub fn default_bracket(r: f64) -> (f64, f64) {
    (0.0, 10.0 * r)
}

const MAX_EXPANSIONS: usize = 6;

/// Bisection on σ for `spr(L_{σ,r}) = 1` over the mesh discretization.
///
/// A lower end with `spr ≤ 1` falls back to `σ = 0` (where the row sums
/// equal the number of maps); an upper end with `spr ≥ 1` is doubled up to
/// six times before giving up.
pub fn solve_sigma_spectral(model: &IfsModel, mesh: &Mesh, r: f64, bracket: (f64, f64), tol: f64) -> Result<SigmaSolveResult> {
    if !(r > 0.0) || !(tol > 0.0) {
        return Err(Error::Model(format!("need r > 0 and tol > 0, got {r}, {tol}")));
    }
    // the radius must be resolved well below the σ tolerance for the trace
    // to stay monotone near the root
    let inner_tol = (tol * 1e-3).max(1e-14);
    let spr = |sigma: f64| -> Result<f64> {
        let op = assemble_operator(model, mesh, sigma, r)?;
        Ok(spectral_radius(&op, inner_tol)?.spr)
    };
    let mut trace: Vec<(f64, f64)> = Vec::new();
    let (mut lo, mut hi) = bracket;
    if !(lo >= 0.0 && hi > lo) {
        return Err(Error::Model(format!("bad bracket [{lo}, {hi}]")));
    }
    let mut spr_lo = spr(lo)?;
    trace.push((lo, spr_lo));
    if spr_lo <= 1.0 && lo > 0.0 {
        lo = 0.0;
        spr_lo = spr(0.0)?;
        trace.push((lo, spr_lo));
    }
    if spr_lo <= 1.0 {
        // a single map: spr(0) = 1 and the dimension is 0
        trace.sort_by(|a, b| a.0.total_cmp(&b.0));
        return Ok(SigmaSolveResult {
            sigma: 0.0,
            spr_trace: trace,
            bracket: (0.0, 0.0),
            method: SigmaMethod::Spectral,
            tol,
            r,
            mesh_size: Some(mesh.len()),
            word_sum: None,
        });
    }
    let mut spr_hi = spr(hi)?;
    trace.push((hi, spr_hi));
    let mut expansions = 0;
    while spr_hi >= 1.0 {
        if expansions == MAX_EXPANSIONS {
            return Err(Error::Numeric(format!(
                "spr({hi}) = {spr_hi} >= 1 after {MAX_EXPANSIONS} bracket expansions"
            )));
        }
        lo = hi;
        hi *= 2.0;
        spr_hi = spr(hi)?;
        trace.push((hi, spr_hi));
        expansions += 1;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = spr(mid)?;
        trace.push((mid, v));
        if v > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    trace.sort_by(|a, b| a.0.total_cmp(&b.0));
    trace.dedup_by(|a, b| a.0 == b.0);
    Ok(SigmaSolveResult {
        sigma: 0.5 * (lo + hi),
        spr_trace: trace,
        bracket: (lo, hi),
        method: SigmaMethod::Spectral,
        tol,
        r,
        mesh_size: Some(mesh.len()),
        word_sum: None,
    })
}

/// Spectral σ on each mesh size, for refinement studies.
pub fn mesh_convergence(model: &IfsModel, r: f64, sizes: &[usize], tol: f64) -> Result<Vec<f64>> {
    sizes
        .iter()
        .map(|&m| {
            let mesh = Mesh::new(model.domain(), m)?;
            Ok(solve_sigma_spectral(model, &mesh, r, default_bracket(r), tol)?.sigma)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{closed_form_sigma, word_sum_sigma};

    #[test]
    fn cantor_spectral_matches_closed_form() {
        let model = IfsModel::cantor();
        let mesh = Mesh::new(model.domain(), 1025).unwrap();
        let res = solve_sigma_spectral(&model, &mesh, 2.0, default_bracket(2.0), 1e-10).unwrap();
        assert!((res.sigma - 2f64.ln() / 3f64.ln()).abs() < 1e-3);
        assert!(res.trace_is_strictly_decreasing());
    }

    #[test]
    fn zero_is_always_a_valid_lower_end() {
        let model = IfsModel::moebius_pair();
        let mesh = Mesh::new(model.domain(), 65).unwrap();
        let res = solve_sigma_spectral(&model, &mesh, 1.0, (0.0, 0.05), 1e-8).unwrap();
        assert_eq!(res.spr_trace[0], (0.0, 2.0));
    }

    #[test]
    fn narrow_upper_end_is_expanded() {
        let model = IfsModel::cantor();
        let mesh = Mesh::new(model.domain(), 33).unwrap();
        let res = solve_sigma_spectral(&model, &mesh, 1.0, (0.0, 0.1), 1e-10).unwrap();
        let closed = closed_form_sigma(&[0.5, 0.5], &[1.0 / 3.0, 1.0 / 3.0], 1.0).unwrap();
        assert!((res.sigma - closed).abs() < 1e-9);
    }

    #[test]
    fn moebius_spectral_agrees_with_word_sums() {
        let model = IfsModel::moebius_pair();
        let mesh = Mesh::new(model.domain(), 1025).unwrap();
        let spectral = solve_sigma_spectral(&model, &mesh, 1.0, default_bracket(1.0), 1e-10).unwrap();
        let ws = word_sum_sigma(&model, 1.0, 14, 1e-12, 9).unwrap();
        let d = ws.word_sum.unwrap();
        assert!((spectral.sigma - ws.sigma).abs() < 2e-2);
        assert!(d.sigma_r <= spectral.sigma && spectral.sigma <= d.sigma_t, "{d:?} {}", spectral.sigma);
        assert!(spectral.trace_is_strictly_decreasing());
    }

    #[test]
    fn trace_csv_header() {
        let model = IfsModel::cantor();
        let mesh = Mesh::new(model.domain(), 9).unwrap();
        let res = solve_sigma_spectral(&model, &mesh, 1.0, default_bracket(1.0), 1e-4).unwrap();
        assert!(res.trace_csv().unwrap().starts_with("sigma,spr\n"));
    }
}
