use rayon::prelude::*;
use serde::Serialize;

use crate::ifs::SoscReport;
use crate::measure::{invariant_atoms_mid, w1_distance};
use crate::quantizer::optimal_quantizer_dp;
use crate::spectral::{closed_form_sigma, default_bracket, solve_sigma_spectral, Mesh};
use crate::{AtomicMeasure, Error, IfsModel, Interval, MapDescriptor, Result};

const SPECTRAL_MESH: usize = 1025;
const SPECTRAL_TOL: f64 = 1e-10;

/// `x ↦ c x`, `x ↦ c x + 1 − c` with `c_k = 1/3 + 1/(10k)` and equal weights.
pub fn contraction_family(ks: &[usize]) -> Result<Vec<(usize, IfsModel)>> {
    ks.iter()
        .map(|&k| {
            let c = 1.0 / 3.0 + 1.0 / (10.0 * k as f64);
            IfsModel::similitude(&[c, c], &[0.0, 1.0 - c], &[0.5, 0.5]).map(|m| (k, m))
        })
        .collect()
}

/// `x ↦ x/(2n)`, `x ↦ x/(2n) + 1/(2n)` with equal weights.
pub fn halving_family(ns: &[usize]) -> Result<Vec<(usize, IfsModel)>> {
    ns.iter()
        .map(|&n| {
            let c = 1.0 / (2.0 * n as f64);
            IfsModel::similitude(&[c, c], &[0.0, c], &[0.5, 0.5]).map(|m| (n, m))
        })
        .collect()
}

/// Pointwise limit of [`halving_family`]: two copies of the constant map 0.
/// Not a valid model; built unchecked.
pub fn halving_limit() -> IfsModel {
    IfsModel::unchecked(
        vec![MapDescriptor::affine(0.0, 0.0), MapDescriptor::affine(0.0, 0.0)],
        vec![0.5, 0.5],
        Interval::unit(),
        Some(vec![Interval::unit()]),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemberRow {
    pub k: usize,
    pub sigma: f64,
    pub method: String,
    /// `|σ_k − σ|`
    pub gap: f64,
    /// W1 between depth-limited approximations of member and limit
    pub w1_to_limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub r: f64,
    pub limit_sigma: f64,
    pub limit_method: String,
    pub limit_sosc: SoscReport,
    pub members: Vec<MemberRow>,
    pub gaps_monotone: bool,
    pub notes: Vec<String>,
}

impl ContinuityReport {
    pub fn final_gap(&self) -> Option<f64> {
        self.members.last().map(|m| m.gap)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// CSV `k,sigma,gap,w1`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["k", "sigma", "gap", "w1"])?;
        for m in &self.members {
            w.write_record([
                m.k.to_string(),
                m.sigma.to_string(),
                m.gap.to_string(),
                m.w1_to_limit.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

fn sigma_of(model: &IfsModel, r: f64) -> Result<(f64, String)> {
    if let Some(ratios) = model.similitude_ratios() {
        return Ok((closed_form_sigma(model.probs(), &ratios, r)?, "closed".into()));
    }
    let mesh = Mesh::new(model.domain(), SPECTRAL_MESH)?;
    let res = solve_sigma_spectral(model, &mesh, r, default_bracket(r), SPECTRAL_TOL)?;
    Ok((res.sigma, "spectral".into()))
}

fn is_constant_system(model: &IfsModel) -> bool {
    let mesh = model.domain().mesh(17);
    model.maps().iter().all(|m| mesh.iter().all(|&x| m.df(x) == 0.0))
}

/// Per-member σ, the limit σ, their gaps, and W1 gaps between depth-`depth`
/// approximations of the invariant measures.
pub fn continuity_experiment(
    family: &[(usize, IfsModel)],
    limit: &IfsModel,
    r: f64,
    depth: usize,
) -> Result<ContinuityReport> {
    let mut notes = Vec::new();
    let limit_sosc = limit.sosc_report();
    let (limit_sigma, limit_method) = match limit.validate() {
        Ok(()) => sigma_of(limit, r)?,
        Err(e) if is_constant_system(limit) => {
            // every orbit collapses to a fixed point: the invariant measure is
            // a Dirac mass, whose quantization dimension is 0
            notes.push(format!("limit system is degenerate ({e}); SOSC fails"));
            (0.0, "point-mass".into())
        }
        Err(e) => return Err(e),
    };
    if !limit_sosc.holds {
        notes.push(format!(
            "limit SOSC fails: {}",
            limit_sosc.reason.clone().unwrap_or_default()
        ));
    }
    let limit_mu = invariant_atoms_mid(limit, depth)?;
    let members = family
        .par_iter()
        .map(|(k, model)| {
            model.validate()?;
            let (sigma, method) = sigma_of(model, r)?;
            let mu = invariant_atoms_mid(model, depth)?;
            Ok(MemberRow {
                k: *k,
                sigma,
                method,
                gap: (sigma - limit_sigma).abs(),
                w1_to_limit: w1_distance(&mu, &limit_mu),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let gaps_monotone = members.windows(2).all(|p| p[1].gap <= p[0].gap);
    Ok(ContinuityReport {
        r,
        limit_sigma,
        limit_method,
        limit_sosc,
        members,
        gaps_monotone,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualStepsRow {
    pub n: usize,
    /// W1 to the uniform grid
    pub w1: f64,
    /// `V_{n−1,r}(μ_n)`, positive
    pub v_below: f64,
    /// largest `V_{m,r}(μ_n)` over the checked `m ≥ n`; exactly 0
    pub v_at_or_above: f64,
    /// 0 whenever `v_at_or_above` vanishes
    pub dimension: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualStepsReport {
    pub r: f64,
    pub grid_size: usize,
    pub rows: Vec<EqualStepsRow>,
    pub w1_monotone: bool,
}

impl EqualStepsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `μ_n = (1/n) Σ δ_{i/n}` against a uniform grid of `grid_size` atoms:
/// W1 tends to 0 while every `μ_n` has zero error from `n` points on.
pub fn equal_steps_experiment(ns: &[usize], grid_size: usize, r: f64) -> Result<EqualStepsReport> {
    let grid = AtomicMeasure::uniform_grid(grid_size);
    let rows = ns
        .par_iter()
        .map(|&n| {
            let mu = AtomicMeasure::equal_steps(n);
            let v_below = if n > 1 { optimal_quantizer_dp(&mu, n - 1, r)?.error } else { f64::NAN };
            let v_at_or_above = (n..n + 3)
                .map(|m| optimal_quantizer_dp(&mu, m, r).map(|q| q.error))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Ok(EqualStepsRow {
                n,
                w1: w1_distance(&mu, &grid),
                v_below,
                v_at_or_above,
                dimension: if v_at_or_above == 0.0 { 0.0 } else { f64::NAN },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let w1_monotone = rows.windows(2).all(|p| p[1].w1 <= p[0].w1);
    Ok(EqualStepsReport { r, grid_size, rows, w1_monotone })
}
