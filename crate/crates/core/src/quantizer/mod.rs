//! Quantization errors `V_{n,r}`, `e_{n,r}` and the SOSC-constrained
//! `u_{n,r}` of atomic measures on the line.

mod constrained;
mod cost;
mod dp;
mod lloyd;
mod recursion;

use serde::Serialize;

pub use constrained::{constrained_error_u, optimal_constrained_dp, ConstrainedError};
pub use cost::SegmentCost;
pub use dp::{dp_sweep, optimal_quantizer_dp, optimal_quantizer_dp_full};
pub use lloyd::lloyd;
pub use recursion::{
    detect_n0, recursion_check_lower, recursion_check_upper, LowerRecursionReport,
    UpperRecursionReport,
};

use crate::{AtomicMeasure, Error, Result};

/// Sorted set of at most `n` codepoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Codebook(Vec<f64>);

impl Codebook {
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Model("codebook is empty".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Model("codebook has a non-finite point".into()));
        }
        points.sort_by(f64::total_cmp);
        Ok(Codebook(points))
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the nearest codepoint; ties go to the left one.
    pub fn nearest(&self, x: f64) -> usize {
        let p = &self.0;
        let k = p.partition_point(|&a| a < x);
        if k == 0 {
            0
        } else if k == p.len() {
            p.len() - 1
        } else if x - p[k - 1] <= p[k] - x {
            k - 1
        } else {
            k
        }
    }

    pub fn distance(&self, x: f64) -> f64 {
        (x - self.0[self.nearest(x)]).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    DpExact,
    Lloyd,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::DpExact => "dp_exact",
            Method::Lloyd => "lloyd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub restarts: usize,
    /// Set for Lloyd runs with `r < 1`, where no exact method is available.
    pub upper_bound_only: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantizationResult {
    pub n: usize,
    pub r: f64,
    /// `V_{n,r}` (or `u_{n,r}` for constrained runs)
    pub error: f64,
    pub codebook: Codebook,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl QuantizationResult {
    /// `e_{n,r} = V_{n,r}^{1/r}`.
    pub fn e(&self) -> f64 {
        self.error.powf(1.0 / self.r)
    }
}

/// `∫ d(x, A)^r dμ(x)`.
pub fn quant_error(mu: &AtomicMeasure, codebook: &Codebook, r: f64) -> f64 {
    mu.iter().map(|(x, w)| w * codebook.distance(x).powf(r)).sum()
}

/// CSV `n,r,V,e,method,codebook_json` for a sweep.
pub fn sweep_csv(results: &[QuantizationResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "r", "V", "e", "method", "codebook_json"])?;
    for q in results {
        w.write_record([
            q.n.to_string(),
            q.r.to_string(),
            q.error.to_string(),
            q.e().to_string(),
            q.method.as_str().to_string(),
            serde_json::to_string(q.codebook.points())?,
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}
