use serde::Serialize;

use crate::quantizer::dp_sweep;
use crate::{AtomicMeasure, Error, Result};

/// Points with `V` below this are dropped from the fit.
const V_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// root mean square of the residuals
    pub residual: f64,
}

/// Ordinary least squares `y ≈ slope · x + intercept`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Estimation("need at least two paired points".into()));
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Estimation("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Ok(LineFit { slope, intercept, residual: (ss / k).sqrt() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub r: f64,
    /// fitted `D_r`
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub n_range: (usize, usize),
    /// `(n, V_{n,r})` for every requested `n`
    pub trace: Vec<(usize, f64)>,
}

impl DimensionEstimate {
    /// CSV `n,V,e,nV_pow` with `nV_pow = n · V^{D/r}` at the fitted slope.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "V", "e", "nV_pow"])?;
        for &(n, v) in &self.trace {
            w.write_record([
                n.to_string(),
                v.to_string(),
                v.powf(1.0 / self.r).to_string(),
                (n as f64 * v.powf(self.slope / self.r)).to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

/// Least-squares slope of `r log n` against `−log V_{n,r}` over `n_list`,
/// with `V` from the exact DP.
pub fn empirical_dimension(mu: &AtomicMeasure, r: f64, n_list: &[usize]) -> Result<DimensionEstimate> {
    if n_list.is_empty() || n_list.windows(2).any(|p| p[1] <= p[0]) || n_list[0] == 0 {
        return Err(Error::Estimation("n_list must be positive and strictly increasing".into()));
    }
    let n_max = *n_list.last().unwrap();
    if n_max >= mu.len() {
        return Err(Error::Estimation(format!(
            "quantization error is zero for n = {n_max} >= support size {}",
            mu.len()
        )));
    }
    if 2 * n_max > mu.len() {
        return Err(Error::Estimation(format!(
            "atomic approximation too coarse: 2 * {n_max} exceeds support size {}",
            mu.len()
        )));
    }
    let sweep = dp_sweep(mu, n_max, r)?;
    let trace: Vec<(usize, f64)> = n_list.iter().map(|&n| (n, sweep[n - 1].error)).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = trace
        .iter()
        .filter(|&&(_, v)| v >= V_FLOOR)
        .map(|&(n, v)| (-v.ln(), r * (n as f64).ln()))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::Estimation(format!(
            "only {} usable points (V >= {V_FLOOR:e})",
            xs.len()
        )));
    }
    let fit = fit_slope(&xs, &ys)?;
    Ok(DimensionEstimate {
        r,
        slope: fit.slope,
        intercept: fit.intercept,
        residual: fit.residual,
        n_range: (n_list[0], n_max),
        trace,
    })
}
