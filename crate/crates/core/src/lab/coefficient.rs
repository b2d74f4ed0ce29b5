use serde::Serialize;

use crate::quantizer::dp_sweep;
use crate::{AtomicMeasure, Error, Result};

/// The sequence `n · V_{n,r}^{s/r}` over a range of `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTrace {
    pub r: f64,
    pub s: f64,
    /// `(n, V_{n,r}, n · V_{n,r}^{s/r})`
    pub entries: Vec<(usize, f64, f64)>,
    pub min: f64,
    pub max: f64,
}

impl CoefficientTrace {
    pub fn ratio(&self) -> f64 {
        self.max / self.min
    }

    /// Least-squares slope of `log(n V^{s/r})` against `log n`; positive
    /// when the coefficient grows with `n`.
    pub fn log_slope(&self) -> f64 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .entries
            .iter()
            .map(|&(n, _, c)| ((n as f64).ln(), c.ln()))
            .unzip();
        super::fit_slope(&xs, &ys).map(|f| f.slope).unwrap_or(f64::NAN)
    }

    /// CSV `n,V,e,nV_pow`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "V", "e", "nV_pow"])?;
        for &(n, v, c) in &self.entries {
            w.write_record([
                n.to_string(),
                v.to_string(),
                v.powf(1.0 / self.r).to_string(),
                c.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

pub fn coefficient_trace(mu: &AtomicMeasure, r: f64, s: f64, n_list: &[usize]) -> Result<CoefficientTrace> {
    if n_list.is_empty() || n_list.windows(2).any(|p| p[1] <= p[0]) || n_list[0] == 0 {
        return Err(Error::Estimation("n_list must be positive and strictly increasing".into()));
    }
    let n_max = *n_list.last().unwrap();
    let sweep = dp_sweep(mu, n_max, r)?;
    let entries: Vec<(usize, f64, f64)> = n_list
        .iter()
        .map(|&n| {
            let v = sweep[n - 1].error;
            (n, v, n as f64 * v.powf(s / r))
        })
        .collect();
    let min = entries.iter().map(|e| e.2).fold(f64::INFINITY, f64::min);
    let max = entries.iter().map(|e| e.2).fold(f64::NEG_INFINITY, f64::max);
    Ok(CoefficientTrace { r, s, entries, min, max })
}
