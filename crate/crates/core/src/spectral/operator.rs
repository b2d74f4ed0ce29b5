use serde::Serialize;

use crate::ifs::{IfsModel, Interval};
use crate::{Error, Result};

/// Uniform collocation grid over the domain, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    domain: Interval,
    points: Vec<f64>,
    spacing: f64,
}

impl Mesh {
    pub fn new(domain: Interval, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Model("mesh needs at least 2 points".into()));
        }
        Ok(Mesh {
            domain,
            points: domain.mesh(m),
            spacing: domain.width() / (m - 1) as f64,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Bracketing index `k` and weight `t` with `y = (1−t) x_k + t x_{k+1}`.
    fn locate(&self, y: f64) -> Option<(usize, f64)> {
        if !self.domain.contains(y) {
            return None;
        }
        let m = self.points.len();
        let pos = ((y - self.domain.lo) / self.spacing).clamp(0.0, (m - 1) as f64);
        let k = (pos.floor() as usize).min(m - 2);
        let t = ((y - self.points[k]) / (self.points[k + 1] - self.points[k])).clamp(0.0, 1.0);
        Some((k, t))
    }
}

/// Values of a function at the mesh points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshFunction(pub Vec<f64>);

impl MeshFunction {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Square nonnegative matrix in compressed row form.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    size: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl OperatorMatrix {
    /// Builds from dense rows, dropping zeros. Rejects negative or
    /// non-finite entries and rows without a positive entry.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        let mut row_start = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for (j, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::Model("matrix must be square".into()));
            }
            for (k, &v) in row.iter().enumerate() {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::Model(format!("entry ({j}, {k}) = {v} is not a finite nonnegative number")));
                }
                if v > 0.0 {
                    cols.push(k);
                    vals.push(v);
                }
            }
            if cols.len() == *row_start.last().unwrap() {
                return Err(Error::Model(format!("row {j} has no positive entry")));
            }
            row_start.push(cols.len());
        }
        Ok(OperatorMatrix { size, row_start, cols, vals })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn row(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_start[j]..self.row_start[j + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.size).map(|j| self.row(j).map(|(_, v)| v).sum()).collect()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.size)
            .map(|j| self.row(j).map(|(k, a)| a * v[k]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.size)
            .map(|j| {
                let mut row = vec![0.0; self.size];
                for (k, a) in self.row(j) {
                    row[k] += a;
                }
                row
            })
            .collect()
    }
}

/// Discretization of `(L_{σ,r}Φ)(x) = Σ_i (p_i (Df_i)(x)^r)^{σ/(r+σ)} Φ(f_i(x))`
/// at the mesh points, with `Φ(f_i(x_j))` linearly interpolated between the
/// two mesh points that bracket `f_i(x_j)`.
pub fn assemble_operator(model: &IfsModel, mesh: &Mesh, sigma: f64, r: f64) -> Result<OperatorMatrix> {
    if !(sigma >= 0.0) || !(r > 0.0) {
        return Err(Error::Model(format!("need sigma >= 0 and r > 0, got {sigma}, {r}")));
    }
    let s = super::exponent(sigma, r);
    let m = mesh.len();
    let mut row_start = Vec::with_capacity(m + 1);
    let mut cols = Vec::with_capacity(2 * m * model.len());
    let mut vals = Vec::with_capacity(2 * m * model.len());
    row_start.push(0);
    for &x in mesh.points() {
        for (map, &p) in model.maps().iter().zip(model.probs()) {
            let coef = (p * map.df(x).powf(r)).powf(s);
            let y = map.apply(x);
            let (k, t) = mesh.locate(y).ok_or_else(|| {
                Error::Model(format!("f({x}) = {y} leaves the mesh; the model does not map the domain into itself"))
            })?;
            if t < 1.0 {
                cols.push(k);
                vals.push(coef * (1.0 - t));
            }
            if t > 0.0 {
                cols.push(k + 1);
                vals.push(coef * t);
            }
        }
        row_start.push(cols.len());
    }
    Ok(OperatorMatrix { size: m, row_start, cols, vals })
}
