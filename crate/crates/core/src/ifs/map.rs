use serde::{Deserialize, Serialize};

use crate::ifs::Interval;
use crate::{Error, Result};

/// One contraction of the system. Both kinds are infinitesimal similitudes
/// whose derivative modulus has a closed form and is monotone on any
/// interval free of poles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MapDescriptor {
    /// `x ↦ a x + b`
    Affine { a: f64, b: f64 },
    /// `x ↦ (a x + b) / (c x + d)`
    Moebius { a: f64, b: f64, c: f64, d: f64 },
}

impl MapDescriptor {
    pub fn affine(a: f64, b: f64) -> Self {
        MapDescriptor::Affine { a, b }
    }

    pub fn moebius(a: f64, b: f64, c: f64, d: f64) -> Self {
        MapDescriptor::Moebius { a, b, c, d }
    }

    /// Image of `x` without any domain check.
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            MapDescriptor::Affine { a, b } => a * x + b,
            MapDescriptor::Moebius { a, b, c, d } => (a * x + b) / (c * x + d),
        }
    }

    /// `|f'(x)|` without any check.
    #[inline]
    pub fn df(&self, x: f64) -> f64 {
        match *self {
            MapDescriptor::Affine { a, .. } => a.abs(),
            MapDescriptor::Moebius { a, b, c, d } => {
                let den = c * x + d;
                (a * d - b * c).abs() / (den * den)
            }
        }
    }

    /// `|f(x) − f(y)| / |x − y|`, evaluated in factored form so that
    /// nearby points do not cancel. Equals `df(x)` when `x == y`.
    #[inline]
    pub fn chord(&self, x: f64, y: f64) -> f64 {
        match *self {
            MapDescriptor::Affine { a, .. } => a.abs(),
            MapDescriptor::Moebius { a, b, c, d } => {
                (a * d - b * c).abs() / ((c * x + d) * (c * y + d)).abs()
            }
        }
    }

    /// Location of the pole of a Möbius map, if it has one.
    pub fn pole(&self) -> Option<f64> {
        match *self {
            MapDescriptor::Moebius { c, d, .. } if c != 0.0 => Some(-d / c),
            _ => None,
        }
    }

    pub fn is_similitude(&self) -> bool {
        matches!(self, MapDescriptor::Affine { .. })
    }

    /// Model-level sanity: nonzero determinant and no pole in `domain`.
    pub fn check_on(&self, domain: Interval) -> Result<()> {
        match *self {
            MapDescriptor::Affine { a, b } => {
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::Model("affine coefficients must be finite".into()));
                }
            }
            MapDescriptor::Moebius { a, b, c, d } => {
                if ![a, b, c, d].iter().all(|v| v.is_finite()) {
                    return Err(Error::Model("moebius coefficients must be finite".into()));
                }
                if a * d - b * c == 0.0 {
                    return Err(Error::Model("moebius map has ad - bc = 0".into()));
                }
                if c == 0.0 && d == 0.0 {
                    return Err(Error::Model("moebius map has c = d = 0".into()));
                }
                if let Some(p) = self.pole() {
                    if p >= domain.lo && p <= domain.hi {
                        return Err(Error::Model(format!(
                            "moebius pole at {p} lies inside the domain"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Checked evaluation on `domain`.
    pub fn eval_map(&self, domain: Interval, x: f64) -> Result<f64> {
        domain.require(x)?;
        self.check_on(domain)?;
        Ok(self.apply(x))
    }

    /// Checked derivative modulus on `domain`; zero is a degeneracy.
    pub fn eval_df(&self, domain: Interval, x: f64) -> Result<f64> {
        domain.require(x)?;
        self.check_on(domain)?;
        let v = self.df(x);
        if !(v > 0.0) {
            return Err(Error::Degenerate { x });
        }
        Ok(v)
    }
}
