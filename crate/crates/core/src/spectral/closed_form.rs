use crate::root::bisect;
use crate::{Error, Result};

const S_TOL: f64 = 1e-15;

/// Solves `Σ (p_i c_i^r)^s = 1` for `s ∈ (0, 1)` and returns
/// `σ = r s / (1 − s)`, the quantization dimension of a self-similar
/// measure.
pub fn closed_form_sigma(probs: &[f64], ratios: &[f64], r: f64) -> Result<f64> {
    if probs.len() != ratios.len() || probs.is_empty() {
        return Err(Error::Model("probs and ratios must be nonempty and equally long".into()));
    }
    if !(r > 0.0) {
        return Err(Error::Model(format!("r must be positive, got {r}")));
    }
    if (probs.iter().sum::<f64>() - 1.0).abs() > 1e-12 || probs.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::Model("probs must be a probability vector".into()));
    }
    if ratios.iter().any(|&c| !(c > 0.0 && c < 1.0)) {
        return Err(Error::Model("contraction ratios must lie in (0, 1)".into()));
    }
    if probs.len() == 1 {
        return Ok(0.0);
    }
    let logs: Vec<f64> = probs
        .iter()
        .zip(ratios)
        .map(|(&p, &c)| p.ln() + r * c.ln())
        .collect();
    // g(0) = N > 1 and g(1) = Σ p_i c_i^r < 1; g is strictly decreasing
    let g = |s: f64| logs.iter().map(|&l| (s * l).exp()).sum::<f64>() - 1.0;
    let b = bisect(g, 0.0, 1.0, S_TOL)?;
    Ok(super::sigma_from_exponent(b.root, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_cantor_is_r_independent() {
        let target = 2f64.ln() / 3f64.ln();
        for r in [0.5, 1.0, 2.0, 7.0] {
            let s = closed_form_sigma(&[0.5, 0.5], &[1.0 / 3.0, 1.0 / 3.0], r).unwrap();
            assert!((s - target).abs() < 1e-12, "r={r}: {s}");
        }
    }

    #[test]
    fn halving_family() {
        for n in [2u32, 4, 8, 16] {
            let c = 1.0 / (2.0 * n as f64);
            let s = closed_form_sigma(&[0.5, 0.5], &[c, c], 2.0).unwrap();
            let expect = 2f64.ln() / (2f64.ln() + (n as f64).ln());
            assert!((s - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(closed_form_sigma(&[0.6, 0.6], &[0.3, 0.3], 1.0).is_err());
        assert!(closed_form_sigma(&[0.5, 0.5], &[1.2, 0.3], 1.0).is_err());
        assert!(closed_form_sigma(&[0.5, 0.5], &[0.3, 0.3], 0.0).is_err());
    }
}
