use serde::Serialize;

use crate::ifs::{Interval, MapDescriptor};

/// Chord-quotient spread at one probe point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeOutcome {
    pub x: f64,
    /// Per step: spread between the left, right and symmetric chord
    /// quotients.
    pub spreads: Vec<f64>,
    /// Per step: largest deviation of a chord quotient from the reference
    /// derivative modulus, when one is supplied.
    pub deviations: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilitudeCheck {
    pub steps: Vec<f64>,
    pub probes: Vec<ProbeOutcome>,
    pub all_converged: bool,
    pub max_deviation: f64,
}

/// Largest spread allowed at the finest step for a probe to count as
/// convergent.
const SPREAD_TOL: f64 = 1e-3;

/// Probes whether `f` behaves as an infinitesimal similitude: the chord
/// quotients `|f(u) − f(v)| / |u − v|` over shrinking pairs around each
/// probe must agree regardless of how the pair approaches the point.
pub fn check_infinitesimal_similitude<F, D>(
    f: F,
    reference_df: Option<D>,
    probes: &[f64],
    steps: &[f64],
) -> SimilitudeCheck
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    assert!(
        steps.windows(2).all(|p| p[1] < p[0]) && steps.iter().all(|&h| h > 0.0),
        "steps must be positive and strictly decreasing"
    );
    let q = |u: f64, v: f64| (f(u) - f(v)).abs() / (u - v).abs();
    let mut outcomes = Vec::with_capacity(probes.len());
    let mut max_dev = 0.0f64;
    for &x in probes {
        let mut spreads = Vec::with_capacity(steps.len());
        let mut deviations = Vec::new();
        for &h in steps {
            let quotients = [q(x, x + h), q(x - h, x), q(x - h, x + h)];
            let hi = quotients.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = quotients.iter().cloned().fold(f64::INFINITY, f64::min);
            spreads.push(hi - lo);
            if let Some(df) = reference_df.as_ref() {
                let d = df(x);
                let dev = quotients.iter().map(|v| (v - d).abs()).fold(0.0, f64::max);
                deviations.push(dev);
                max_dev = max_dev.max(dev);
            }
        }
        let converged = spreads.last().is_some_and(|&s| s <= SPREAD_TOL)
            && deviations.last().is_none_or(|&d| d <= SPREAD_TOL);
        outcomes.push(ProbeOutcome { x, spreads, deviations, converged });
    }
    SimilitudeCheck {
        steps: steps.to_vec(),
        all_converged: outcomes.iter().all(|p| p.converged),
        probes: outcomes,
        max_deviation: max_dev,
    }
}

/// [`check_infinitesimal_similitude`] for a model map, using its closed-form
/// derivative modulus as reference. Probes are pulled inward so that
/// `x ± h` stays in `domain`.
pub fn check_map(map: &MapDescriptor, domain: Interval, probes: &[f64], steps: &[f64]) -> SimilitudeCheck {
    let h0 = steps.first().copied().unwrap_or(0.0);
    let inner: Vec<f64> = probes
        .iter()
        .map(|&x| x.clamp(domain.lo + h0, domain.hi - h0))
        .collect();
    check_infinitesimal_similitude(|x| map.apply(x), Some(|x| map.df(x)), &inner, steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LADDER: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

    #[test]
    fn affine_chords_are_exact() {
        let f = MapDescriptor::affine(1.0 / 3.0, 2.0 / 3.0);
        let rep = check_map(&f, Interval::unit(), &[0.2, 0.5, 0.8], &LADDER);
        assert!(rep.all_converged);
        assert!(rep.max_deviation < 1e-12);
    }

    #[test]
    fn moebius_chords_converge() {
        let f = MapDescriptor::moebius(0.0, 1.0, 1.0, 2.0);
        let rep = check_map(&f, Interval::unit(), &[0.5], &LADDER);
        assert!(rep.all_converged);
        let last = *rep.probes[0].deviations.last().unwrap();
        assert!(last < 1e-4, "{last}");
    }

    #[test]
    fn absolute_value_is_flagged_at_zero() {
        let rep = check_infinitesimal_similitude(
            |x: f64| x.abs(),
            None::<fn(f64) -> f64>,
            &[0.0, 0.5],
            &LADDER,
        );
        assert!(!rep.probes[0].converged);
        assert!(rep.probes[1].converged);
        assert!(!rep.all_converged);
    }
}
