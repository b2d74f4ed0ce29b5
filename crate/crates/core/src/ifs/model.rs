use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ValidationKind;
use crate::ifs::{MapDescriptor, Word};
use crate::{Error, Result};

/// Closed interval `[lo, hi]`; also used for the open components of a
/// SOSC set, where the endpoints are excluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Model(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub const fn unit() -> Self {
        Interval { lo: 0.0, hi: 1.0 }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        let eps = 1e-12 * self.width().max(1.0);
        x >= self.lo - eps && x <= self.hi + eps
    }

    pub fn contains_open(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub(crate) fn require(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain { x, lo: self.lo, hi: self.hi })
        }
    }

    /// `m` equally spaced points including both endpoints.
    pub fn mesh(&self, m: usize) -> Vec<f64> {
        assert!(m >= 2, "mesh needs at least two points");
        let step = self.width() / (m - 1) as f64;
        (0..m)
            .map(|k| if k == m - 1 { self.hi } else { self.lo + step * k as f64 })
            .collect()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// On-disk model document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub maps: Vec<MapDescriptor>,
    pub probs: Vec<f64>,
    pub domain: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sosc: Option<Vec<[f64; 2]>>,
}

/// Outcome of the strong open set condition audit for the declared `G`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SoscReport {
    pub holds: bool,
    pub reason: Option<String>,
}

/// An iterated function system with probability weights on a compact
/// interval, optionally carrying an open set `G` for the SOSC.
#[derive(Debug, Clone, PartialEq)]
pub struct IfsModel {
    maps: Vec<MapDescriptor>,
    probs: Vec<f64>,
    domain: Interval,
    sosc: Option<Vec<Interval>>,
}

const PROB_TOL: f64 = 1e-12;
const AUDIT_MESH: usize = 129;

impl IfsModel {
    /// Builds and validates a model.
    pub fn new(
        maps: Vec<MapDescriptor>,
        probs: Vec<f64>,
        domain: Interval,
        sosc: Option<Vec<Interval>>,
    ) -> Result<Self> {
        let model = IfsModel::unchecked(maps, probs, domain, sosc);
        model.validate()?;
        Ok(model)
    }

    /// Builds a model without validation. Degenerate limit systems (for
    /// instance constant maps) are representable this way.
    pub fn unchecked(
        maps: Vec<MapDescriptor>,
        probs: Vec<f64>,
        domain: Interval,
        sosc: Option<Vec<Interval>>,
    ) -> Self {
        IfsModel { maps, probs, domain, sosc }
    }

    /// Similitude system `x ↦ c_i x + b_i` on `[0, 1]` with `G = (0, 1)`.
    pub fn similitude(ratios: &[f64], offsets: &[f64], probs: &[f64]) -> Result<Self> {
        let maps = ratios
            .iter()
            .zip(offsets)
            .map(|(&a, &b)| MapDescriptor::affine(a, b))
            .collect();
        IfsModel::new(
            maps,
            probs.to_vec(),
            Interval::unit(),
            Some(vec![Interval::unit()]),
        )
    }

    /// Middle-thirds Cantor system with equal weights.
    pub fn cantor() -> Self {
        IfsModel::similitude(&[1.0 / 3.0, 1.0 / 3.0], &[0.0, 2.0 / 3.0], &[0.5, 0.5])
            .expect("cantor model is valid")
    }

    /// `{x/2, x/2 + 1/2}` with equal weights; its invariant measure is
    /// Lebesgue measure on `[0, 1]`.
    pub fn binary_halves() -> Self {
        IfsModel::similitude(&[0.5, 0.5], &[0.0, 0.5], &[0.5, 0.5])
            .expect("halves model is valid")
    }

    /// The nonlinear pair `{1/(x+2), 1/(x+3)}` on `[0, 1]`.
    pub fn moebius_pair() -> Self {
        IfsModel::new(
            vec![
                MapDescriptor::moebius(0.0, 1.0, 1.0, 2.0),
                MapDescriptor::moebius(0.0, 1.0, 1.0, 3.0),
            ],
            vec![0.5, 0.5],
            Interval::unit(),
            Some(vec![Interval::unit()]),
        )
        .expect("moebius pair is valid")
    }

    pub fn maps(&self) -> &[MapDescriptor] {
        &self.maps
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn sosc_set(&self) -> Option<&[Interval]> {
        self.sosc.as_deref()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// Contraction ratios when every map is affine.
    pub fn similitude_ratios(&self) -> Option<Vec<f64>> {
        self.maps
            .iter()
            .map(|m| match *m {
                MapDescriptor::Affine { a, .. } => Some(a.abs()),
                MapDescriptor::Moebius { .. } => None,
            })
            .collect()
    }

    /// Largest derivative modulus of any single map over the audit mesh.
    pub fn max_contraction(&self) -> f64 {
        let mesh = self.domain.mesh(AUDIT_MESH);
        self.maps
            .iter()
            .flat_map(|m| mesh.iter().map(move |&x| m.df(x)))
            .fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        use ValidationKind::*;
        if self.maps.is_empty() {
            return Err(Error::validation(Malformed, "model has no maps"));
        }
        if self.maps.len() != self.probs.len() {
            return Err(Error::validation(
                Malformed,
                format!(
                    "{} maps but {} probabilities",
                    self.maps.len(),
                    self.probs.len()
                ),
            ));
        }
        if let Some((i, p)) = self
            .probs
            .iter()
            .enumerate()
            .find(|(_, &p)| !(p > 0.0 && p.is_finite()))
        {
            return Err(Error::validation(
                Probability,
                format!("probability {} is not strictly positive ({p})", i + 1),
            ));
        }
        let total: f64 = self.probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::validation(
                Probability,
                format!("probabilities sum to {}", fmt_sum(total)),
            ));
        }
        let mesh = self.domain.mesh(AUDIT_MESH);
        for (i, map) in self.maps.iter().enumerate() {
            map.check_on(self.domain)
                .map_err(|e| Error::validation(Malformed, format!("map {}: {e}", i + 1)))?;
            let mut sup = 0.0f64;
            for &x in &mesh {
                let d = map.df(x);
                if !(d > 0.0) {
                    return Err(Error::validation(
                        NonContractive,
                        format!("map {} has vanishing derivative at {x}", i + 1),
                    ));
                }
                sup = sup.max(d);
            }
            if !(sup < 1.0) {
                return Err(Error::validation(
                    NonContractive,
                    format!("map {} is not a contraction", i + 1),
                ));
            }
            // both kinds are monotone on the domain, so endpoint images
            // bound the whole image
            for &x in &[self.domain.lo, self.domain.hi] {
                let y = map.apply(x);
                if !self.domain.contains(y) {
                    return Err(Error::validation(
                        DomainEscape,
                        format!(
                            "map {} sends {x} to {y}, outside the domain {}",
                            i + 1,
                            self.domain
                        ),
                    ));
                }
            }
        }
        if self.sosc.is_some() {
            let report = self.sosc_report();
            if !report.holds {
                return Err(Error::validation(
                    Sosc,
                    report.reason.unwrap_or_else(|| "SOSC fails".into()),
                ));
            }
        }
        Ok(())
    }

    /// Audits the declared open set: images `f_i(G) ⊆ G`, pairwise disjoint,
    /// and `G` meets the attractor.
    pub fn sosc_report(&self) -> SoscReport {
        let fail = |reason: String| SoscReport { holds: false, reason: Some(reason) };
        let Some(g) = self.sosc.as_ref() else {
            return fail("no open set declared".into());
        };
        if g.is_empty() {
            return fail("open set is empty".into());
        }
        for c in g {
            if !(c.lo < c.hi) || c.lo < self.domain.lo - 1e-12 || c.hi > self.domain.hi + 1e-12 {
                return fail(format!("component ({}, {}) is not inside the domain", c.lo, c.hi));
            }
        }
        // images of each component are open intervals since the maps are
        // monotone; degenerate images mean the map is not injective
        let mut images: Vec<(usize, f64, f64)> = Vec::new();
        for (i, map) in self.maps.iter().enumerate() {
            for c in g {
                let (u, v) = (map.apply(c.lo), map.apply(c.hi));
                let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
                if !(hi > lo) {
                    return fail(format!("image of G under map {} is degenerate", i + 1));
                }
                let tol = 1e-12;
                if !g.iter().any(|k| lo >= k.lo - tol && hi <= k.hi + tol) {
                    return fail(format!(
                        "map {} sends ({}, {}) outside G",
                        i + 1,
                        c.lo,
                        c.hi
                    ));
                }
                images.push((i, lo, hi));
            }
        }
        for (a, &(i, lo_a, hi_a)) in images.iter().enumerate() {
            for &(j, lo_b, hi_b) in &images[a + 1..] {
                if i != j && lo_a.max(lo_b) < hi_a.min(hi_b) - 1e-12 {
                    return fail(format!("images of G under maps {} and {} overlap", i + 1, j + 1));
                }
            }
        }
        let meets = self
            .attractor_sample(6)
            .iter()
            .any(|&x| g.iter().any(|c| c.contains_open(x)));
        if !meets {
            return fail("G does not meet the attractor".into());
        }
        SoscReport { holds: true, reason: None }
    }

    /// Points `f_w(x*)` for all words up to `depth`, where `x*` is the fixed
    /// point of the first map. All lie on the attractor.
    fn attractor_sample(&self, depth: usize) -> Vec<f64> {
        let mut x = self.domain.midpoint();
        for _ in 0..200 {
            x = self.maps[0].apply(x);
        }
        let mut level = vec![x];
        let mut all = level.clone();
        for _ in 0..depth {
            level = level
                .iter()
                .flat_map(|&y| self.maps.iter().map(move |m| m.apply(y)))
                .collect();
            all.extend_from_slice(&level);
        }
        all
    }

    /// Checked `f_i(x)`.
    pub fn eval_map(&self, i: usize, x: f64) -> Result<f64> {
        self.map(i)?.eval_map(self.domain, x)
    }

    /// Checked `(Df_i)(x)`.
    pub fn eval_df(&self, i: usize, x: f64) -> Result<f64> {
        self.map(i)?.eval_df(self.domain, x)
    }

    fn map(&self, i: usize) -> Result<&MapDescriptor> {
        self.maps
            .get(i)
            .ok_or_else(|| Error::Model(format!("no map with index {i}")))
    }

    /// `f_w(x) = f_{w_1}(f_{w_2}(… f_{w_n}(x)))`.
    pub fn apply_word(&self, w: &Word, x: f64) -> f64 {
        w.symbols()
            .iter()
            .rev()
            .fold(x, |y, &s| self.maps[s].apply(y))
    }

    /// `(Df_w)(x)` by the chain rule, right to left.
    pub fn df_word(&self, w: &Word, x: f64) -> f64 {
        let mut y = x;
        let mut acc = 1.0;
        for &s in w.symbols().iter().rev() {
            acc *= self.maps[s].df(y);
            y = self.maps[s].apply(y);
        }
        acc
    }

    /// Checked `(Df_w)(x)`.
    pub fn eval_df_word(&self, w: &Word, x: f64) -> Result<f64> {
        if w.is_empty() {
            return Err(Error::Model("empty word".into()));
        }
        self.check_word(w)?;
        self.domain.require(x)?;
        let v = self.df_word(w, x);
        if !(v > 0.0) {
            return Err(Error::Degenerate { x });
        }
        Ok(v)
    }

    /// `|f_w(x) − f_w(y)| / |x − y|` as a product of per-map chord quotients.
    pub fn chord_word(&self, w: &Word, x: f64, y: f64) -> f64 {
        let (mut u, mut v) = (x, y);
        let mut acc = 1.0;
        for &s in w.symbols().iter().rev() {
            let m = &self.maps[s];
            acc *= m.chord(u, v);
            u = m.apply(u);
            v = m.apply(v);
        }
        acc
    }

    pub(crate) fn check_word(&self, w: &Word) -> Result<()> {
        if let Some(&s) = w.symbols().iter().find(|&&s| s >= self.maps.len()) {
            return Err(Error::Model(format!(
                "symbol {} out of range for {} maps",
                s + 1,
                self.maps.len()
            )));
        }
        Ok(())
    }

    pub fn to_config(&self) -> ModelConfig {
        ModelConfig {
            maps: self.maps.clone(),
            probs: self.probs.clone(),
            domain: [self.domain.lo, self.domain.hi],
            sosc: self
                .sosc
                .as_ref()
                .map(|g| g.iter().map(|c| [c.lo, c.hi]).collect()),
        }
    }

    pub fn from_config(cfg: ModelConfig) -> Result<Self> {
        let domain = Interval::new(cfg.domain[0], cfg.domain[1])
            .map_err(|e| Error::validation(ValidationKind::Malformed, format!("domain: {e}")))?;
        let sosc = match cfg.sosc {
            None => None,
            Some(parts) => Some(
                parts
                    .into_iter()
                    .map(|[lo, hi]| Interval::new(lo, hi))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| {
                        Error::validation(ValidationKind::Malformed, format!("sosc: {e}"))
                    })?,
            ),
        };
        IfsModel::new(cfg.maps, cfg.probs, domain, sosc)
    }

    /// Parses and validates a JSON model document.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ModelConfig = serde_json::from_str(text).map_err(|e| {
            Error::validation(ValidationKind::Malformed, format!("malformed model document: {e}"))
        })?;
        IfsModel::from_config(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_config()).expect("model serializes")
    }
}

fn fmt_sum(x: f64) -> String {
    // 0.6 + 0.6 prints as 1.2 rather than 1.2000000000000002
    let short = format!("{:.12}", x);
    let trimmed = short.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_cantor_document() {
        let text = r#"{"maps":[{"kind":"affine","a":0.3333333333,"b":0.0},
            {"kind":"affine","a":0.3333333333,"b":0.6666666667}],
            "probs":[0.5,0.5],"domain":[0.0,1.0],"sosc":[[0.0,1.0]]}"#;
        let m = IfsModel::from_json(text).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.sosc_report().holds);
    }

    #[test]
    fn probability_sum_is_reported() {
        let text = r#"{"maps":[{"kind":"affine","a":0.3,"b":0.0},
            {"kind":"affine","a":0.3,"b":0.7}],"probs":[0.6,0.6],"domain":[0.0,1.0]}"#;
        let err = IfsModel::from_json(text).unwrap_err();
        match err {
            Error::Validation { kind, message } => {
                assert_eq!(kind, ValidationKind::Probability);
                assert_eq!(message, "probabilities sum to 1.2");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_contraction_is_reported() {
        let text = r#"{"maps":[{"kind":"affine","a":1.5,"b":0.0}],"probs":[1.0],"domain":[0.0,1.0]}"#;
        match IfsModel::from_json(text).unwrap_err() {
            Error::Validation { kind, message } => {
                assert_eq!(kind, ValidationKind::NonContractive);
                assert_eq!(message, "map 1 is not a contraction");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn domain_escape_is_reported() {
        let text = r#"{"maps":[{"kind":"affine","a":0.5,"b":0.7}],"probs":[1.0],"domain":[0.0,1.0]}"#;
        match IfsModel::from_json(text).unwrap_err() {
            Error::Validation { kind, .. } => assert_eq!(kind, ValidationKind::DomainEscape),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_document_names_position() {
        let err = IfsModel::from_json("{\"maps\": [\n  {\"kind\": \"affine\", \"a\": }]}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn overlapping_images_fail_sosc() {
        let m = IfsModel::unchecked(
            vec![MapDescriptor::affine(0.6, 0.0), MapDescriptor::affine(0.6, 0.4)],
            vec![0.5, 0.5],
            Interval::unit(),
            Some(vec![Interval::unit()]),
        );
        let rep = m.sosc_report();
        assert!(!rep.holds);
        assert!(rep.reason.unwrap().contains("overlap"));
    }

    #[test]
    fn constant_maps_fail_sosc() {
        let m = IfsModel::unchecked(
            vec![MapDescriptor::affine(0.0, 0.0), MapDescriptor::affine(0.0, 0.0)],
            vec![0.5, 0.5],
            Interval::unit(),
            Some(vec![Interval::unit()]),
        );
        assert!(!m.sosc_report().holds);
        assert!(m.validate().is_err());
    }

    #[test]
    fn moebius_pair_satisfies_sosc() {
        assert!(IfsModel::moebius_pair().sosc_report().holds);
    }

    #[test]
    fn chain_rule_by_hand() {
        let m = IfsModel::moebius_pair();
        let w = Word::new(vec![0, 0]);
        let v = m.eval_df_word(&w, 0.0).unwrap();
        assert!((v - 0.04).abs() < 1e-15);
    }

    #[test]
    fn mesh_has_exact_endpoints() {
        let mesh = Interval::new(-1.0, 2.0).unwrap().mesh(7);
        assert_eq!(mesh.len(), 7);
        assert_eq!(mesh[0], -1.0);
        assert_eq!(mesh[6], 2.0);
        assert!((mesh[3] - 0.5).abs() < 1e-15);
    }
}
