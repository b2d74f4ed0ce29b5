use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ifs::word::level_count;
use crate::ifs::{IfsModel, Word, DEFAULT_WORD_CAP};
use crate::{Error, Result};

/// Per-depth maxima of the sampled distortion ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DepthDistortion {
    pub depth: usize,
    pub words: usize,
    pub subsampled: bool,
    /// max over words of `T_w / R_w`
    pub max_t_over_r: f64,
    /// max over words and mesh pairs of the chord-to-derivative ratio,
    /// taken in both directions
    pub c2: f64,
}

/// Sampled estimates of the bounded-distortion constants `C₁`, `C₂` and
/// `M = C₂²`. They are lower estimates of the true suprema, never
/// certified bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionReport {
    pub c1_estimate: f64,
    pub c2_estimate: f64,
    pub m_estimate: f64,
    pub per_depth: Vec<DepthDistortion>,
    pub mesh_size: usize,
    pub seed: u64,
    pub notices: Vec<String>,
}

impl DistortionReport {
    /// `C₂` inflated by [`CONSTANT_SLACK`](crate::ifs::CONSTANT_SLACK).
    pub fn c2_slack(&self) -> f64 {
        self.c2_estimate * crate::ifs::CONSTANT_SLACK
    }

    /// `M` built from the inflated `C₂`.
    pub fn m_slack(&self) -> f64 {
        self.c2_slack().powi(2)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// CSV `depth,maxT_over_R,c2`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["depth", "maxT_over_R", "c2"])?;
        for d in &self.per_depth {
            w.write_record([
                d.depth.to_string(),
                format!("{:e}", d.max_t_over_r),
                format!("{:e}", d.c2),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

/// Scans all words up to `max_depth` (uniformly subsampling any level with
/// more than the default cap of words) and all ordered mesh pairs.
pub fn distortion_report(model: &IfsModel, max_depth: usize, mesh_size: usize) -> Result<DistortionReport> {
    distortion_report_seeded(model, max_depth, mesh_size, DEFAULT_WORD_CAP, 0x5eed)
}

pub fn distortion_report_seeded(
    model: &IfsModel,
    max_depth: usize,
    mesh_size: usize,
    cap: usize,
    seed: u64,
) -> Result<DistortionReport> {
    if max_depth < 1 {
        return Err(Error::Model("max_depth must be at least 1".into()));
    }
    if mesh_size < 2 {
        return Err(Error::Model("mesh_size must be at least 2".into()));
    }
    let mesh = model.domain().mesh(mesh_size);
    let n = model.len();
    let mut per_depth = Vec::with_capacity(max_depth);
    let mut notices = Vec::new();
    for depth in 1..=max_depth {
        let count = level_count(n, depth);
        let (words, subsampled): (Vec<Word>, bool) = match count {
            Some(c) if c <= cap => ((0..c).map(|k| Word::from_index(k, depth, n)).collect(), false),
            _ => {
                let c = count.unwrap_or(usize::MAX);
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (depth as u64).wrapping_mul(0x9e37_79b9));
                let mut idx = sample(&mut rng, c, cap).into_vec();
                idx.sort_unstable();
                notices.push(format!(
                    "depth {depth}: {cap} of {c} words sampled uniformly (seed {seed})"
                ));
                (idx.into_iter().map(|k| Word::from_index(k, depth, n)).collect(), true)
            }
        };
        let per_word: Vec<(f64, f64)> = words
            .par_iter()
            .map(|w| {
                let b = model.bounds_on(w, &mesh);
                let mut c2 = 1.0f64;
                for (i, &x) in mesh.iter().enumerate() {
                    let dfx = model.df_word(w, x);
                    for (j, &y) in mesh.iter().enumerate() {
                        if i == j {
                            continue;
                        }
                        let g = model.chord_word(w, x, y) / dfx;
                        c2 = c2.max(g).max(1.0 / g);
                    }
                }
                (b.t / b.r, c2)
            })
            .collect();
        let (max_tr, c2) = per_word
            .iter()
            .fold((1.0f64, 1.0f64), |(a, b), &(tr, c)| (a.max(tr), b.max(c)));
        per_depth.push(DepthDistortion {
            depth,
            words: words.len(),
            subsampled,
            max_t_over_r: max_tr,
            c2,
        });
    }
    let c1 = per_depth.iter().map(|d| d.max_t_over_r).fold(1.0, f64::max);
    let c2 = per_depth.iter().map(|d| d.c2).fold(c1, f64::max);
    Ok(DistortionReport {
        c1_estimate: c1,
        c2_estimate: c2,
        m_estimate: c2 * c2,
        per_depth,
        mesh_size,
        seed,
        notices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn similitudes_have_no_distortion() {
        let rep = distortion_report(&IfsModel::cantor(), 6, 17).unwrap();
        assert!((rep.c1_estimate - 1.0).abs() < 1e-12);
        assert!((rep.c2_estimate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deeper_scan_dominates_shallow() {
        let m = IfsModel::moebius_pair();
        let a = distortion_report(&m, 1, 17).unwrap();
        let b = distortion_report(&m, 8, 17).unwrap();
        assert!(a.c1_estimate <= b.c1_estimate);
        assert!(a.c2_estimate <= b.c2_estimate);
        assert!(b.c2_estimate >= b.c1_estimate);
    }

    #[test]
    fn moebius_distortion_plateaus() {
        let rep = distortion_report(&IfsModel::moebius_pair(), 8, 17).unwrap();
        let at4 = rep.per_depth[..4].iter().map(|d| d.max_t_over_r).fold(1.0, f64::max);
        assert!(rep.c1_estimate <= at4 * 1.01, "{} vs {}", rep.c1_estimate, at4);
        assert!(rep.c1_estimate.is_finite() && rep.c1_estimate > 1.0);
    }

    #[test]
    fn subsampling_is_noted_and_deterministic() {
        let m = IfsModel::moebius_pair();
        let a = distortion_report_seeded(&m, 6, 9, 16, 7).unwrap();
        let b = distortion_report_seeded(&m, 6, 9, 16, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.per_depth[5].subsampled);
        assert!(!a.notices.is_empty());
    }

    #[test]
    fn csv_has_expected_header() {
        let rep = distortion_report(&IfsModel::cantor(), 2, 5).unwrap();
        let csv = rep.to_csv().unwrap();
        assert!(csv.starts_with("depth,maxT_over_R,c2\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
