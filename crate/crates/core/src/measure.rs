//! Finite atomic approximations of the invariant measure and the
//! Wasserstein-1 distance between measures on the line.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ifs::{IfsModel, DEFAULT_WORD_CAP};
use crate::{Error, Result};

/// Atoms closer than this are merged.
pub const MERGE_TOL: f64 = 1e-14;
const MASS_TOL: f64 = 1e-10;

/// Probability measure with finitely many atoms, kept sorted and merged.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl AtomicMeasure {
    /// Sorts, merges coincident atoms and checks the total mass.
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::Model("atoms and weights differ in length".into()));
        }
        if atoms.is_empty() {
            return Err(Error::Model("measure has no atoms".into()));
        }
        if let Some(&x) = atoms.iter().find(|x| !x.is_finite()) {
            return Err(Error::Model(format!("non-finite atom {x}")));
        }
        if let Some(&w) = weights.iter().find(|&&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::Model(format!("weight {w} is not strictly positive")));
        }
        let mut pairs: Vec<(f64, f64)> = atoms.into_iter().zip(weights).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged_atoms: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut merged_weights: Vec<f64> = Vec::with_capacity(pairs.len());
        for (x, w) in pairs {
            match merged_atoms.last() {
                Some(&last) if x - last <= MERGE_TOL => {
                    *merged_weights.last_mut().unwrap() += w;
                }
                _ => {
                    merged_atoms.push(x);
                    merged_weights.push(w);
                }
            }
        }
        let total: f64 = merged_weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Model(format!("weights sum to {total}, not 1")));
        }
        Ok(AtomicMeasure {
            atoms: merged_atoms,
            weights: merged_weights,
        })
    }

    pub fn dirac(x: f64) -> Self {
        AtomicMeasure { atoms: vec![x], weights: vec![1.0] }
    }

    /// Equal weights on the given points.
    pub fn uniform_on(points: Vec<f64>) -> Result<Self> {
        let w = 1.0 / points.len() as f64;
        let n = points.len();
        AtomicMeasure::new(points, vec![w; n])
    }

    /// `k` equal atoms at the cell midpoints `(j + 1/2)/k` of `[0, 1]`: the
    /// discretization of Lebesgue measure used throughout.
    pub fn uniform_grid(k: usize) -> Self {
        let pts = (0..k).map(|j| (j as f64 + 0.5) / k as f64).collect();
        AtomicMeasure::uniform_on(pts).expect("grid is valid")
    }

    /// `(1/n) Σ_{i=1}^n δ_{i/n}`.
    pub fn equal_steps(n: usize) -> Self {
        let pts = (1..=n).map(|i| i as f64 / n as f64).collect();
        AtomicMeasure::uniform_on(pts).expect("steps are valid")
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().copied().zip(self.weights.iter().copied())
    }

    /// `Σ p_i μ∘f_i^{-1}`: every atom mapped through each `f_i` with its
    /// weight scaled by `p_i`.
    pub fn pushforward(&self, model: &IfsModel) -> Result<AtomicMeasure> {
        let mut atoms = Vec::with_capacity(self.len() * model.len());
        let mut weights = Vec::with_capacity(self.len() * model.len());
        for (map, &p) in model.maps().iter().zip(model.probs()) {
            for (x, w) in self.iter() {
                atoms.push(map.apply(x));
                weights.push(p * w);
            }
        }
        AtomicMeasure::new(atoms, weights)
    }

    /// CSV with header `atom,weight`, atoms ascending.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["atom", "weight"])?;
        for (x, p) in self.iter() {
            w.write_record([x.to_string(), p.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            atom: f64,
            weight: f64,
        }
        let mut rdr = csv::Reader::from_reader(input);
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        for row in rdr.deserialize() {
            let row: Row = row?;
            atoms.push(row.atom);
            weights.push(row.weight);
        }
        AtomicMeasure::new(atoms, weights)
    }
}

/// Chaos-game sampler settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub burn_in: usize,
    pub samples: usize,
}

/// `Σ_{|w|=depth} p_w δ_{f_w(anchor)}`.
pub fn invariant_atoms(model: &IfsModel, depth: usize, anchor: f64) -> Result<AtomicMeasure> {
    model.domain().require(anchor)?;
    let n = model.len();
    let total = (0..depth).try_fold(1usize, |acc, _| acc.checked_mul(n));
    if total.is_none_or(|t| t > DEFAULT_WORD_CAP) {
        return Err(Error::Resource(format!(
            "{n}^{depth} atoms exceed the cap of {DEFAULT_WORD_CAP}"
        )));
    }
    // level k+1 atoms are f_i applied to level k atoms; as a multiset this
    // equals { f_w(anchor) : |w| = k+1 } with weights p_w
    let mut atoms = vec![anchor];
    let mut weights = vec![1.0];
    for _ in 0..depth {
        let mut next_atoms = Vec::with_capacity(atoms.len() * n);
        let mut next_weights = Vec::with_capacity(atoms.len() * n);
        for (map, &p) in model.maps().iter().zip(model.probs()) {
            for (&x, &w) in atoms.iter().zip(&weights) {
                next_atoms.push(map.apply(x));
                next_weights.push(p * w);
            }
        }
        atoms = next_atoms;
        weights = next_weights;
    }
    AtomicMeasure::new(atoms, weights)
}

/// [`invariant_atoms`] anchored at the domain midpoint.
pub fn invariant_atoms_mid(model: &IfsModel, depth: usize) -> Result<AtomicMeasure> {
    invariant_atoms(model, depth, model.domain().midpoint())
}

/// Empirical measure of a random orbit started at the domain midpoint,
/// recorded after `burn_in` steps.
pub fn chaos_game(model: &IfsModel, config: SamplerConfig) -> Result<AtomicMeasure> {
    if config.samples == 0 {
        return Err(Error::Model("samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let cumulative: Vec<f64> = model
        .probs()
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let last = model.len() - 1;
    let pick = |rng: &mut ChaCha8Rng| {
        let u: f64 = rng.gen::<f64>() * cumulative[last];
        cumulative.iter().position(|&c| u < c).unwrap_or(last)
    };
    let mut x = model.domain().midpoint();
    for _ in 0..config.burn_in {
        x = model.maps()[pick(&mut rng)].apply(x);
    }
    let mut pts = Vec::with_capacity(config.samples);
    for _ in 0..config.samples {
        x = model.maps()[pick(&mut rng)].apply(x);
        pts.push(x);
    }
    AtomicMeasure::uniform_on(pts)
}

/// `∫ |F_μ − F_ν|`, exact for atomic measures.
pub fn w1_distance(mu: &AtomicMeasure, nu: &AtomicMeasure) -> f64 {
    let (a, b) = (mu, nu);
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut prev: Option<f64> = None;
    let mut total = 0.0;
    while i < a.len() || j < b.len() {
        let x = match (a.atoms.get(i), b.atoms.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        if let Some(p) = prev {
            total += (fa - fb).abs() * (x - p);
        }
        while i < a.len() && a.atoms[i] == x {
            fa += a.weights[i];
            i += 1;
        }
        while j < b.len() && b.atoms[j] == x {
            fb += b.weights[j];
            j += 1;
        }
        prev = Some(x);
    }
    total
}

/// `W1(μ, Σ p_i μ∘f_i^{-1})`.
pub fn self_similarity_residual(model: &IfsModel, mu: &AtomicMeasure) -> Result<f64> {
    Ok(w1_distance(mu, &mu.pushforward(model)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{Interval, MapDescriptor};

    #[test]
    fn merges_and_sorts() {
        let m = AtomicMeasure::new(vec![0.5, 0.1, 0.5], vec![0.25, 0.5, 0.25]).unwrap();
        assert_eq!(m.atoms(), &[0.1, 0.5]);
        assert_eq!(m.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn rejects_bad_mass() {
        assert!(AtomicMeasure::new(vec![0.0, 1.0], vec![0.5, 0.6]).is_err());
        assert!(AtomicMeasure::new(vec![0.0], vec![-1.0]).is_err());
    }

    #[test]
    fn cantor_depth_one() {
        let m = invariant_atoms(&IfsModel::cantor(), 1, 0.0).unwrap();
        assert_eq!(m.atoms(), &[0.0, 2.0 / 3.0]);
        assert_eq!(m.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn depth_zero_is_the_anchor() {
        let m = invariant_atoms(&IfsModel::cantor(), 0, 0.4).unwrap();
        assert_eq!(m, AtomicMeasure::dirac(0.4));
    }

    #[test]
    fn cantor_depth_twelve() {
        let m = invariant_atoms_mid(&IfsModel::cantor(), 12).unwrap();
        assert_eq!(m.len(), 4096);
        assert!(m.weights().iter().all(|&w| w == 2f64.powi(-12)));
        assert!(m.atoms().iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert!((m.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn halves_tree_is_the_midpoint_grid() {
        let m = invariant_atoms_mid(&IfsModel::binary_halves(), 8).unwrap();
        assert_eq!(m, AtomicMeasure::uniform_grid(256));
    }

    #[test]
    fn w1_basic_cases() {
        let d0 = AtomicMeasure::dirac(0.0);
        let d1 = AtomicMeasure::dirac(1.0);
        assert_eq!(w1_distance(&d0, &d1), 1.0);
        let mu = invariant_atoms_mid(&IfsModel::cantor(), 6).unwrap();
        assert_eq!(w1_distance(&mu, &mu), 0.0);
    }

    #[test]
    fn w1_of_equal_steps_to_lebesgue() {
        let grid = AtomicMeasure::uniform_grid(1 << 14);
        for n in [1usize, 2, 5, 10, 40] {
            let d = w1_distance(&AtomicMeasure::equal_steps(n), &grid);
            assert!((d - 0.5 / n as f64).abs() < 1e-3, "n={n}: {d}");
        }
    }

    #[test]
    fn fixed_point_measure_has_zero_residual() {
        let model = IfsModel::new(
            vec![MapDescriptor::affine(0.5, 0.25)],
            vec![1.0],
            Interval::unit(),
            None,
        )
        .unwrap();
        let mu = AtomicMeasure::dirac(0.5);
        assert!(self_similarity_residual(&model, &mu).unwrap() < 1e-12);
    }

    #[test]
    fn single_map_chaos_game_sits_on_the_fixed_point() {
        let model = IfsModel::new(
            vec![MapDescriptor::affine(0.5, 0.25)],
            vec![1.0],
            Interval::unit(),
            None,
        )
        .unwrap();
        let mu = chaos_game(&model, SamplerConfig { seed: 1, burn_in: 100, samples: 50 }).unwrap();
        assert!(mu.atoms().iter().all(|&x| (x - 0.5).abs() < 1e-6));
    }

    #[test]
    fn chaos_game_is_reproducible() {
        let cfg = SamplerConfig { seed: 42, burn_in: 10, samples: 1000 };
        let a = chaos_game(&IfsModel::cantor(), cfg).unwrap();
        let b = chaos_game(&IfsModel::cantor(), cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_round_trip() {
        let mu = invariant_atoms_mid(&IfsModel::moebius_pair(), 5).unwrap();
        let mut buf = Vec::new();
        mu.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"atom,weight\n"));
        let back = AtomicMeasure::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, mu);
    }
}
