use std::fmt;

use rayon::prelude::*;

use crate::ifs::IfsModel;
use crate::{Error, Result};

/// Default cap on the number of words materialized at one level.
pub const DEFAULT_WORD_CAP: usize = 1 << 16;

/// Finite word over the map indices. Symbols are stored 0-based and
/// displayed 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(symbols: Vec<usize>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `w*`: the word with its last symbol dropped.
    pub fn parent(&self) -> Word {
        let mut s = self.0.clone();
        s.pop();
        Word(s)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut s = self.0.clone();
        s.extend_from_slice(&other.0);
        Word(s)
    }

    pub fn child(&self, symbol: usize) -> Word {
        let mut s = self.0.clone();
        s.push(symbol);
        Word(s)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// `p_w`, multiplied left to right.
    pub fn weight(&self, probs: &[f64]) -> f64 {
        self.0.iter().fold(1.0, |acc, &s| acc * probs[s])
    }

    /// The `k`-th word of length `n` in lexicographic order.
    pub fn from_index(mut k: usize, n: usize, alphabet: usize) -> Word {
        let mut s = vec![0; n];
        for slot in s.iter_mut().rev() {
            *slot = k % alphabet;
            k /= alphabet;
        }
        Word(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", s + 1)?;
        }
        write!(f, ")")
    }
}

/// `T_w = max Df_w` and `R_w = min Df_w` over the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WordBounds {
    pub t: f64,
    pub r: f64,
}

/// Number of words of length `n` over `alphabet` symbols, or `None` on
/// overflow.
pub(crate) fn level_count(alphabet: usize, n: usize) -> Option<usize> {
    let mut total: usize = 1;
    for _ in 0..n {
        total = total.checked_mul(alphabet)?;
    }
    Some(total)
}

impl IfsModel {
    /// All words of length `n` in lexicographic order, refusing more than
    /// `cap` of them.
    pub fn enumerate_words_capped(&self, n: usize, cap: usize) -> Result<Vec<Word>> {
        let count = level_count(self.len(), n)
            .filter(|&c| c <= cap)
            .ok_or_else(|| {
                Error::Resource(format!(
                    "{}^{} words exceed the cap of {cap}",
                    self.len(),
                    n
                ))
            })?;
        Ok((0..count).map(|k| Word::from_index(k, n, self.len())).collect())
    }

    pub fn enumerate_words(&self, n: usize) -> Result<Vec<Word>> {
        self.enumerate_words_capped(n, DEFAULT_WORD_CAP)
    }

    /// `(T_w, R_w)` as max/min of `Df_w` over a uniform mesh of the domain.
    /// Both map kinds have monotone derivative moduli, so the endpoints
    /// (always in the mesh) carry the extrema.
    pub fn word_bounds(&self, w: &Word, mesh_size: usize) -> Result<WordBounds> {
        if mesh_size < 2 {
            return Err(Error::Model("mesh_size must be at least 2".into()));
        }
        self.check_word(w)?;
        Ok(self.bounds_on(w, &self.domain().mesh(mesh_size)))
    }

    pub(crate) fn bounds_on(&self, w: &Word, mesh: &[f64]) -> WordBounds {
        let mut t = f64::NEG_INFINITY;
        let mut r = f64::INFINITY;
        for &x in mesh {
            let v = self.df_word(w, x);
            if v > t {
                t = v;
            }
            if v < r {
                r = v;
            }
        }
        WordBounds { t, r }
    }

    /// `(p_w, T_w, R_w)` for every word of length `n`, in lexicographic
    /// order. Computed in parallel; the output order is fixed.
    pub fn level_table(&self, n: usize, mesh_size: usize, cap: usize) -> Result<Vec<(f64, WordBounds)>> {
        let words = self.enumerate_words_capped(n, cap)?;
        let mesh = self.domain().mesh(mesh_size.max(2));
        Ok(words
            .par_iter()
            .map(|w| (w.weight(self.probs()), self.bounds_on(w, &mesh)))
            .collect())
    }
}
