use crate::ifs::{IfsModel, Word, DEFAULT_WORD_CAP};
use crate::{Error, Result};

const MAX_ANTICHAIN_DEPTH: usize = 200;

/// Why a word set is, or is not, a finite maximal antichain.
#[derive(Debug, Clone, PartialEq)]
pub enum AntichainCertificate {
    Valid,
    Empty,
    SymbolOutOfRange { word: Word },
    PrefixViolation { prefix: Word, extension: Word },
    MassGap { gap: f64 },
}

impl AntichainCertificate {
    pub fn is_valid(&self) -> bool {
        matches!(self, AntichainCertificate::Valid)
    }
}

/// A prefix-free word set whose weights sum to one covers every infinite
/// sequence exactly once.
pub fn verify_antichain(words: &[Word], probs: &[f64]) -> AntichainCertificate {
    if words.is_empty() {
        return AntichainCertificate::Empty;
    }
    if let Some(w) = words
        .iter()
        .find(|w| w.is_empty() || w.symbols().iter().any(|&s| s >= probs.len()))
    {
        return AntichainCertificate::SymbolOutOfRange { word: w.clone() };
    }
    // after sorting, any prefix relation shows up between neighbours
    // once duplicates and chains are considered
    let mut sorted: Vec<&Word> = words.iter().collect();
    sorted.sort();
    for pair in sorted.windows(2) {
        if pair[0].is_prefix_of(pair[1]) {
            return AntichainCertificate::PrefixViolation {
                prefix: pair[0].clone(),
                extension: pair[1].clone(),
            };
        }
    }
    let mass: f64 = sorted.iter().map(|w| w.weight(probs)).sum();
    let gap = 1.0 - mass;
    if gap.abs() > 1e-12 {
        return AntichainCertificate::MassGap { gap };
    }
    AntichainCertificate::Valid
}

/// `Λ(c′) = { w : (p_w T_w^r)^s < c′ ≤ (p_{w*} T_{w*}^r)^s }`, with the
/// empty word valued 1. Words come out in lexicographic order.
pub fn antichain_threshold(
    model: &IfsModel,
    r: f64,
    s: f64,
    cprime: f64,
    mesh_size: usize,
) -> Result<Vec<Word>> {
    if !(cprime > 0.0 && cprime < 1.0) {
        return Err(Error::Model(format!("c' must lie in (0, 1), got {cprime}")));
    }
    if !(s > 0.0 && s < 1.0) || !(r > 0.0) {
        return Err(Error::Model(format!("need r > 0 and s in (0, 1), got r={r}, s={s}")));
    }
    let mesh = model.domain().mesh(mesh_size.max(2));
    let value = |w: &Word| {
        let b = model.bounds_on(w, &mesh);
        (w.weight(model.probs()) * b.t.powf(r)).powf(s)
    };
    let mut out = Vec::new();
    let mut stack = vec![Word::empty()];
    while let Some(w) = stack.pop() {
        if w.len() >= MAX_ANTICHAIN_DEPTH {
            return Err(Error::Resource(format!(
                "antichain search passed depth {MAX_ANTICHAIN_DEPTH}"
            )));
        }
        // children pushed in reverse so the pop order is lexicographic
        for sym in (0..model.len()).rev() {
            let child = w.child(sym);
            if value(&child) < cprime {
                out.push(child);
            } else {
                stack.push(child);
            }
        }
        if out.len() > DEFAULT_WORD_CAP {
            return Err(Error::Resource("antichain exceeds the word cap".into()));
        }
    }
    out.sort();
    Ok(out)
}
