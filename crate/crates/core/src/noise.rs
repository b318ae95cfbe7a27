//! Insertion, deletion and replacement noise over a fixed alphabet.
//!
//! All inserted and substituted symbols come from the alphabet passed in the
//! spec, so a noisy word can still be read by a receptive transducer over
//! that alphabet.

use std::collections::BTreeSet;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NoiseError {
    #[error("invalid noise spec: {0}")]
    InvalidSpec(String),
    #[error("replacement needs at least two symbols in the alphabet")]
    AlphabetTooSmall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    InsertOrDelete,
    Replacement,
}

/// How much noise to apply and of which kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseSettings {
    pub kind: NoiseKind,
    /// Exact number of operations; overrides `noise_level` when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_symbols_change: Option<usize>,
    /// Fraction of the word length to change.
    pub noise_level: f64,
    /// Chance that an insert-or-delete operation inserts.
    pub prob_insert: f64,
}

impl Default for NoiseSettings {
    fn default() -> Self {
        NoiseSettings {
            kind: NoiseKind::InsertOrDelete,
            n_symbols_change: None,
            noise_level: 0.1,
            prob_insert: 0.5,
        }
    }
}

impl NoiseSettings {
    pub fn replacement() -> Self {
        NoiseSettings {
            kind: NoiseKind::Replacement,
            ..Default::default()
        }
    }

    pub fn with_level(mut self, level: f64) -> Self {
        self.noise_level = level;
        self
    }

    pub fn with_count(mut self, n: usize) -> Self {
        self.n_symbols_change = Some(n);
        self
    }

    pub fn with_prob_insert(mut self, p: f64) -> Self {
        self.prob_insert = p;
        self
    }

    pub fn over(self, alphabet: BTreeSet<Symbol>) -> NoiseSpec {
        NoiseSpec {
            settings: self,
            alphabet,
        }
    }

    pub fn check(&self) -> Result<(), NoiseError> {
        if !(0.0..=1.0).contains(&self.noise_level) {
            return Err(NoiseError::InvalidSpec(format!(
                "noise_level {} is outside [0, 1]",
                self.noise_level
            )));
        }
        if !(0.0..=1.0).contains(&self.prob_insert) {
            return Err(NoiseError::InvalidSpec(format!(
                "prob_insert {} is outside [0, 1]",
                self.prob_insert
            )));
        }
        Ok(())
    }

    /// Number of operations for a word of `len` symbols. Levels are rounded
    /// half to even.
    pub fn operation_count(&self, len: usize) -> Result<usize, NoiseError> {
        self.check()?;
        match self.n_symbols_change {
            Some(n) if n > len => Err(NoiseError::InvalidSpec(format!(
                "n_symbols_change {n} is outside [0, {len}]"
            ))),
            Some(n) => Ok(n),
            None => Ok(((self.noise_level * len as f64).round_ties_even() as usize).min(len)),
        }
    }
}

/// Noise settings bound to the alphabet the noise draws from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(flatten)]
    pub settings: NoiseSettings,
    pub alphabet: BTreeSet<Symbol>,
}

impl NoiseSpec {
    /// Convenience for ad-hoc use: the alphabet is the word's distinct
    /// symbols. Symbols the word happens not to use can then never be
    /// inserted.
    pub fn inferred(settings: NoiseSettings, word: &[Symbol]) -> Self {
        settings.over(word.iter().cloned().collect())
    }
}

/// What a noise pass actually did.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseRecord {
    pub kind: Option<NoiseKind>,
    pub operations: usize,
    pub insertions: usize,
    pub deletions: usize,
    /// Deletions drawn while the word was already empty.
    pub skipped_deletions: usize,
    pub replacements: usize,
}

fn check_word(word: &[Symbol], spec: &NoiseSpec) -> Result<(), NoiseError> {
    if spec.alphabet.is_empty() {
        return Err(NoiseError::InvalidSpec("alphabet is empty".into()));
    }
    if let Some(s) = word.iter().find(|s| !spec.alphabet.contains(*s)) {
        return Err(NoiseError::InvalidSpec(format!("word symbol {s} is not in the alphabet")));
    }
    Ok(())
}

fn expect_kind(spec: &NoiseSpec, kind: NoiseKind) -> Result<(), NoiseError> {
    if spec.settings.kind != kind {
        return Err(NoiseError::InvalidSpec(format!(
            "expected {kind:?} noise, spec is {:?}",
            spec.settings.kind
        )));
    }
    Ok(())
}

/// Applies whichever kind of noise `spec` describes.
pub fn apply_noise<R: Rng + ?Sized>(
    word: &[Symbol],
    spec: &NoiseSpec,
    rng: &mut R,
) -> Result<(Vec<Symbol>, NoiseRecord), NoiseError> {
    check_word(word, spec)?;
    let n = spec.settings.operation_count(word.len())?;
    let alphabet: Vec<&Symbol> = spec.alphabet.iter().collect();
    let mut record = NoiseRecord {
        kind: Some(spec.settings.kind),
        operations: n,
        ..Default::default()
    };
    let mut out = word.to_vec();
    match spec.settings.kind {
        NoiseKind::InsertOrDelete => {
            for _ in 0..n {
                if rng.random_bool(spec.settings.prob_insert) {
                    let at = rng.random_range(0..=out.len());
                    let sym = alphabet[rng.random_range(0..alphabet.len())].clone();
                    out.insert(at, sym);
                    record.insertions += 1;
                } else if out.is_empty() {
                    record.skipped_deletions += 1;
                } else {
                    let at = rng.random_range(0..out.len());
                    out.remove(at);
                    record.deletions += 1;
                }
            }
        }
        NoiseKind::Replacement => {
            if n > 0 && alphabet.len() < 2 {
                return Err(NoiseError::AlphabetTooSmall);
            }
            for at in index::sample(rng, out.len(), n).into_iter() {
                let original = &out[at];
                let others: Vec<&Symbol> = alphabet.iter().copied().filter(|s| *s != original).collect();
                out[at] = others[rng.random_range(0..others.len())].clone();
                record.replacements += 1;
            }
        }
    }
    Ok((out, record))
}

/// Inserts or deletes `n` symbols one after another, each operation an
/// insertion with probability `prob_insert`.
pub fn introduce_insert_or_delete_noise<R: Rng + ?Sized>(
    word: &[Symbol],
    spec: &NoiseSpec,
    rng: &mut R,
) -> Result<Vec<Symbol>, NoiseError> {
    expect_kind(spec, NoiseKind::InsertOrDelete)?;
    apply_noise(word, spec, rng).map(|(w, _)| w)
}

/// Replaces `n` distinct positions, each with a different symbol.
pub fn introduce_replacement_noise<R: Rng + ?Sized>(
    word: &[Symbol],
    spec: &NoiseSpec,
    rng: &mut R,
) -> Result<Vec<Symbol>, NoiseError> {
    expect_kind(spec, NoiseKind::Replacement)?;
    apply_noise(word, spec, rng).map(|(w, _)| w)
}
