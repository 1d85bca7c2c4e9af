//! Unigram/bigram/trigram model over gazetteer name collocations.
//!
//! Counts come from the name tokens of every distinct variant surface.
//! Conditional distributions are maximum-likelihood estimates over each
//! context's successor counts, with no smoothing: an unseen unigram, bigram
//! or trigram makes a sequence's probability exactly zero, and that zero is
//! what marks a token sequence as not part of any location name.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gazetteer::Gazetteer;
use crate::textprep::name_tokens;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("cannot compile a model from an empty gazetteer")]
    EmptyGazetteer,
    #[error("probability of an empty token sequence is undefined")]
    EmptySequence,
}

/// Successor counts of one conditioning context.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub total: u64,
    pub successors: BTreeMap<String, u64>,
}

impl Row {
    fn add(&mut self, word: &str) {
        self.total += 1;
        *self.successors.entry(word.to_string()).or_insert(0) += 1;
    }

    pub fn count(&self, word: &str) -> u64 {
        self.successors.get(word).copied().unwrap_or(0)
    }

    /// MLE conditional probability of `word` given this context.
    pub fn probability(&self, word: &str) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(word) as f64 / self.total as f64
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NGramCounts {
    pub unigram_counts: BTreeMap<String, u64>,
    /// w1 → successor counts c(w1 w2)
    pub bigram_cfd: BTreeMap<String, Row>,
    /// w1 → w2 → successor counts c(w1 w2 w3)
    pub trigram_cfd: BTreeMap<String, BTreeMap<String, Row>>,
    pub total_unigrams: u64,
}

impl NGramCounts {
    fn record<S: AsRef<str>>(&mut self, tokens: &[S]) {
        for (i, w) in tokens.iter().enumerate() {
            let w = w.as_ref();
            *self.unigram_counts.entry(w.to_string()).or_insert(0) += 1;
            self.total_unigrams += 1;
            if i >= 1 {
                let prev = tokens[i - 1].as_ref();
                self.bigram_cfd.entry(prev.to_string()).or_default().add(w);
            }
            if i >= 2 {
                let (a, b) = (tokens[i - 2].as_ref(), tokens[i - 1].as_ref());
                self.trigram_cfd
                    .entry(a.to_string())
                    .or_default()
                    .entry(b.to_string())
                    .or_default()
                    .add(w);
            }
        }
    }

    pub fn unigram(&self, w: &str) -> u64 {
        self.unigram_counts.get(w).copied().unwrap_or(0)
    }

    pub fn bigram(&self, w1: &str, w2: &str) -> u64 {
        self.bigram_cfd.get(w1).map_or(0, |r| r.count(w2))
    }

    pub fn trigram(&self, w1: &str, w2: &str, w3: &str) -> u64 {
        self.trigram_row(w1, w2).map_or(0, |r| r.count(w3))
    }

    fn trigram_row(&self, w1: &str, w2: &str) -> Option<&Row> {
        self.trigram_cfd.get(w1).and_then(|m| m.get(w2))
    }
}

/// Immutable language model compiled from a gazetteer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompiledModel {
    pub counts: NGramCounts,
}

/// Compiles the model from every variant surface of `gazetteer`, each
/// distinct surface counted once.
pub fn compute_model(gazetteer: &Gazetteer) -> Result<CompiledModel, ModelError> {
    if gazetteer.is_empty() {
        return Err(ModelError::EmptyGazetteer);
    }
    Ok(CompiledModel::from_names(gazetteer.variant_tokens()))
}

impl CompiledModel {
    /// Builds the model from tokenized names.
    pub fn from_names<I, T, S>(names: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[S]>,
        S: AsRef<str>,
    {
        let mut counts = NGramCounts::default();
        for name in names {
            counts.record(name.as_ref());
        }
        Self { counts }
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.counts.unigram_counts.keys().map(String::as_str)
    }

    pub fn contains(&self, w: &str) -> bool {
        self.counts.unigram_counts.contains_key(w)
    }

    /// P1(w) = c(w) / Σ c(·)
    pub fn unigram_probability(&self, w: &str) -> f64 {
        if self.counts.total_unigrams == 0 {
            return 0.0;
        }
        self.counts.unigram(w) as f64 / self.counts.total_unigrams as f64
    }

    /// P(w2 | w1)
    pub fn bigram_probability(&self, w1: &str, w2: &str) -> f64 {
        self.counts.bigram_cfd.get(w1).map_or(0.0, |r| r.probability(w2))
    }

    /// P(w3 | w1 w2)
    pub fn trigram_probability(&self, w1: &str, w2: &str, w3: &str) -> f64 {
        self.counts.trigram_row(w1, w2).map_or(0.0, |r| r.probability(w3))
    }

    /// Every conditional distribution row: bigram contexts, then trigram
    /// contexts.
    pub fn cpd_rows(&self) -> impl Iterator<Item = (Vec<&str>, &Row)> {
        let bi = self.counts.bigram_cfd.iter().map(|(w, r)| (vec![w.as_str()], r));
        let tri = self
            .counts
            .trigram_cfd
            .iter()
            .flat_map(|(a, m)| m.iter().map(move |(b, r)| (vec![a.as_str(), b.as_str()], r)));
        bi.chain(tri)
    }

    /// Natural-log probability of a token sequence, `None` when it is zero.
    ///
    /// Uses P1 for one token, P1·P(w2|w1) for two, and extends with the
    /// order-two chain P(wi | wi-2 wi-1) for longer sequences.
    pub fn log_probability<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Option<f64>, ModelError> {
        let w: Vec<&str> = tokens.iter().map(|t| t.as_ref()).collect();
        if w.is_empty() {
            return Err(ModelError::EmptySequence);
        }
        let mut factors = Vec::with_capacity(w.len());
        factors.push(self.unigram_probability(w[0]));
        if w.len() >= 2 {
            factors.push(self.bigram_probability(w[0], w[1]));
        }
        for i in 2..w.len() {
            factors.push(self.trigram_probability(w[i - 2], w[i - 1], w[i]));
        }
        if factors.iter().any(|&p| p <= 0.0) {
            return Ok(None);
        }
        Ok(Some(factors.iter().map(|p| p.ln()).sum()))
    }

    pub fn sequence_probability<S: AsRef<str>>(&self, tokens: &[S]) -> Result<f64, ModelError> {
        Ok(self.log_probability(tokens)?.map_or(0.0, f64::exp))
    }

    /// Whether appending `next` to a sequence with nonzero probability keeps
    /// it nonzero. `context` is the sequence so far (only its last two
    /// tokens matter).
    pub fn extends<S: AsRef<str>>(&self, context: &[S], next: &str) -> bool {
        match context {
            [] => self.counts.unigram(next) > 0,
            [w1] => self.counts.bigram(w1.as_ref(), next) > 0,
            [.., w1, w2] => self.counts.trigram(w1.as_ref(), w2.as_ref(), next) > 0,
        }
    }
}

/// True when `s` tokenizes to at least one name token and that sequence has
/// nonzero probability.
pub fn valid_ngram(model: &CompiledModel, s: &str) -> bool {
    let tokens = name_tokens(&s.to_lowercase());
    !tokens.is_empty() && matches!(model.log_probability(&tokens), Ok(Some(_)))
}
