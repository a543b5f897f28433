//! Lexicon and rule based compound sentiment.
//!
//! Each lexicon hit contributes its valence, pushed further from zero by
//! boosters and flipped/damped by a negator within the three preceding tokens.
//! The summed valence `s` is squashed to `s / sqrt(s^2 + 15)`.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::resources::{self, content_lines};
use crate::textprep::is_url;

/// Normalisation constant in `s / sqrt(s^2 + ALPHA)`.
pub const ALPHA: f64 = 15.0;
/// Multiplier applied to a valence preceded by a negator.
pub const NEGATION_SCALAR: f64 = -0.74;
/// Default booster increment.
pub const BOOSTER_INCREMENT: f64 = 0.293;
/// How many preceding tokens are searched for negators and boosters.
pub const LOOKBACK: usize = 3;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: expected `word<TAB>valence`")]
    Malformed { line: usize },
    #[error("line {line}: valence {value} of {word:?} outside [-4, 4]")]
    OutOfRange { line: usize, word: String, value: f64 },
    #[error("{0:?} is listed both as a negator and a booster")]
    Overlap(String),
    #[error("sentiment rules: {0}")]
    Rules(#[from] toml::de::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValenceLexicon {
    valence: HashMap<String, f64>,
    negators: Vec<String>,
    boosters: HashMap<String, f64>,
}

#[derive(Deserialize)]
struct Rules {
    #[serde(default)]
    negators: Vec<String>,
    #[serde(default)]
    boosters: HashMap<String, f64>,
}

impl ValenceLexicon {
    pub fn new(
        valence: HashMap<String, f64>,
        negators: impl IntoIterator<Item = String>,
        boosters: HashMap<String, f64>,
    ) -> Result<Self, LexiconError> {
        for (word, &value) in &valence {
            if !(-4.0..=4.0).contains(&value) {
                return Err(LexiconError::OutOfRange { line: 0, word: word.clone(), value });
            }
        }
        let mut negators: Vec<String> = negators.into_iter().map(|w| w.to_lowercase()).collect();
        negators.sort();
        negators.dedup();
        if let Some(w) = negators.iter().find(|w| boosters.contains_key(*w)) {
            return Err(LexiconError::Overlap(w.clone()));
        }
        let boosters = boosters.into_iter().map(|(k, v)| (k.to_lowercase(), v)).collect();
        Ok(ValenceLexicon { valence, negators, boosters })
    }

    /// Parses a `word<TAB>valence` table and a TOML rules document with
    /// `negators = [...]` and a `[boosters]` table.
    pub fn parse(table: &str, rules: &str) -> Result<Self, LexiconError> {
        let mut valence = HashMap::new();
        for (line, row) in content_lines(table) {
            let mut cols = row.split('\t');
            let (Some(word), Some(value), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(LexiconError::Malformed { line });
            };
            let value: f64 = value.trim().parse().map_err(|_| LexiconError::Malformed { line })?;
            if !(-4.0..=4.0).contains(&value) {
                return Err(LexiconError::OutOfRange { line, word: word.into(), value });
            }
            valence.insert(word.trim().to_lowercase(), value);
        }
        let rules: Rules = toml::from_str(rules)?;
        Self::new(valence, rules.negators, rules.boosters)
    }

    pub fn load(table: impl AsRef<Path>, rules: Option<&Path>) -> Result<Self, LexiconError> {
        let table = fs::read_to_string(table)?;
        let rules = match rules {
            Some(p) => fs::read_to_string(p)?,
            None => resources::SENTIMENT_RULES.to_string(),
        };
        Self::parse(&table, &rules)
    }

    pub fn bundled() -> Self {
        Self::parse(resources::VALENCE_LEXICON, resources::SENTIMENT_RULES)
            .expect("bundled sentiment lexicon is well formed")
    }

    /// Lexicon with only valences, no negators or boosters.
    pub fn from_valences<I, S>(entries: I) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let valence = entries.into_iter().map(|(w, v)| (w.into().to_lowercase(), v)).collect();
        Self::new(valence, Vec::new(), HashMap::new())
    }

    /// Same rules with every valence negated.
    pub fn flipped(&self) -> Self {
        ValenceLexicon {
            valence: self.valence.iter().map(|(k, v)| (k.clone(), -v)).collect(),
            ..self.clone()
        }
    }

    pub fn valence(&self, word: &str) -> Option<f64> {
        self.valence.get(word).copied()
    }

    pub fn is_negator(&self, word: &str) -> bool {
        self.negators.binary_search_by(|w| w.as_str().cmp(word)).is_ok()
    }

    pub fn booster(&self, word: &str) -> Option<f64> {
        self.boosters.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.valence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valence.is_empty()
    }

    /// Summed, rule-adjusted valence before squashing.
    pub fn raw_score(&self, text: &str) -> f64 {
        let tokens = score_tokens(text);
        let mut sum = 0.0;
        for (i, tok) in tokens.iter().enumerate() {
            let Some(mut v) = self.valence(tok) else { continue };
            let window = &tokens[i.saturating_sub(LOOKBACK)..i];
            for prev in window {
                if let Some(inc) = self.booster(prev) {
                    if v > 0.0 {
                        v += inc;
                    } else if v < 0.0 {
                        v -= inc;
                    }
                }
            }
            if window.iter().any(|w| self.is_negator(w)) {
                v *= NEGATION_SCALAR;
            }
            sum += v;
        }
        sum
    }

    pub fn compound(&self, text: &str) -> CompoundScore {
        CompoundScore::from_raw(self.raw_score(text))
    }
}

/// Compound sentiment in `[-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct CompoundScore(f64);

impl CompoundScore {
    pub fn from_raw(sum: f64) -> Self {
        if sum == 0.0 {
            return CompoundScore(0.0);
        }
        CompoundScore(sum / (sum * sum + ALPHA).sqrt())
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Free-function form of [`ValenceLexicon::compound`].
pub fn compound(text: &str, lexicon: &ValenceLexicon) -> CompoundScore {
    lexicon.compound(text)
}

/// Lowercased whitespace tokens with URLs removed and punctuation deleted.
/// Apostrophes go too, so `don't` meets the negator `dont`.
fn score_tokens(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter(|t| !is_url(t))
        .map(|t| t.to_lowercase().chars().filter(|c| c.is_alphanumeric()).collect::<String>())
        .filter(|t| !t.is_empty())
        .collect()
}
