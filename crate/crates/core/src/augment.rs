//! Embedding-neighbour data augmentation with a sentiment drift gate.
//!
//! Each in-vocabulary word of a labelled post is swapped, one at a time, for
//! each of its `k` nearest embedding neighbours. A swap survives only if the
//! compound sentiment of the new text stays within `tolerance` of the
//! original, which screens out the antonyms that sit close in embedding space.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{BeliefLabel, TweetRecord};
use crate::exec::Exec;
use crate::sentiment::ValenceLexicon;
use crate::textprep::{is_mention, is_url};

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error("line {line}: malformed embedding entry: {reason}")]
    MalformedEmbedding { line: usize, reason: String },
    #[error("embedding table is empty")]
    EmptyTable,
    #[error("every embedding vector has zero norm")]
    AllZero,
    #[error("tolerance must be a non-negative number, got {0}")]
    InvalidTolerance(f64),
    #[error("neighbour count must be at least 1")]
    InvalidK,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Word vectors of a fixed dimension, stored row-major.
#[derive(Clone, Debug)]
pub struct EmbeddingTable {
    dim: usize,
    words: Vec<String>,
    data: Vec<f32>,
    norms: Vec<f64>,
    index: HashMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub word: String,
    pub similarity: f64,
}

impl EmbeddingTable {
    pub fn from_entries<I, S>(entries: I) -> Result<Self, AugmentError>
    where
        I: IntoIterator<Item = (S, Vec<f32>)>,
        S: Into<String>,
    {
        let mut builder = Builder::default();
        for (i, (word, vec)) in entries.into_iter().enumerate() {
            builder.push(i + 1, word.into(), vec)?;
        }
        builder.finish()
    }

    /// Plain-text format: `word v1 v2 ... vd` per line, `d` taken from the
    /// first entry.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self, AugmentError> {
        let mut builder = Builder::default();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let mut parts = line.split_whitespace();
            let Some(word) = parts.next() else { continue };
            let mut vec = Vec::new();
            for p in parts {
                let v: f32 = p.parse().map_err(|_| AugmentError::MalformedEmbedding {
                    line: line_no,
                    reason: format!("not a number: {p:?}"),
                })?;
                if !v.is_finite() {
                    return Err(AugmentError::MalformedEmbedding {
                        line: line_no,
                        reason: format!("non-finite component {p:?}"),
                    });
                }
                vec.push(v);
            }
            builder.push(line_no, word.to_string(), vec)?;
        }
        builder.finish()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, AugmentError> {
        Self::parse(BufReader::new(File::open(path)?))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn vector(&self, word: &str) -> Option<&[f32]> {
        self.index.get(word).map(|&i| self.row(i))
    }

    fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    fn cosine(&self, a: usize, b: usize) -> f64 {
        let dot: f64 = self.row(a).iter().zip(self.row(b)).map(|(x, y)| *x as f64 * *y as f64).sum();
        dot / (self.norms[a] * self.norms[b])
    }

    /// Top-`k` words by cosine similarity to `word`, excluding `word` itself
    /// and zero vectors. Ties go to the lexicographically smaller word.
    pub fn nearest_neighbors(&self, word: &str, k: usize, exec: Exec) -> Vec<Neighbor> {
        self.nearest_neighbors_where(word, k, exec, |_| true)
    }

    /// As [`nearest_neighbors`](Self::nearest_neighbors), restricted to
    /// candidates accepted by `keep`.
    pub fn nearest_neighbors_where<F>(&self, word: &str, k: usize, exec: Exec, keep: F) -> Vec<Neighbor>
    where
        F: Fn(&str) -> bool + Sync,
    {
        let Some(&q) = self.index.get(word) else {
            return Vec::new();
        };
        if k == 0 {
            return Vec::new();
        }
        if self.norms[q] == 0.0 {
            warn!("query {word:?} has a zero vector; no neighbours");
            return Vec::new();
        }
        const CHUNK: usize = 4096;
        let chunks = self.words.len().div_ceil(CHUNK);
        let partial = exec.map_range(chunks, |c| {
            let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
            for j in c * CHUNK..((c + 1) * CHUNK).min(self.words.len()) {
                if j == q || self.norms[j] == 0.0 || !keep(&self.words[j]) {
                    continue;
                }
                insert_top_k(&mut best, (self.cosine(q, j), j), k, &self.words);
            }
            best
        });
        let mut best = Vec::with_capacity(k + 1);
        for item in partial.into_iter().flatten() {
            insert_top_k(&mut best, item, k, &self.words);
        }
        best.into_iter()
            .map(|(similarity, j)| Neighbor { word: self.words[j].clone(), similarity })
            .collect()
    }
}

fn ranks_before(a: (f64, usize), b: (f64, usize), words: &[String]) -> bool {
    match b.0.total_cmp(&a.0) {
        std::cmp::Ordering::Equal => words[a.1] < words[b.1],
        o => o == std::cmp::Ordering::Less,
    }
}

fn insert_top_k(best: &mut Vec<(f64, usize)>, item: (f64, usize), k: usize, words: &[String]) {
    if best.len() == k && !ranks_before(item, best[k - 1], words) {
        return;
    }
    let pos = best.iter().position(|b| ranks_before(item, *b, words)).unwrap_or(best.len());
    best.insert(pos, item);
    best.truncate(k);
}

#[derive(Default)]
struct Builder {
    dim: Option<usize>,
    words: Vec<String>,
    data: Vec<f32>,
    norms: Vec<f64>,
    index: HashMap<String, usize>,
}

impl Builder {
    fn push(&mut self, line: usize, word: String, vec: Vec<f32>) -> Result<(), AugmentError> {
        let dim = *self.dim.get_or_insert(vec.len());
        if dim == 0 {
            return Err(AugmentError::MalformedEmbedding { line, reason: "no vector components".into() });
        }
        if vec.len() != dim {
            return Err(AugmentError::MalformedEmbedding {
                line,
                reason: format!("expected {dim} components, found {}", vec.len()),
            });
        }
        if self.index.contains_key(&word) {
            warn!("line {line}: duplicate embedding for {word:?} ignored");
            return Ok(());
        }
        let norm = vec.iter().map(|x| *x as f64 * *x as f64).sum::<f64>().sqrt();
        self.index.insert(word.clone(), self.words.len());
        self.words.push(word);
        self.data.extend(vec);
        self.norms.push(norm);
        Ok(())
    }

    fn finish(self) -> Result<EmbeddingTable, AugmentError> {
        let Some(dim) = self.dim else {
            return Err(AugmentError::EmptyTable);
        };
        let zeros = self.norms.iter().filter(|n| **n == 0.0).count();
        if zeros == self.norms.len() {
            return Err(AugmentError::AllZero);
        }
        if zeros > 0 {
            warn!("{zeros} zero-norm embedding vectors will be skipped");
        }
        Ok(EmbeddingTable { dim, words: self.words, data: self.data, norms: self.norms, index: self.index })
    }
}

/// The single word swap that produced a variant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Replacement {
    /// Index of the whitespace token that changed.
    pub position: usize,
    pub old: String,
    pub new: String,
}

/// A generated substitution before the sentiment gate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub original_id: String,
    pub text: String,
    pub replaced: Replacement,
    pub label: BeliefLabel,
    pub similarity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentedVariant {
    pub original_id: String,
    pub text: String,
    pub replaced: Replacement,
    pub label: BeliefLabel,
    pub sentiment_delta: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterOutcome {
    pub retained: Vec<AugmentedVariant>,
    /// Variants whose sentiment moved by more than the tolerance.
    pub rejected: Vec<AugmentedVariant>,
}

/// Substitutable word inside a whitespace token: byte span and lookup key.
struct Slot {
    position: usize,
    start: usize,
    end: usize,
    key: String,
}

fn slots(text: &str) -> Vec<Slot> {
    let mut out = Vec::new();
    let mut position = 0;
    let mut offset = 0;
    for token in text.split_whitespace() {
        let start = offset + text[offset..].find(token).expect("token comes from text");
        offset = start + token.len();
        let pos = position;
        position += 1;
        if is_url(token) || is_mention(token) || token.trim_start_matches(|c: char| !c.is_alphanumeric() && c != '#').starts_with('#') {
            continue;
        }
        let core = token.trim_matches(|c: char| !c.is_alphanumeric());
        if core.is_empty() {
            continue;
        }
        let core_start = start + token.find(core).expect("core is a substring");
        out.push(Slot { position: pos, start: core_start, end: core_start + core.len(), key: core.to_lowercase() });
    }
    out
}

/// Replacement candidates must look like plain words.
fn is_word_like(w: &str) -> bool {
    w.chars().any(char::is_alphabetic) && w.chars().all(|c| c.is_alphanumeric() || c == '\'' || c == '-')
}

/// Carries the surface casing of `original` over to `replacement`.
fn match_case(original: &str, replacement: &str) -> String {
    let mut chars = original.chars();
    let first_upper = chars.next().is_some_and(char::is_uppercase);
    let rest_upper = original.chars().skip(1).any(char::is_alphabetic)
        && original.chars().skip(1).filter(|c| c.is_alphabetic()).all(char::is_uppercase);
    if first_upper && rest_upper {
        replacement.to_uppercase()
    } else if first_upper {
        let mut c = replacement.chars();
        c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
    } else {
        replacement.to_string()
    }
}

fn generate_with<F>(tweet: &TweetRecord, label: BeliefLabel, lookup: F) -> Vec<Candidate>
where
    F: Fn(&str) -> Vec<Neighbor>,
{
    let text = &tweet.text;
    let mut out = Vec::new();
    for slot in slots(text) {
        let surface = &text[slot.start..slot.end];
        for n in lookup(&slot.key) {
            let new = match_case(surface, &n.word);
            out.push(Candidate {
                original_id: tweet.id.clone(),
                text: format!("{}{}{}", &text[..slot.start], new, &text[slot.end..]),
                replaced: Replacement { position: slot.position, old: surface.to_string(), new },
                label,
                similarity: n.similarity,
            });
        }
    }
    out
}

/// One variant per (word position, neighbour): at most `k` per word.
pub fn generate_variants(tweet: &TweetRecord, label: BeliefLabel, k: usize, table: &EmbeddingTable) -> Vec<Candidate> {
    generate_with(tweet, label, |key| {
        table.nearest_neighbors_where(key, k, Exec::Sequential, is_word_like)
    })
}

/// Keeps candidates whose compound sentiment is within `tolerance` of the
/// original post's.
pub fn filter_variants(
    original: &TweetRecord,
    candidates: Vec<Candidate>,
    tolerance: f64,
    lexicon: &ValenceLexicon,
) -> Result<FilterOutcome, AugmentError> {
    if !(tolerance >= 0.0) {
        return Err(AugmentError::InvalidTolerance(tolerance));
    }
    let base = lexicon.compound(&original.text).value();
    let mut outcome = FilterOutcome::default();
    for c in candidates {
        let delta = (lexicon.compound(&c.text).value() - base).abs();
        let variant = AugmentedVariant {
            original_id: c.original_id,
            text: c.text,
            replaced: c.replaced,
            label: c.label,
            sentiment_delta: delta,
        };
        if delta <= tolerance {
            outcome.retained.push(variant);
        } else {
            outcome.rejected.push(variant);
        }
    }
    Ok(outcome)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentConfig {
    pub neighbors: usize,
    pub tolerance: f64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig { neighbors: 2, tolerance: 0.05 }
    }
}

/// Augments many labelled posts. Neighbour lookups for the distinct words and
/// per-post generation both fan out under `exec`; output is ordered by post
/// id, then token position, then neighbour rank.
pub fn augment_batch(
    items: &[(TweetRecord, BeliefLabel)],
    config: AugmentConfig,
    table: &EmbeddingTable,
    lexicon: &ValenceLexicon,
    exec: Exec,
) -> Result<FilterOutcome, AugmentError> {
    if config.neighbors == 0 {
        return Err(AugmentError::InvalidK);
    }
    if !(config.tolerance >= 0.0) {
        return Err(AugmentError::InvalidTolerance(config.tolerance));
    }
    let keys: Vec<String> = items
        .iter()
        .flat_map(|(t, _)| slots(&t.text).into_iter().map(|s| s.key))
        .filter(|k| table.contains(k))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let found = exec.map(&keys, |k| table.nearest_neighbors_where(k, config.neighbors, Exec::Sequential, is_word_like));
    let cache: HashMap<&str, Vec<Neighbor>> = keys.iter().map(String::as_str).zip(found).collect();

    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|a, b| items[*a].0.id.cmp(&items[*b].0.id));
    let per_item = exec.map(&order, |&i| {
        let (tweet, label) = &items[i];
        let candidates = generate_with(tweet, *label, |key| cache.get(key).cloned().unwrap_or_default());
        filter_variants(tweet, candidates, config.tolerance, lexicon)
    });
    let mut outcome = FilterOutcome::default();
    for r in per_item {
        let r = r?;
        outcome.retained.extend(r.retained);
        outcome.rejected.extend(r.rejected);
    }
    Ok(outcome)
}
