//! Run configuration: defaults, optional TOML file, then command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use beliefmine_core::classifier::{ClassWeighting, Solver, TrainConfig};
use beliefmine_core::parsemedian::DistanceMode;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Bundled list of the tracked scientific source handles.
pub const DEFAULT_SOURCES: &str = include_str!("../data/default_sources.txt");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    /// `word<TAB>valence` table; the bundled lexicon when absent.
    pub lexicon: Option<PathBuf>,
    /// Negator and booster rules for a custom lexicon.
    pub sentiment_rules: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    /// One handle per line; the bundled list when absent.
    pub sources: Option<PathBuf>,
    pub seed: u64,
    pub neighbors: usize,
    pub tolerance: f64,
    /// Augment only this many labelled replies, drawn with the seed.
    pub augment_sample: Option<usize>,
    /// Keep at most this many replies per source post for annotation.
    pub responses_per_tweet: Option<usize>,
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub train_split: f64,
    pub solver: Solver,
    pub epochs: usize,
    pub learning_rate: f64,
    pub regularization: f64,
    pub binary_weights: bool,
    pub keep_isolated: bool,
    /// Louvain restarts, seeded `seed, seed + 1, ...`.
    pub louvain_runs: usize,
    pub layout_iterations: usize,
    pub top_hashtags: usize,
    pub top_sources: usize,
    pub distance_mode: DistanceMode,
    pub emit_distances: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let train = TrainConfig::default();
        RunConfig {
            corpus: None,
            embeddings: None,
            lexicon: None,
            sentiment_rules: None,
            stopwords: None,
            sources: None,
            seed: 0,
            neighbors: 2,
            tolerance: 0.05,
            augment_sample: None,
            responses_per_tweet: None,
            ngram_min: 1,
            ngram_max: 3,
            train_split: 0.7,
            solver: train.solver,
            epochs: train.epochs,
            learning_rate: train.learning_rate,
            regularization: train.regularization,
            binary_weights: false,
            keep_isolated: false,
            louvain_runs: 10,
            layout_iterations: 50,
            top_hashtags: 8,
            top_sources: 10,
            distance_mode: DistanceMode::Char,
            emit_distances: false,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_split > 0.0 && self.train_split < 1.0) {
            bail!("train_split must lie strictly between 0 and 1, got {}", self.train_split);
        }
        if !(self.tolerance >= 0.0) {
            bail!("tolerance must be non-negative, got {}", self.tolerance);
        }
        if self.neighbors == 0 {
            bail!("neighbors must be at least 1");
        }
        if self.ngram_min == 0 || self.ngram_min > self.ngram_max {
            bail!("invalid n-gram range {}..={}", self.ngram_min, self.ngram_max);
        }
        if self.louvain_runs == 0 {
            bail!("louvain_runs must be at least 1");
        }
        if self.epochs == 0 || !(self.learning_rate > 0.0) || !(self.regularization >= 0.0) {
            bail!("invalid training schedule");
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serialises");
        hex::encode(Sha256::digest(&json))
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            solver: self.solver,
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            regularization: self.regularization,
            class_weighting: ClassWeighting::Balanced,
            seed: self.seed,
        }
    }

    pub fn corpus_path(&self) -> Result<&Path> {
        self.corpus.as_deref().context("no corpus configured (use --corpus or the config file)")
    }

    pub fn embeddings_path(&self) -> Result<&Path> {
        self.embeddings.as_deref().context("no embedding table configured (use --embeddings)")
    }
}
