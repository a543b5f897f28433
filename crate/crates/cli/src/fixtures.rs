//! Bundled synthetic fixtures: a 200-record corpus and a toy embedding table.

use std::path::{Path, PathBuf};

use anyhow::Result;
use beliefmine_core::synth;

use crate::artifacts::ArtifactWriter;
use crate::config::RunConfig;

/// Seed the files under `fixtures/` were generated with.
pub const FIXTURE_SEED: u64 = 2020;
pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const EMBEDDINGS_FILE: &str = "embeddings.txt";

pub fn corpus_jsonl(seed: u64) -> String {
    let mut out = String::new();
    for r in synth::fixture_corpus(seed) {
        out.push_str(&serde_json::to_string(&r).expect("records serialise"));
        out.push('\n');
    }
    out
}

pub fn embeddings_text(seed: u64) -> String {
    synth::fixture_embeddings_text(seed)
}

/// Writes both fixture files plus a manifest into `dir`.
pub fn write(dir: &Path, config: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut w = ArtifactWriter::new(dir, "fixture", config)?;
    w.write_text(CORPUS_FILE, &corpus_jsonl(config.seed))?;
    w.write_text(EMBEDDINGS_FILE, &embeddings_text(config.seed))?;
    w.finish()
}

/// Source-tree location of the bundled fixtures.
pub fn bundled_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}
