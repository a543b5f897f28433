//! Output files. JSON documents carry a `meta` block; every subcommand also
//! writes `<subcommand>.manifest.json` listing the files it produced with
//! their SHA-256 digests.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub subcommand: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub config: RunConfig,
}

impl Meta {
    pub fn new(subcommand: &str, config: &RunConfig) -> Self {
        Meta {
            subcommand: subcommand.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: config.hash(),
            seed: config.seed,
            config: config.clone(),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    meta: &'a Meta,
    #[serde(flatten)]
    body: &'a T,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub subcommand: String,
    pub config_hash: String,
    pub seed: u64,
    pub files: Vec<ManifestEntry>,
}

pub struct ArtifactWriter {
    dir: PathBuf,
    meta: Meta,
    files: Vec<ManifestEntry>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path, subcommand: &str, config: &RunConfig) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(ArtifactWriter { dir: dir.to_path_buf(), meta: Meta::new(subcommand, config), files: Vec::new() })
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(ManifestEntry { file: name.into(), bytes: bytes.len(), sha256: hex::encode(Sha256::digest(bytes)) });
        Ok(path)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<PathBuf> {
        self.write_bytes(name, text.as_bytes())
    }

    /// Pretty JSON object with the `meta` block followed by `body`'s fields.
    pub fn write_json<T: Serialize>(&mut self, name: &str, body: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(&Envelope { meta: &self.meta, body })?;
        text.push('\n');
        self.write_text(name, &text)
    }

    pub fn write_jsonl<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<PathBuf> {
        let mut text = String::new();
        for r in rows {
            text.push_str(&serde_json::to_string(r)?);
            text.push('\n');
        }
        self.write_text(name, &text)
    }

    /// Writes the manifest and returns the files produced.
    pub fn finish(self) -> Result<Vec<PathBuf>> {
        let manifest = Manifest {
            subcommand: self.meta.subcommand.clone(),
            config_hash: self.meta.config_hash.clone(),
            seed: self.meta.seed,
            files: self.files,
        };
        let name = format!("{}.manifest.json", manifest.subcommand);
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(self.dir.join(&name), text)?;
        let mut out: Vec<PathBuf> = manifest.files.iter().map(|f| self.dir.join(&f.file)).collect();
        out.push(self.dir.join(name));
        Ok(out)
    }
}

/// Reads one top-level field of a JSON artifact written by [`ArtifactWriter`].
pub fn read_field<T: for<'de> Deserialize<'de>>(path: &Path, field: &str) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)?;
    let inner = value
        .get_mut(field)
        .map(serde_json::Value::take)
        .with_context(|| format!("{} has no `{field}` field", path.display()))?;
    Ok(serde_json::from_value(inner)?)
}
