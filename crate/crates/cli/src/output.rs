//! Artifact writing: CSV tables, JSON documents and the checksummed manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// Shortest decimal string that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Info,
    Warn,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub level: Level,
    pub check: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    /// SHA-256 of the configuration file, when one was given.
    pub config_sha256: Option<String>,
    pub seeds: BTreeMap<String, u64>,
    pub tolerances: BTreeMap<String, f64>,
    pub details: serde_json::Value,
    pub diagnostics: Vec<Diagnostic>,
    /// SHA-256 of every output file, keyed by file name.
    pub outputs: BTreeMap<String, String>,
}

pub const MANIFEST: &str = "manifest.json";

/// Collects files for one command and writes them with a manifest.
pub struct Artifacts {
    dir: PathBuf,
    files: BTreeMap<String, Vec<u8>>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Artifacts {
    pub fn new(dir: PathBuf) -> Self {
        Self { dir, files: BTreeMap::new(), diagnostics: Vec::new() }
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: Vec<Vec<String>>) -> anyhow::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        self.files.insert(name.to_string(), w.into_inner()?);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.files.insert(name.to_string(), bytes);
        Ok(())
    }

    pub fn raw(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.insert(name.to_string(), bytes);
    }

    pub fn diag(&mut self, level: Level, check: &str, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic { level, check: check.to_string(), message: message.into() });
    }

    /// Records a check: an `Info` line on success, an `Error` otherwise.
    pub fn check(&mut self, ok: bool, check: &str, message: impl Into<String>) {
        self.diag(if ok { Level::Info } else { Level::Error }, check, message);
    }

    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.level == Level::Error)
    }

    pub fn finish(self, mut manifest: Manifest) -> anyhow::Result<Manifest> {
        fs::create_dir_all(&self.dir)?;
        for (name, bytes) in &self.files {
            fs::write(self.dir.join(name), bytes)?;
            manifest.outputs.insert(name.clone(), sha256_hex(bytes));
        }
        manifest.diagnostics = self.diagnostics;
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        fs::write(self.dir.join(MANIFEST), bytes)?;
        Ok(manifest)
    }
}

/// Recomputes the checksum of every file listed in `dir/manifest.json` and
/// returns the names that are missing or differ.
pub fn verify_manifest(dir: &Path) -> anyhow::Result<Vec<String>> {
    let manifest: Manifest = serde_json::from_slice(&fs::read(dir.join(MANIFEST))?)?;
    let mut bad = Vec::new();
    for (name, sum) in &manifest.outputs {
        match fs::read(dir.join(name)) {
            Ok(bytes) if &sha256_hex(&bytes) == sum => {}
            _ => bad.push(name.clone()),
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 123456.789, -0.0, 2f64.sqrt()] {
            assert_eq!(num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(1e-300), "1e-300");
    }
}
