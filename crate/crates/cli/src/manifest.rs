use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use padeclust::experiments::ExperimentConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Provenance of a run directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub started_at: String,
    pub finished_at: String,
    /// The config exactly as run, overrides applied.
    pub config: ExperimentConfig,
    /// File name to lowercase hex SHA-256.
    pub digests: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(
        config: &ExperimentConfig,
        started: DateTime<Utc>,
        finished: DateTime<Utc>,
        digests: BTreeMap<String, String>,
    ) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            started_at: started.to_rfc3339_opts(SecondsFormat::Millis, true),
            finished_at: finished.to_rfc3339_opts(SecondsFormat::Millis, true),
            config: config.clone(),
            digests,
        }
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(dir.join(MANIFEST_FILE), json + "\n")
    }

    pub fn read(dir: &Path) -> std::io::Result<Self> {
        let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
        serde_json::from_str(&text).map_err(std::io::Error::other)
    }
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    let bytes = fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Digests of the named files in `dir`.
pub fn digest_files(dir: &Path, names: &[&str]) -> std::io::Result<BTreeMap<String, String>> {
    names
        .iter()
        .map(|&n| Ok((n.to_string(), sha256_file(&dir.join(n))?)))
        .collect()
}
