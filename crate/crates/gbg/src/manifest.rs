use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Everything needed to reproduce a run: command line, resolved settings,
/// seeds, input hashes and tool version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub settings: serde_json::Value,
    pub seeds: BTreeMap<String, u64>,
    pub inputs: Vec<InputFile>,
    pub tool_version: String,
    pub started_unix: f64,
    pub finished_unix: f64,
}

pub fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

pub fn hash_file(path: &Path) -> std::io::Result<InputFile> {
    let bytes = std::fs::read(path)?;
    Ok(InputFile {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
        bytes: bytes.len() as u64,
    })
}

impl RunManifest {
    pub fn start(command: &str, settings: serde_json::Value, inputs: &[&Path]) -> std::io::Result<Self> {
        Ok(Self {
            command: command.into(),
            args: std::env::args().collect(),
            settings,
            seeds: BTreeMap::new(),
            inputs: inputs.iter().map(|p| hash_file(p)).collect::<Result<_, _>>()?,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            started_unix: unix_now(),
            finished_unix: 0.0,
        })
    }

    pub fn seed(mut self, name: &str, value: u64) -> Self {
        self.seeds.insert(name.into(), value);
        self
    }

    pub fn finish(&mut self) {
        self.finished_unix = unix_now();
    }
}
