//! The JSON run manifest written next to every output set.

use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::RunError;

pub const FORMAT_VERSION: &str = "polarsolve-run/1";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub format_version: &'static str,
    pub experiment: String,
    pub config: Value,
    /// Solver diagnostics. `wall_time_s` is the only entry that varies
    /// between identical runs.
    pub diagnostics: Map<String, Value>,
    pub artifacts: Vec<Artifact>,
    pub exit_code: i32,
}

/// Writes `bytes` to `dir/file` and returns its manifest entry.
pub fn write_artifact(dir: &Path, file: &str, bytes: &[u8]) -> Result<Artifact, RunError> {
    let path = dir.join(file);
    std::fs::write(&path, bytes).map_err(|e| RunError::io(&path, e))?;
    Ok(Artifact {
        file: file.to_string(),
        bytes: bytes.len(),
        sha256: hex::encode(Sha256::digest(bytes)),
    })
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, dir: &Path) -> Result<(), RunError> {
        let path = dir.join(MANIFEST_FILE);
        std::fs::write(&path, self.to_json()).map_err(|e| RunError::io(&path, e))
    }
}

/// Checks every listed artifact against its recorded digest.
pub fn verify_artifacts(dir: &Path, manifest: &Value) -> Result<(), String> {
    let artifacts = manifest["artifacts"]
        .as_array()
        .ok_or("manifest has no artifact list")?;
    for a in artifacts {
        let file = a["file"].as_str().ok_or("artifact without a file name")?;
        let bytes = std::fs::read(dir.join(file)).map_err(|e| format!("{file}: {e}"))?;
        if a["sha256"].as_str() != Some(hex::encode(Sha256::digest(&bytes)).as_str()) {
            return Err(format!("{file}: digest mismatch"));
        }
    }
    Ok(())
}
