use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use super::CliError;

/// One input file and its SHA-256 digest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputFile {
    pub role: String,
    pub path: PathBuf,
    pub sha256: String,
}

/// Everything needed to repeat a run: the resolved config (seed included)
/// and the digests of its inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: RunConfig,
    pub inputs: Vec<InputFile>,
    pub started_unix: u64,
    pub finished_unix: u64,
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl InputFile {
    /// Records `path` in absolute form so the manifest works from any
    /// directory.
    pub fn new(role: &str, path: &Path) -> Result<Self, CliError> {
        let path = fs::canonicalize(path)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
        Ok(InputFile {
            role: role.to_string(),
            sha256: sha256_file(&path)?,
            path,
        })
    }
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Data(format!("{}: malformed manifest: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        super::write_file(path, &text)
    }

    pub fn input(&self, role: &str) -> Option<&Path> {
        self.inputs
            .iter()
            .find(|i| i.role == role)
            .map(|i| i.path.as_path())
    }

    /// Fails if any input no longer has its recorded digest.
    pub fn verify_inputs(&self) -> Result<(), CliError> {
        for input in &self.inputs {
            let now = sha256_file(&input.path)?;
            if now != input.sha256 {
                return Err(CliError::Data(format!(
                    "{} changed since the run (sha256 {} != recorded {})",
                    input.path.display(),
                    now,
                    input.sha256
                )));
            }
        }
        Ok(())
    }
}
