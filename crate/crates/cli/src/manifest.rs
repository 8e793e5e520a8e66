//! Run manifests: enough to rerun a command and check its outputs byte for byte.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::error::{CliError, ConfigError};

pub const MANIFEST_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    /// Relative to the output directory for outputs, absolute for inputs.
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskTiming {
    pub name: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub manifest_version: u32,
    pub tool_version: String,
    pub command: String,
    /// Fully resolved configuration, flag overrides applied.
    pub config: Config,
    pub root_seed: u64,
    pub seed_rule: String,
    /// Prefactor of the spectral density `S(k)`.
    pub covariance_scale: f64,
    /// Prefactor matching `log 2` between two reference separations, for comparison.
    pub matched_calibration: f64,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub wall_seconds: f64,
    pub tasks: Vec<TaskTiming>,
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Run(format!("cannot read {}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Run(e.to_string()))?;
        std::fs::write(dir.join(MANIFEST_FILE), text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<RunManifest, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read manifest {}: {e}", path.display())))?;
        let m: RunManifest = serde_json::from_str(&text)
            .map_err(|e| ConfigError(format!("manifest {}: {e}", path.display())))?;
        if m.manifest_version != MANIFEST_VERSION {
            return Err(ConfigError(format!(
                "manifest version {} is not supported (expected {MANIFEST_VERSION})",
                m.manifest_version
            ))
            .into());
        }
        if m.tool_version != env!("CARGO_PKG_VERSION") {
            return Err(ConfigError(format!(
                "manifest written by version {}, this is {}",
                m.tool_version,
                env!("CARGO_PKG_VERSION")
            ))
            .into());
        }
        Ok(m)
    }
}
