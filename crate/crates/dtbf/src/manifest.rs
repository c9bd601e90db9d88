use serde::{Deserialize, Serialize};

/// Record of one CLI run, written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: String,
    /// SHA-256 of the canonical config; see [`crate::config::digest`].
    pub config_digest: String,
    pub seed: u64,
    pub tool_version: String,
    /// Files written by the run, excluding the manifest itself.
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
}

pub const MANIFEST_FILE: &str = "manifest.json";
