//! Per-run manifest: config hash, seed, timestamp and source revision.

use std::path::{Path, PathBuf};
use std::process::Command as Process;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::commands::Outcome;
use crate::config::RunConfig;

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub pass: bool,
    pub config_sha256: String,
    pub seed: u64,
    pub timestamp_unix: u64,
    pub git_describe: String,
    pub files: Vec<String>,
}

pub fn config_hash(cfg: &RunConfig) -> String {
    Sha256::digest(cfg.to_toml().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn git_describe() -> String {
    Process::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .unwrap_or_else(|| "unknown".into())
}

/// Writes `<command>.manifest.toml` next to the outputs.
pub fn write_manifest(out: &Path, cfg: &RunConfig, outcome: &Outcome) -> Result<PathBuf> {
    let m = Manifest {
        command: outcome.command.name().into(),
        pass: outcome.pass,
        config_sha256: config_hash(cfg),
        seed: cfg.seed,
        timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        git_describe: git_describe(),
        files: outcome.files.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect(),
    };
    let path = out.join(format!("{}.manifest.toml", outcome.command.name()));
    std::fs::write(&path, toml::to_string(&m)?).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
