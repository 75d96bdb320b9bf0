//! Run manifests: the configuration of a run plus the facts needed to check a
//! replay (dataset checksum, crate version) and wall time.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::{parse_pairs, ConfigError, Experiment, RunConfig};
use crate::experiments::{sha256_file, RunError, RunOutput};

pub const MANIFEST_FILE: &str = "manifest.txt";

/// Manifest text for a finished run.
pub fn manifest_text(cfg: &RunConfig, out: &RunOutput, wall_time_secs: f64) -> String {
    let mut s = cfg.to_text();
    let sha = out.dataset.as_ref().map_or("none", |d| d.sha256.as_str());
    let names: Vec<&str> = out.files.iter().map(|(n, _)| n.as_str()).collect();
    let _ = writeln!(s, "dataset_sha256: {sha}");
    let _ = writeln!(s, "version: {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "outputs: {}", names.join(","));
    let _ = writeln!(s, "wall_time_secs: {wall_time_secs:.3}");
    s
}

/// A parsed manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub config: RunConfig,
    /// `None` when the run read no dataset.
    pub dataset_sha256: Option<String>,
}

pub fn parse_manifest(text: &str) -> Result<Manifest, ConfigError> {
    let pairs = parse_pairs(text)?;
    let lookup = |key: &str| pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone());
    let experiment: Experiment = lookup("experiment")
        .ok_or_else(|| ConfigError::Invalid("manifest has no experiment key".into()))?
        .parse()?;
    let mut config = RunConfig::defaults(experiment);
    config.apply_all(&pairs)?;
    let dataset_sha256 = lookup("dataset_sha256").filter(|s| s != "none");
    Ok(Manifest { config, dataset_sha256 })
}

pub fn load_manifest(path: &Path) -> Result<Manifest, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_manifest(&text)
}

/// Fails when the dataset named in `manifest` no longer matches its checksum.
pub fn verify_dataset(manifest: &Manifest) -> Result<(), RunError> {
    let Some(expected) = &manifest.dataset_sha256 else {
        return Ok(());
    };
    let path = &manifest.config.galaxy;
    if !path.is_file() {
        return Err(RunError::MissingDataset(path.clone()));
    }
    let found = sha256_file(path)?;
    if &found != expected {
        return Err(RunError::Checksum {
            expected: expected.clone(),
            found,
        });
    }
    Ok(())
}

/// Writes every output file and the manifest into `dir`.
pub fn write_run(dir: &Path, cfg: &RunConfig, out: &RunOutput, wall_time_secs: f64) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    for (name, content) in &out.files {
        std::fs::write(dir.join(name), content)?;
    }
    std::fs::write(dir.join("summary.txt"), &out.summary)?;
    let path = dir.join(MANIFEST_FILE);
    std::fs::write(&path, manifest_text(cfg, out, wall_time_secs))?;
    Ok(path)
}
