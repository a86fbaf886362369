//! Run manifests: written before any artifact and rewritten on completion,
//! holding everything needed to re-execute the run.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::atomic;
use crate::config::Config;
use crate::error::{AppError, Result};

pub const FILE_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTiming {
    pub label: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub code_version: String,
    /// Fully resolved configuration, overrides included.
    pub config: Config,
    pub basis_checksum: Option<String>,
    /// Per-sample noise checksums (studies) or the single run's checksum.
    pub noise_checksums: Vec<String>,
    /// Artifacts relative to the output directory.
    pub files: Vec<String>,
    pub status: String,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
    pub runs: Vec<RunTiming>,
}

/// A manifest being filled in over the course of a command.
pub struct ManifestWriter {
    path: PathBuf,
    start: Instant,
    pub manifest: RunManifest,
}

impl ManifestWriter {
    /// Writes the initial manifest (status `running`).
    pub fn begin(command: &str, config: &Config) -> Result<Self> {
        let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let w = Self {
            path: config.out.join(FILE_NAME),
            start: Instant::now(),
            manifest: RunManifest {
                command: command.to_string(),
                code_version: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")).to_string(),
                config: config.clone(),
                basis_checksum: None,
                noise_checksums: Vec::new(),
                files: Vec::new(),
                status: "running".into(),
                started_unix,
                wall_clock_seconds: 0.0,
                runs: Vec::new(),
            },
        };
        w.flush()?;
        Ok(w)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn add_file(&mut self, name: &str) {
        if !self.manifest.files.iter().any(|f| f == name) {
            self.manifest.files.push(name.to_string());
        }
    }

    pub fn time(&mut self, label: impl Into<String>, seconds: f64) {
        self.manifest.runs.push(RunTiming {
            label: label.into(),
            seconds,
        });
    }

    pub fn flush(&self) -> Result<()> {
        let mut json = serde_json::to_vec_pretty(&self.manifest).map_err(|e| AppError::Format(e.to_string()))?;
        json.push(b'\n');
        atomic::write_bytes(&self.path, &json)
    }

    /// Records the outcome and rewrites the manifest.
    pub fn finish(&mut self, status: &str) -> Result<()> {
        self.manifest.status = status.to_string();
        self.manifest.wall_clock_seconds = self.start.elapsed().as_secs_f64();
        self.flush()
    }
}

pub fn read(path: &Path) -> Result<RunManifest> {
    let text = std::fs::read(path).map_err(|e| AppError::io(path, e))?;
    serde_json::from_slice(&text).map_err(|e| AppError::Format(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_exists_before_finish_and_embeds_config() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = Config {
            out: dir.path().to_path_buf(),
            ..Config::default()
        };
        cfg.sim.nu = 0.123456789012345;
        let mut w = ManifestWriter::begin("simulate", &cfg).unwrap();
        assert_eq!(read(w.path()).unwrap().status, "running");
        w.add_file("trajectory.csv");
        w.add_file("trajectory.csv");
        w.finish("completed").unwrap();
        let m = read(w.path()).unwrap();
        assert_eq!(m.files, vec!["trajectory.csv"]);
        assert_eq!(m.status, "completed");
        assert_eq!(Config::load(w.path()).unwrap(), cfg);
    }
}
