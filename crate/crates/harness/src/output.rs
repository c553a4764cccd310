use std::path::{Path, PathBuf};
use std::process::Command;

use serde::Serialize;

use crate::error::{HarnessError, Result};

/// Full-precision scientific notation (17 significant digits).
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Collects the artifacts of one experiment under its output directory.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| HarnessError::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Relative paths of every artifact written so far.
    pub fn written(&self) -> &[String] {
        &self.written
    }

    pub fn path(&self, relative: &str) -> Result<PathBuf> {
        let p = self.root.join(relative);
        if let Some(parent) = p.parent() {
            std::fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
        }
        Ok(p)
    }

    pub fn record(&mut self, relative: &str) {
        self.written.push(relative.to_string());
    }

    pub fn write_csv<I>(&mut self, relative: &str, header: &[&str], rows: I) -> Result<()>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let path = self.path(relative)?;
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for row in rows {
            debug_assert_eq!(row.len(), header.len());
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| HarnessError::io(&path, e))?;
        self.record(relative);
        Ok(())
    }

    pub fn write_json(&mut self, relative: &str, value: &impl Serialize) -> Result<()> {
        let path = self.path(relative)?;
        let text = serde_json::to_string_pretty(value).expect("manifest serializes");
        std::fs::write(&path, text + "\n").map_err(|e| HarnessError::io(&path, e))?;
        self.record(relative);
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub experiment: String,
    pub version: String,
    /// `completed`, `diverged` or `failed`.
    pub status: String,
    pub wall_time_s: f64,
    /// The effective configuration as TOML.
    pub config: String,
    pub outputs: Vec<String>,
    pub summary: serde_json::Value,
}

/// `git describe` of the working tree when available, else the package
/// version.
pub fn version_string() -> String {
    let fallback = format!("v{}", env!("CARGO_PKG_VERSION"));
    Command::new("git")
        .args(["describe", "--tags", "--always", "--dirty"])
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .map(|s| format!("{fallback}-{s}"))
        .unwrap_or(fallback)
}
