//! Append-only report directory with a JSON manifest.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub command: String,
    pub problem: String,
    pub seed: u64,
    pub exit_code: u8,
    pub files: Vec<String>,
}

pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    /// Writes `stem.ext`, or `stem-2.ext`, `stem-3.ext`, ... when taken.
    pub fn write(&mut self, stem: &str, ext: &str, content: &str) -> Result<PathBuf> {
        let mut path = self.dir.join(format!("{stem}.{ext}"));
        let mut k = 2;
        while path.exists() {
            path = self.dir.join(format!("{stem}-{k}.{ext}"));
            k += 1;
        }
        fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(
            path.file_name()
                .and_then(|n| n.to_str())
                .unwrap_or_default()
                .to_string(),
        );
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, stem: &str, value: &T) -> Result<PathBuf> {
        let text = serde_json::to_string_pretty(value)?;
        self.write(stem, "json", &(text + "\n"))
    }

    /// Appends this run to `manifest.json`.
    pub fn finish(self, command: &str, problem: &str, seed: u64, exit_code: u8) -> Result<()> {
        let path = self.dir.join("manifest.json");
        let mut entries: Vec<ManifestEntry> = if path.exists() {
            let text = fs::read_to_string(&path)?;
            let v: Value = serde_json::from_str(&text).context("reading manifest.json")?;
            serde_json::from_value(v).context("manifest.json is not a list of runs")?
        } else {
            Vec::new()
        };
        entries.push(ManifestEntry {
            command: command.into(),
            problem: problem.into(),
            seed,
            exit_code,
            files: self.files,
        });
        fs::write(&path, serde_json::to_string_pretty(&entries)? + "\n")?;
        Ok(())
    }
}
