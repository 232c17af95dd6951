//! Deterministic CSV and manifest writing. All outputs for a command are
//! accumulated in memory and flushed together, so a failed run leaves no
//! partial files.

use crate::config::{config_hash, RunConfig};
use z2scatter::{Error, Result};

/// One pending output file.
#[derive(Clone, Debug)]
pub struct PendingFile {
    pub name: String,
    pub contents: String,
}

/// Collects files for one command run.
#[derive(Default)]
pub struct OutputSet {
    files: Vec<PendingFile>,
}

impl OutputSet {
    pub fn new() -> Self {
        OutputSet::default()
    }

    pub fn add(&mut self, name: &str, contents: String) {
        self.files.push(PendingFile {
            name: name.to_string(),
            contents,
        });
    }

    pub fn add_csv(&mut self, name: &str, header: &str, rows: &[Vec<String>]) {
        let mut text = String::with_capacity(rows.len() * 32 + header.len() + 1);
        text.push_str(header);
        text.push('\n');
        for row in rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        self.add(name, text);
    }

    /// Write everything under `dir`, creating it if needed.
    pub fn flush(&self, dir: &std::path::Path) -> Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::Config(format!("creating {}: {e}", dir.display())))?;
        let mut written = Vec::with_capacity(self.files.len());
        for file in &self.files {
            let path = dir.join(&file.name);
            std::fs::write(&path, &file.contents)
                .map_err(|e| Error::Config(format!("writing {}: {e}", path.display())))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Deterministic float formatting for CSV cells.
pub fn fmt(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x }; // normalize negative zero
    format!("{x:.12e}")
}

/// Build the run manifest: command, config hash, seed, crate version, and
/// the full canonical configuration for exact reruns.
pub fn manifest(command: &str, config: &RunConfig) -> String {
    let canonical = config.canonical();
    let hash = config_hash(&canonical);
    let mut out = String::new();
    out.push_str("[run]\n");
    out.push_str(&format!("command = {command:?}\n"));
    out.push_str(&format!("config_hash = \"{hash:016x}\"\n"));
    out.push_str(&format!("seed = {}\n", config.seed));
    out.push_str(&format!("version = {:?}\n\n", env!("CARGO_PKG_VERSION")));
    out.push_str("# Canonical configuration this run used.\n");
    for line in canonical.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out
}
