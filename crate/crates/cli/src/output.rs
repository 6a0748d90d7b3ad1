use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

#[derive(Debug, Serialize)]
struct OutputFile {
    file: String,
    bytes: usize,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Timing {
    step: String,
    seconds: f64,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    version: &'static str,
    command: &'a str,
    inputs: &'a RunConfig,
    timings: &'a [Timing],
    outputs: &'a [OutputFile],
}

/// Writes run outputs under one directory and records them in `manifest.json`.
pub struct OutputDir {
    dir: PathBuf,
    started: Instant,
    step: Instant,
    timings: Vec<Timing>,
    files: Vec<OutputFile>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let now = Instant::now();
        Ok(Self {
            dir: dir.to_path_buf(),
            started: now,
            step: now,
            timings: Vec::new(),
            files: Vec::new(),
        })
    }

    /// Records the time since the previous step.
    pub fn lap(&mut self, step: &str) {
        let now = Instant::now();
        self.timings.push(Timing {
            step: step.to_string(),
            seconds: (now - self.step).as_secs_f64(),
        });
        self.step = now;
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
        self.files.push(OutputFile {
            file: name.to_string(),
            bytes: contents.len(),
            sha256: hex(&Sha256::digest(contents.as_bytes())),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn finish(mut self, command: &str, inputs: &RunConfig) -> Result<()> {
        self.timings.push(Timing {
            step: "total".into(),
            seconds: self.started.elapsed().as_secs_f64(),
        });
        let manifest = Manifest {
            version: env!("CARGO_PKG_VERSION"),
            command,
            inputs,
            timings: &self.timings,
            outputs: &self.files,
        };
        let path = self.dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// CSV text from a header and rows, newline-terminated.
pub fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}
