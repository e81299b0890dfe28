use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const REPORT_VERSION: u32 = 1;

/// A flag whose value is unusable. Maps to exit code 2.
#[derive(Debug)]
pub struct UsageError {
    pub flag: String,
    pub msg: String,
}

impl UsageError {
    pub fn new(flag: &str, msg: impl Into<String>) -> Self {
        UsageError {
            flag: flag.to_string(),
            msg: msg.into(),
        }
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid value for {}: {}", self.flag, self.msg)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Timings {
    pub total_millis: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub version: u32,
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub outcome: Value,
    pub timings: Timings,
    pub config: Value,
}

/// Collects inputs and timing while a command runs.
pub struct Session {
    start: Instant,
    argv: Vec<String>,
    inputs: Vec<InputDigest>,
}

impl Session {
    pub fn new(argv: Vec<String>) -> Self {
        Session {
            start: Instant::now(),
            argv,
            inputs: Vec::new(),
        }
    }

    /// Reads a file and records its digest.
    pub fn read(&mut self, path: &Path) -> anyhow::Result<String> {
        let bytes = std::fs::read(path)
            .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
            bytes: bytes.len(),
        });
        String::from_utf8(bytes).map_err(|_| anyhow::anyhow!("{} is not UTF-8", path.display()))
    }

    pub fn finish(self, outcome: Value, config: Value) -> RunReport {
        RunReport {
            version: REPORT_VERSION,
            command: self.argv,
            inputs: self.inputs,
            outcome,
            timings: Timings {
                total_millis: self.start.elapsed().as_secs_f64() * 1000.0,
            },
            config,
        }
    }
}

/// Writes to `--out` when given, stdout otherwise.
pub fn emit(out: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
