//! Output records and file writing.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "t,replica,observable,value,theory,window_ok";

/// One CSV row. `t` and `theory` are left empty when they do not apply.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Row {
    pub t: Option<f64>,
    pub replica: ReplicaLabel,
    pub observable: String,
    pub value: f64,
    pub theory: Option<f64>,
    pub window_ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum ReplicaLabel {
    Index(usize),
    /// Aggregate over replicas (`mean`, `median`, ...).
    Aggregate(&'static str),
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

pub(crate) fn render_csv(rows: &[Row]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let replica = match &r.replica {
            ReplicaLabel::Index(i) => i.to_string(),
            ReplicaLabel::Aggregate(name) => (*name).to_string(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            opt(r.t),
            replica,
            r.observable,
            r.value,
            opt(r.theory),
            r.window_ok
        );
    }
    out
}

/// A pass/fail comparison against a prediction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    /// Passes when `|measured − expected| < tolerance`.
    pub(crate) fn within(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.into(),
            measured,
            expected,
            tolerance,
            pass: (measured - expected).abs() < tolerance,
        }
    }
}

/// A reported number with no acceptance threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub name: String,
    pub value: f64,
    /// What the value would be under the reference model, if there is one.
    pub reference: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: String,
    pub params: serde_json::Value,
    pub checks: Vec<CheckRecord>,
    pub manifest_path: PathBuf,
    #[serde(default)]
    pub observations: Vec<Observation>,
    #[serde(default)]
    pub partial: bool,
}

impl Summary {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    /// Relative to the manifest's directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Which RNG stream of the master seed fed which part of the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamRecord {
    pub label: String,
    pub stream: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: String,
    /// The spec in config syntax; feeding it back to `run` repeats the run.
    pub spec: String,
    pub code_version: String,
    pub master_seed: u64,
    pub streams: Vec<StreamRecord>,
    pub wall_clock_seconds: f64,
    pub partial: bool,
    pub files: Vec<FileDigest>,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<RunManifest> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub(crate) fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<FileDigest> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(FileDigest {
        path: name.to_string(),
        sha256: hex::encode(Sha256::digest(contents)),
        bytes: contents.len() as u64,
    })
}
