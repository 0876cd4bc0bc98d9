//! Per-run manifest: enough to recognize that two runs were the same run.
//!
//! The manifest records the command, a digest over every semantic input
//! (configuration, seeds, input file bytes, relevant flags) and the artifact
//! format versions. Because every pipeline stage is deterministic in those
//! inputs, identical manifests imply byte-identical outputs. No clocks, no
//! hostnames, no absolute paths.

use std::path::Path;

use sha2::{Digest, Sha256};

use crate::dumpio::FILE_VERSION;
use crate::errors::Result;
use crate::io::write_atomic;

/// Version of the `report.json` schema emitted by `analyze`.
pub const REPORT_FORMAT_VERSION: u32 = 1;

/// The manifest file contents.
#[derive(Debug, serde::Serialize)]
pub struct Manifest {
    /// Producing tool name.
    pub tool: &'static str,
    /// Producing tool version.
    pub tool_version: &'static str,
    /// Subcommand that ran.
    pub command: &'static str,
    /// SHA-256 hex digest over the canonical run descriptor (all semantic
    /// inputs of the run).
    pub run_digest: String,
    /// Experiment seed when the run has one (train/analyze/compare).
    pub seed: Option<u64>,
    /// Format versions of the artifacts this tool reads/writes.
    pub artifact_versions: ArtifactVersions,
    /// File names written by the run (relative to the output directory).
    pub outputs: Vec<String>,
}

/// Format versions of the artifacts involved in a run.
#[derive(Debug, serde::Serialize)]
pub struct ArtifactVersions {
    /// Binary dump container version.
    pub weight_dump_file: u32,
    /// In-memory dump schema version echoed in headers.
    pub weight_dump: u32,
    /// `report.json` schema version.
    pub analysis_report: u32,
}

impl Default for ArtifactVersions {
    fn default() -> Self {
        ArtifactVersions {
            weight_dump_file: FILE_VERSION,
            weight_dump: pinnspect_core::dump::DUMP_FORMAT_VERSION,
            analysis_report: REPORT_FORMAT_VERSION,
        }
    }
}

/// Build a run digest from labeled input parts. Parts are length-prefixed so
/// that concatenation ambiguities cannot collide.
pub fn run_digest(command: &str, parts: &[(&str, &[u8])]) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    for (label, bytes) in parts {
        h.update([0u8]);
        h.update(label.as_bytes());
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex(&h.finalize())
}

/// SHA-256 hex digest of a byte string (config digests, input-file digests).
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

impl Manifest {
    /// Create a manifest for `command`.
    pub fn new(command: &'static str, run_digest: String, seed: Option<u64>) -> Self {
        Manifest {
            tool: "pinnspect",
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            run_digest,
            seed,
            artifact_versions: ArtifactVersions::default(),
            outputs: Vec::new(),
        }
    }

    /// Record an output file name.
    pub fn push_output(&mut self, name: impl Into<String>) {
        self.outputs.push(name.into());
    }

    /// Write `manifest.json` into `dir` (atomic, pretty-printed, sorted as
    /// declared).
    pub fn save(&self, dir: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serialization");
        text.push('\n');
        write_atomic(&dir.join("manifest.json"), text.as_bytes())
    }
}
