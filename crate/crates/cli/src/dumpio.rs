//! Binary weight-dump file format (`.pswd`).
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! offset  size   content
//! 0       4      magic "PSWD"
//! 4       4      u32 file format version (current: 2)
//! 8       8      u64 header length H in bytes
//! 16      H      UTF-8 JSON header (see [`DumpHeader`])
//! 16+H    …      payload: per layer, row-major weight entries then bias
//!                entries, each an f64 in IEEE-754 little-endian
//! ```
//!
//! The JSON header carries everything human-auditable (config echo, seed,
//! history summary, provenance, layer shapes); the payload carries the exact
//! bits of every parameter so that `load(save(dump)) == dump` and saving the
//! loaded value reproduces the file byte for byte.
//!
//! Version history: version 1 lacked the `creation` provenance block in the
//! header; [`migrate_header`] upgrades it on load by filling an empty block.
//! Unknown versions are rejected rather than guessed.

use std::path::Path;

use pinnspect_core::dump::{CreationMeta, HistorySummary, WeightDump};
use pinnspect_core::mat::Mat;
use pinnspect_core::net::{Activation, Layer, NetworkParams};
use pinnspect_core::pinn::PinnConfig;

use crate::errors::{CliError, Result};
use crate::io::write_atomic;

/// Magic bytes opening every dump file.
pub const MAGIC: [u8; 4] = *b"PSWD";
/// Current file format version.
pub const FILE_VERSION: u32 = 2;
/// Oldest file format version the migration stub understands.
pub const MIN_FILE_VERSION: u32 = 1;

/// The JSON header of a dump file.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DumpHeader {
    /// In-memory dump format version echo ([`pinnspect_core::dump::DUMP_FORMAT_VERSION`]).
    pub format_version: u32,
    /// Experiment seed.
    pub seed: u64,
    /// Configuration echo.
    pub config: PinnConfig,
    /// Training history summary.
    pub history: HistorySummary,
    /// Provenance; absent in version-1 files (filled by migration).
    #[serde(default)]
    pub creation: CreationMeta,
    /// Hidden activation name (redundant with `config`; kept so the payload
    /// is interpretable even if the config schema evolves).
    pub activation: String,
    /// Layer shapes in evaluation order; fixes the payload byte layout.
    pub layers: Vec<LayerShape>,
}

/// Shape of one layer's weight matrix (bias length equals `rows`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LayerShape {
    /// Output dimension.
    pub rows: usize,
    /// Input dimension.
    pub cols: usize,
}

fn corrupt(check: &str, detail: impl std::fmt::Display) -> CliError {
    CliError::CorruptDump {
        check: check.to_string(),
        detail: detail.to_string(),
    }
}

/// Upgrade a parsed header from `version` to the current file version.
///
/// Version 1 → 2: the `creation` block was introduced in version 2; serde's
/// `#[serde(default)]` already filled an empty one, so the stub only has to
/// acknowledge the version. Future bumps extend the match.
fn migrate_header(version: u32, header: DumpHeader) -> Result<DumpHeader> {
    match version {
        1 | 2 => Ok(header),
        other => Err(corrupt(
            "file-version",
            format!("unknown version {other} (this tool reads {MIN_FILE_VERSION}..={FILE_VERSION})"),
        )),
    }
}

/// Serialize a dump to the binary format.
pub fn encode(dump: &WeightDump) -> Vec<u8> {
    let header = DumpHeader {
        format_version: dump.format_version,
        seed: dump.seed,
        config: dump.config.clone(),
        history: dump.history.clone(),
        creation: dump.creation.clone(),
        activation: dump.params.activation.name().to_string(),
        layers: dump
            .params
            .layers
            .iter()
            .map(|l| LayerShape {
                rows: l.weights.rows(),
                cols: l.weights.cols(),
            })
            .collect(),
    };
    let header_json = serde_json::to_vec(&header).expect("header serialization cannot fail");
    let payload_len: usize = header
        .layers
        .iter()
        .map(|s| (s.rows * s.cols + s.rows) * 8)
        .sum();
    let mut out = Vec::with_capacity(16 + header_json.len() + payload_len);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FILE_VERSION.to_le_bytes());
    out.extend_from_slice(&(header_json.len() as u64).to_le_bytes());
    out.extend_from_slice(&header_json);
    for layer in &dump.params.layers {
        for v in layer.weights.as_slice() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in &layer.bias {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// Parse the binary format. Every failure names the integrity check.
pub fn decode(bytes: &[u8]) -> Result<WeightDump> {
    if bytes.len() < 16 {
        return Err(corrupt("magic", "file shorter than the fixed header"));
    }
    if bytes[0..4] != MAGIC {
        return Err(corrupt("magic", "not a PSWD weight dump"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if !(MIN_FILE_VERSION..=FILE_VERSION).contains(&version) {
        return Err(corrupt(
            "file-version",
            format!("unknown version {version} (this tool reads {MIN_FILE_VERSION}..={FILE_VERSION})"),
        ));
    }
    let header_len = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let header_end = 16u64
        .checked_add(header_len)
        .filter(|&e| e <= bytes.len() as u64)
        .ok_or_else(|| corrupt("header-length", "declared header exceeds the file"))?
        as usize;
    let header: DumpHeader = serde_json::from_slice(&bytes[16..header_end])
        .map_err(|e| corrupt("header-json", e))?;
    let header = migrate_header(version, header)?;

    let expected: usize = header
        .layers
        .iter()
        .map(|s| (s.rows * s.cols + s.rows) * 8)
        .sum();
    let payload = &bytes[header_end..];
    if payload.len() != expected {
        return Err(corrupt(
            "payload-size",
            format!(
                "layer shapes require {expected} payload bytes, file has {}",
                payload.len()
            ),
        ));
    }

    let activation = Activation::parse(&header.activation)
        .map_err(|_| corrupt("header-json", format!("unknown activation `{}`", header.activation)))?;
    let mut offset = 0usize;
    let mut read_f64 = |count: usize| -> Vec<f64> {
        let out = payload[offset..offset + count * 8]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        offset += count * 8;
        out
    };
    let mut layers = Vec::with_capacity(header.layers.len());
    for shape in &header.layers {
        let w = read_f64(shape.rows * shape.cols);
        let bias = read_f64(shape.rows);
        if w.iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(corrupt(
                "payload-finite",
                format!("non-finite parameter in a {}×{} layer", shape.rows, shape.cols),
            ));
        }
        let weights = Mat::from_fn(shape.rows, shape.cols, |i, j| w[i * shape.cols + j]);
        layers.push(Layer { weights, bias });
    }

    let dump = WeightDump {
        format_version: header.format_version,
        seed: header.seed,
        config: header.config,
        history: header.history,
        creation: header.creation,
        params: NetworkParams { layers, activation },
    };
    dump.validate().map_err(|e| corrupt("dump-consistency", e))?;
    Ok(dump)
}

/// Save a dump file atomically.
pub fn save(path: &Path, dump: &WeightDump) -> Result<()> {
    write_atomic(path, &encode(dump))
}
