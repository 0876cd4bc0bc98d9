//! The weight dump: a seeded, self-describing record of trained parameters.
//!
//! The dump is the forensic subject of the analysis pipeline — everything the
//! statistics are computed on, together with the configuration echo that makes
//! the run reproducible. The in-memory type lives here; the on-disk encoding
//! (header + raw payload) belongs to the I/O layer so the core stays free of
//! file formats.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::NetworkParams;
use crate::pinn::{PinnConfig, TrainOutcome};

/// Current dump format version. Readers must reject unknown versions rather
/// than guess.
pub const DUMP_FORMAT_VERSION: u32 = 1;

/// Deterministic summary of a training run (no wall-clock data — dumps from
/// identical `(config, seed)` must be byte-identical).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistorySummary {
    /// Optimizer steps actually completed.
    pub steps_run: u32,
    /// Final full-collocation-set total loss.
    pub final_total: f64,
    /// Final residual term.
    pub final_residual: f64,
    /// Final initial-condition term.
    pub final_ic: f64,
    /// Final boundary term.
    pub final_bc: f64,
    /// Step at which training diverged, if it did (parameters are then the
    /// last finite checkpoint).
    pub diverged_at: Option<u32>,
}

impl HistorySummary {
    /// Summarize a training outcome. Prefers the last full-set evaluation;
    /// falls back to the last per-step record when no full evaluation exists.
    pub fn from_outcome(outcome: &TrainOutcome) -> Self {
        let last_full = outcome.history.full_evals.last();
        let last_step = outcome.history.steps.last();
        let (total, residual, ic, bc) = match last_full.or(last_step) {
            Some(r) => (r.total, r.residual, r.ic, r.bc),
            None => (0.0, 0.0, 0.0, 0.0),
        };
        HistorySummary {
            steps_run: outcome.history.steps.last().map_or(0, |r| r.step),
            final_total: total,
            final_residual: residual,
            final_ic: ic,
            final_bc: bc,
            diverged_at: outcome.diverged_at,
        }
    }
}

/// Provenance of a dump. Only deterministic fields: the writing tool's name
/// and version and a digest of the canonical configuration text.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CreationMeta {
    /// Name of the producing tool.
    pub tool: String,
    /// Version of the producing tool.
    pub tool_version: String,
    /// Hex digest of the canonical configuration encoding.
    pub config_digest: String,
}

/// A complete weight dump: parameters plus everything needed to reproduce
/// and audit them.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDump {
    /// Format version ([`DUMP_FORMAT_VERSION`] when freshly created).
    pub format_version: u32,
    /// Experiment seed.
    pub seed: u64,
    /// Configuration echo.
    pub config: PinnConfig,
    /// Training summary.
    pub history: HistorySummary,
    /// Provenance (filled by the writing tool; empty in-memory default).
    pub creation: CreationMeta,
    /// The trained parameters.
    pub params: NetworkParams,
}

impl WeightDump {
    /// Package a training outcome as a dump.
    pub fn from_outcome(config: &PinnConfig, outcome: &TrainOutcome) -> Self {
        WeightDump {
            format_version: DUMP_FORMAT_VERSION,
            seed: config.seed,
            config: config.clone(),
            history: HistorySummary::from_outcome(outcome),
            creation: CreationMeta::default(),
            params: outcome.params.clone(),
        }
    }

    /// Indices (into `params.layers`) of the square hidden weight matrices —
    /// the forensic subjects.
    pub fn square_hidden_indices(&self) -> Vec<usize> {
        self.params.square_hidden_indices()
    }

    /// Validate internal consistency: known format, finite parameters, and
    /// the parameter shapes matching the configuration echo.
    pub fn validate(&self) -> Result<()> {
        if self.format_version != DUMP_FORMAT_VERSION {
            return Err(Error::config(
                "format_version",
                "unknown dump format version",
            ));
        }
        self.params.validate()?;
        let dims = self.config.dims();
        if self.params.layers.len() + 1 != dims.len() {
            return Err(Error::ShapeMismatch {
                layer: 0,
                detail: alloc::format!(
                    "config declares {} weight matrices, dump has {}",
                    dims.len() - 1,
                    self.params.layers.len()
                ),
            });
        }
        for (l, layer) in self.params.layers.iter().enumerate() {
            if layer.weights.rows() != dims[l + 1] || layer.weights.cols() != dims[l] {
                return Err(Error::ShapeMismatch {
                    layer: l,
                    detail: alloc::format!(
                        "config expects {}×{}, dump has {}×{}",
                        dims[l + 1],
                        dims[l],
                        layer.weights.rows(),
                        layer.weights.cols()
                    ),
                });
            }
        }
        if self.params.activation != self.config.activation {
            return Err(Error::config(
                "activation",
                "dump parameters disagree with config echo",
            ));
        }
        Ok(())
    }
}
