//! Crate-wide error type.

use alloc::string::String;

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors produced by network evaluation, training, solvers and statistics.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Adjacent layer shapes do not chain, or an input has the wrong length.
    #[error("shape mismatch at layer {layer}: {detail}")]
    ShapeMismatch {
        /// Index of the offending layer (0 = first weight matrix).
        layer: usize,
        /// Human-readable description of the expected/actual shapes.
        detail: String,
    },

    /// A non-finite value appeared while evaluating the network.
    #[error("non-finite intermediate in layer {layer} (overflow or invalid input)")]
    NonFinite {
        /// Layer index at which the first non-finite value was observed.
        layer: usize,
    },

    /// The requested operation is not defined for this activation.
    #[error("unsupported activation: {detail}")]
    UnsupportedActivation {
        /// What was requested and why it is unsupported.
        detail: String,
    },

    /// Degenerate input: zero vector, zero variance, identical samples, …
    #[error("degenerate input: {detail}")]
    DegenerateInput {
        /// Which precondition failed.
        detail: String,
    },

    /// Invalid configuration value.
    #[error("configuration error for `{key}`: {detail}")]
    Config {
        /// Offending configuration key.
        key: String,
        /// Why the value is rejected.
        detail: String,
    },

    /// A time integrator or iteration blew up.
    #[error("numerical instability: {detail}")]
    Instability {
        /// Diagnostic message, including advice where available.
        detail: String,
    },

    /// An iterative numerical routine failed to converge.
    #[error("numerical failure: {detail}")]
    Numerical {
        /// Diagnostic message with a fingerprint of the input.
        detail: String,
    },

    /// Training produced a non-finite loss; the caller still holds the last
    /// finite checkpoint inside [`crate::pinn::TrainOutcome`].
    #[error("training diverged at step {step}: loss became non-finite")]
    Divergence {
        /// Optimizer step at which the loss first became non-finite.
        step: u32,
    },
}

impl Error {
    /// Shorthand for a [`Error::Config`] value.
    pub fn config(key: &str, detail: impl core::fmt::Display) -> Self {
        Error::Config {
            key: String::from(key),
            detail: alloc::format!("{detail}"),
        }
    }
}
