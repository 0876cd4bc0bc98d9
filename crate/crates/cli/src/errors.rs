//! CLI error type with the documented exit-code mapping.
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success                                   |
//! | 1    | I/O failure or internal error             |
//! | 2    | usage error or bad configuration value    |
//! | 3    | training divergence / solver instability  |
//! | 4    | corrupt weight dump                       |
//! | 5    | under-resolved kernel width               |
//! | 6    | snapshot grid incompatible with the dump  |

use std::fmt;
use std::path::PathBuf;

use pinnspect_core::Error as CoreError;

/// Top-level CLI error; every variant knows its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed command line (unknown flag, missing argument, …).
    Usage(String),
    /// A configuration key was rejected; names the offending key.
    BadConfig {
        /// The offending config key (dotted path, as documented).
        key: String,
        /// Why the value was rejected.
        detail: String,
    },
    /// Training diverged; a last-finite checkpoint was written.
    Divergence {
        /// Step at which the loss became non-finite.
        step: u32,
        /// Path of the checkpoint dump holding the last finite parameters.
        checkpoint: PathBuf,
    },
    /// A time integrator blew up.
    Instability(String),
    /// A weight-dump file failed an integrity check; names the check.
    CorruptDump {
        /// The failed integrity check.
        check: String,
        /// Diagnostic detail.
        detail: String,
    },
    /// Kernel smoothing width below the resolvability limit.
    UnderResolved(String),
    /// Snapshot grid incompatible with the dump's domain.
    GridMismatch(String),
    /// Filesystem failure.
    Io {
        /// Path involved in the failing operation.
        path: PathBuf,
        /// Underlying error.
        source: std::io::Error,
    },
    /// Anything else (a numeric routine failed unexpectedly).
    Internal(String),
}

impl CliError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::BadConfig { .. } => 2,
            CliError::Divergence { .. } | CliError::Instability(_) => 3,
            CliError::CorruptDump { .. } => 4,
            CliError::UnderResolved(_) => 5,
            CliError::GridMismatch(_) => 6,
            CliError::Io { .. } | CliError::Internal(_) => 1,
        }
    }

    /// Shorthand for an [`CliError::Io`] value.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::BadConfig { key, detail } => write!(f, "bad config `{key}`: {detail}"),
            CliError::Divergence { step, checkpoint } => write!(
                f,
                "training diverged at step {step}; last finite checkpoint: {}",
                checkpoint.display()
            ),
            CliError::Instability(msg) => write!(f, "instability: {msg}"),
            CliError::CorruptDump { check, detail } => {
                write!(f, "corrupt dump: integrity check `{check}` failed: {detail}")
            }
            CliError::UnderResolved(msg) => write!(f, "under-resolved kernel: {msg}"),
            CliError::GridMismatch(msg) => write!(f, "grid mismatch: {msg}"),
            CliError::Io { path, source } => write!(f, "io error on {}: {source}", path.display()),
            CliError::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Map a core error in a *configuration* context: `Config` keeps its key,
/// everything else is internal.
pub fn config_error(err: CoreError) -> CliError {
    match err {
        CoreError::Config { key, detail } => CliError::BadConfig { key, detail },
        other => CliError::Internal(other.to_string()),
    }
}

/// Map a core error in a generic numeric context.
pub fn core_error(err: CoreError) -> CliError {
    match err {
        CoreError::Config { key, detail } => CliError::BadConfig { key, detail },
        CoreError::Instability { detail } => CliError::Instability(detail),
        other => CliError::Internal(other.to_string()),
    }
}

/// Convenience alias.
pub type Result<T> = std::result::Result<T, CliError>;
