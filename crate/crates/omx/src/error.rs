//! Crate-wide error type. Variants map onto the CLI exit codes documented
//! in the binary: config → 2, rejected fits/scans → 3, domain errors → 4.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument breaks a mathematical precondition (negative power,
    /// fidelity outside the unit interval, zero drive power, …).
    #[error("domain error: {0}")]
    Domain(String),

    /// A value-type invariant would be violated (κ_e > κ, γ_µ > γ, …).
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// Blue-detuned linear theory breaks down at cooperativity ≥ 1.
    #[error("phonon-lasing regime: blue-side cooperativity {coop} reaches the C ≥ 1 pole; the linear model does not apply")]
    LasingRegime { coop: f64 },

    /// A fit could not be performed or did not pass its sanity gates.
    #[error("fit rejected: {0}")]
    FitRejected(String),

    /// A calibration scan does not contain the features it must contain.
    #[error("scan rejected: {0}")]
    ScanRejected(String),

    /// Configuration file / CLI input problem.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed trace file.
    #[error("trace format error: {0}")]
    TraceFormat(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 config, 3 fit/scan rejected,
    /// 4 domain/parameter/lasing.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) | Error::Json(_) | Error::TraceFormat(_) => 2,
            Error::FitRejected(_) | Error::ScanRejected(_) => 3,
            Error::Domain(_) | Error::InvalidParam(_) | Error::LasingRegime { .. } => 4,
        }
    }
}
