//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A frequency query fell outside the anchor span of a piecewise spectrum.
    #[error("frequency {freq_hz} Hz outside anchor span [{low_hz}, {high_hz}] Hz")]
    FrequencyRange {
        freq_hz: f64,
        low_hz: f64,
        high_hz: f64,
    },

    /// A modem or channel configuration violates its invariants.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Modulation was asked to encode an empty payload.
    #[error("empty payload")]
    EmptyPayload,

    /// Payload exceeds the configured bit cap.
    #[error("payload of {len} bits exceeds cap of {cap} bits")]
    PayloadTooLong { len: usize, cap: usize },

    /// Waveform shapes disagree (length or sample rate).
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A waveform is too short for the requested operation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Preamble correlation peak stayed below the sync threshold.
    #[error(
        "bit synchronization failed: peak correlation {peak:.4} below threshold {threshold:.4}"
    )]
    SyncFailure { peak: f64, threshold: f64 },

    /// Malformed PBM payload.
    #[error("PBM parse error at byte {offset}: {message}")]
    PbmParse { offset: usize, message: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
