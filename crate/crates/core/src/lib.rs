//! Batch 24-hour heart-rate-variability analysis and classifier benchmarking.
//!
//! The crate parses RR-interval recordings (RR-CSV), filters them to
//! normal-to-normal series, computes a panel of time-domain, frequency-domain,
//! nonlinear, and turbulence indexes over 24h/day/night segments, synthesizes
//! labeled cohorts, trains eight classifier families from scratch, and emits
//! benchmark tables, ROC curves, and group statistics.

pub mod eval;
pub mod features;
pub mod ingest;
pub mod lyapunov;
pub mod ml;
pub mod poincare;
pub mod prsa;
pub mod report;
pub mod spectral;
pub mod stats;
pub mod synth;
pub mod timedomain;
pub mod turbulence;
pub mod util;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum HrvError {
    #[error("line {0}: malformed row")]
    MalformedLine(usize),
    #[error("line {0}: onset time does not increase")]
    NonMonotonicTime(usize),
    #[error("line {0}: onset inconsistent with preceding rr interval")]
    OnsetMismatch(usize),
    #[error("recording contains no beats")]
    EmptyRecording,
    #[error("input is not valid UTF-8")]
    InvalidUtf8,
    #[error("fewer than 2 accepted NN intervals")]
    TooFewBeats,
    #[error("too few NN intervals for the requested index")]
    TooFewIntervals,
    #[error("series spans less than one analysis window")]
    SpanTooShort,
    #[error("no valid nearest neighbors for divergence tracking")]
    NoValidNeighbors,
    #[error("no anchors match the PRSA anchor rule")]
    NoAnchors,
    #[error("dataset too small for the requested split: {0}")]
    TooSmall(String),
    #[error("a class has too few rows to train on")]
    DegenerateClass,
    #[error("pooled covariance is singular even after diagonal loading")]
    SingularCovariance,
    #[error("score row has {got} features, model expects {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("cross-validation fold lost a class: {0}")]
    FoldDegenerate(String),
    #[error("ROC needs both classes present")]
    SingleClass,
    #[error("group statistics cell is degenerate: {0}")]
    DegenerateCell(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, HrvError>;

impl HrvError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        HrvError::Io {
            path: path.into(),
            source,
        }
    }
}
