//! Error type shared across the crate.

use std::path::PathBuf;

use crate::asymptotics::Parity;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("point cloud needs at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("spatial dimension must be at least 1")]
    ZeroDimension,

    #[error("coordinate array has {got} entries, expected {expected}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("row {row} has {got} coordinates, expected {expected}")]
    RaggedRow {
        row: usize,
        got: usize,
        expected: usize,
    },

    #[error("coordinate (point {point}, axis {axis}) is not finite")]
    NonFiniteCoord { point: usize, axis: usize },

    /// The state is identically zero, so no normalized shape exists.
    #[error("state is identically zero")]
    DegenerateZero,

    #[error("binomial route supports at most {max} steps, got {got}")]
    StepsTooLarge { got: u64, max: u64 },

    #[error("operation requires {expected} point count, got n = {n}")]
    WrongParity { expected: Parity, n: usize },

    #[error(
        "spectrum is not conjugate symmetric: imaginary residue {residue:.3e} \
         exceeds {limit:.3e}"
    )]
    NotConjugateSymmetric { residue: f64, limit: f64 },

    #[error("dominant coefficients vanish, ellipse is degenerate (|AD-BC| = {det:.3e})")]
    DegenerateEllipse { det: f64 },

    #[error("operation requires a 2-dimensional cloud, got d = {0}")]
    NotTwoDimensional(usize),

    #[error("growth rate needs two snapshots at distinct times, got {0}")]
    InsufficientSnapshots(usize),

    #[error("no snapshot recorded at t = {0}")]
    NoSuchSnapshot(u64),

    #[error(
        "evolution routes disagree at t = {t}: deviation {deviation:.3e} \
         exceeds {tolerance:.3e}"
    )]
    RouteMismatch {
        t: u64,
        deviation: f64,
        tolerance: f64,
    },

    #[error("invalid run config: {0}")]
    InvalidConfig(String),

    #[error("failed to write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("failed to encode JSON: {0}")]
    JsonEncode(String),

    #[error("failed to decode JSON: {0}")]
    JsonDecode(String),
}

impl Error {
    /// True for errors caused by unusable arguments or configuration, as
    /// opposed to runtime failures. The CLI maps these to exit code 2.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_)
                | Error::StepsTooLarge { .. }
                | Error::TooFewPoints(_)
                | Error::ZeroDimension
                | Error::ShapeMismatch { .. }
                | Error::RaggedRow { .. }
                | Error::NonFiniteCoord { .. }
        )
    }
}
