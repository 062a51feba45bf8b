//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// One violated density-matrix invariant, with the magnitude of the breach.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityViolation {
    pub kind: DensityViolationKind,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityViolationKind {
    NotHermitian,
    TraceNotOne,
    NotPsd,
}

impl std::fmt::Display for DensityViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self.kind {
            DensityViolationKind::NotHermitian => "not Hermitian",
            DensityViolationKind::TraceNotOne => "trace != 1",
            DensityViolationKind::NotPsd => "not positive semidefinite",
        };
        write!(f, "{name} (magnitude {:.3e})", self.magnitude)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |a_ij - conj(a_ji)| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("dimension {dim} outside supported range 2..=5")]
    BadDim { dim: usize },

    #[error("Bloch vector has |v|^2 = {norm_sq} > 1")]
    InvalidBloch { norm_sq: f64 },

    #[error("invalid three-level state parameters: {reason}")]
    InvalidState { reason: String },

    #[error("case {case_id} is not defined for dimension {dim}")]
    BadCase { case_id: u8, dim: usize },

    #[error("vector is not normalized (|v| = {norm})")]
    NotNormalized { norm: f64 },

    #[error("vectors are not orthogonal (|<a|b>| = {overlap:.3e})")]
    NotOrthogonal { overlap: f64 },

    #[error("density matrix invalid: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidDensity { violations: Vec<DensityViolation> },

    #[error("projector set invalid: {reason}")]
    BadProjectors { reason: String },

    #[error("dataset is missing required entries: {what}")]
    MissingData { what: String },

    #[error("dataset correlator subset is {found}, but {family} requires {required}")]
    WrongSubset {
        family: String,
        found: String,
        required: String,
    },

    #[error("dataset variable kind does not match the condition family: {reason}")]
    WrongKind { reason: String },

    #[error("no declared quantum bound for family {family}")]
    UnknownFamily { family: String },

    #[error("invalid scan spec: {reason}")]
    InvalidSpec { reason: String },

    #[error("target overlap {target} is outside the attainable range [{min}, {max}]")]
    Unattainable { target: f64, min: f64, max: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv parse error: {reason}")]
    Csv { reason: String },

    #[error("internal invariant breach: {reason}")]
    Internal { reason: String },
}
