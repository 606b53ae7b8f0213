use thiserror::Error;

use crate::model::Family;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("deformation gradient is not admissible (det F = {det})")]
    InvalidDeformation { det: f64 },

    #[error("Gent log argument is non-positive (1 - alpha*(I1 - 3) = {argument})")]
    GentDomain { argument: f64 },

    #[error("exponential argument {argument} exceeds the evaluation cap")]
    Overflow { argument: f64 },

    #[error("stretch must be positive, got {0}")]
    NonPositiveStretch(f64),

    #[error("operation requires the {expected} regime")]
    WrongRegime { expected: &'static str },

    #[error("invalid material parameters: {0}")]
    InvalidParameters(String),

    #[error("fingerprint has zero norm")]
    ZeroFingerprint,

    #[error("protocol mismatch: {0}")]
    ProtocolMismatch(String),

    #[error("Newton iteration diverged at load step {step} (residual {residual:e})")]
    NewtonDivergence { step: usize, residual: f64 },

    #[error("mesh is degenerate: {0}")]
    MeshDegenerate(String),

    #[error("reference energy integral is zero")]
    DivisionByZero,

    #[error("invalid grid or protocol: {0}")]
    InvalidGrid(String),

    #[error("{family} with theta={theta:?} alpha={alpha:?} at {location}: {source}")]
    AtGridPoint {
        family: Family,
        theta: Vec<f64>,
        alpha: Vec<f64>,
        location: String,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable category name, used for CLI exit reporting.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidDeformation { .. } => "InvalidDeformation",
            Error::GentDomain { .. } => "GentDomainError",
            Error::Overflow { .. } => "OverflowError",
            Error::NonPositiveStretch(_) => "NonPositiveStretch",
            Error::WrongRegime { .. } => "WrongRegime",
            Error::InvalidParameters(_) => "InvalidParameters",
            Error::ZeroFingerprint => "ZeroFingerprint",
            Error::ProtocolMismatch(_) => "ProtocolMismatch",
            Error::NewtonDivergence { .. } => "NewtonDivergence",
            Error::MeshDegenerate(_) => "MeshDegenerate",
            Error::DivisionByZero => "DivisionByZero",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::AtGridPoint { source, .. } => source.category(),
            Error::Format(_) => "FormatError",
            Error::Io(_) => "IoError",
            Error::Csv(_) => "CsvError",
            Error::Json(_) => "JsonError",
        }
    }

    /// True for errors raised by the constitutive law itself (domain limits).
    pub fn is_material_domain(&self) -> bool {
        matches!(
            self,
            Error::InvalidDeformation { .. } | Error::GentDomain { .. } | Error::Overflow { .. }
        )
    }
}
