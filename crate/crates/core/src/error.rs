use thiserror::Error;

use crate::lifting::ObstructionWitness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension {0} is not supported (expected 1, 2 or 3)")]
    DimensionUnsupported(usize),
    #[error("grid of dimension {dim} at level {level} exceeds the sample cap")]
    GridTooLarge { dim: usize, level: usize },
    #[error("sample closure returned a non-finite value at cell {0}")]
    NonFiniteSample(usize),
    #[error("level {level} out of range 0..={max}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("mollifier radius {0} out of range")]
    EpsOutOfRange(f64),
    #[error("bad axis set for slicing: {0}")]
    BadAxisSet(String),
    #[error("difference order {m} must exceed smoothness {s}")]
    MTooSmall { m: usize, s: f64 },
    #[error("delta {0} out of range")]
    DeltaOutOfRange(f64),
    #[error("s*p = {0} is outside the validity range s*p < 1")]
    OutOfValidityRange(f64),
    #[error("Besov seminorm vanishes (constant input)")]
    DivisionByZeroSeminorm,
    #[error("invalid Besov parameters: {0}")]
    InvalidParams(String),
    #[error("modulus collapse |F| <= 1/2 at eps = {eps}, cell {cell}")]
    ModulusCollapse { eps: f64, cell: usize },
    #[error("topological obstruction: loop of {} cells with winding {}", .0.loop_cells.len(), .0.winding)]
    ObstructionDetected(Box<ObstructionWitness>),
    #[error("angular gap {gap} between cells {from} and {to} is too large for a principal increment")]
    DegenerateEdge { from: usize, to: usize, gap: f64 },
    #[error("test form is nonzero on boundary cell {0}")]
    SupportViolation(usize),
    #[error("vortex center is too close to a sample point")]
    CenterOnNode,
    #[error("invalid non-restriction spec: {0}")]
    SpecInvalid(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("values are not unit modulus at cell {0}")]
    NotUnimodular(usize),
    #[error("grid file format error: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Short machine-readable name, used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionUnsupported(_) => "DimensionUnsupported",
            Error::GridTooLarge { .. } => "GridTooLarge",
            Error::NonFiniteSample(_) => "NonFiniteSample",
            Error::LevelOutOfRange { .. } => "LevelOutOfRange",
            Error::EpsOutOfRange(_) => "EpsOutOfRange",
            Error::BadAxisSet(_) => "BadAxisSet",
            Error::MTooSmall { .. } => "MTooSmall",
            Error::DeltaOutOfRange(_) => "DeltaOutOfRange",
            Error::OutOfValidityRange(_) => "OutOfValidityRange",
            Error::DivisionByZeroSeminorm => "DivisionByZeroSeminorm",
            Error::InvalidParams(_) => "InvalidParams",
            Error::ModulusCollapse { .. } => "ModulusCollapse",
            Error::ObstructionDetected(_) => "ObstructionDetected",
            Error::DegenerateEdge { .. } => "DegenerateEdge",
            Error::SupportViolation(_) => "SupportViolation",
            Error::CenterOnNode => "CenterOnNode",
            Error::SpecInvalid(_) => "SpecInvalid",
            Error::DomainMismatch(_) => "DomainMismatch",
            Error::NotUnimodular(_) => "NotUnimodular",
            Error::Format(_) => "Format",
            Error::Io(_) => "Io",
        }
    }
}
