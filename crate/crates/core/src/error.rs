use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian: max |M - M^dagger| = {defect:.3e} exceeds {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("Kadison gap operator is not Hermitian (defect {defect:.3e}); the map does not preserve Hermiticity")]
    NotHermitianIntermediate { defect: f64 },

    #[error("map is not unital: {0}")]
    NotUnital(String),

    #[error("parameter must be real: {0}")]
    NonRealParameter(String),

    #[error("parameters fail structural validation: {0}")]
    StructurallyInvalid(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("unsupported dimensions: {0}")]
    UnsupportedDimensions(String),

    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    #[error("family mismatch: {0}")]
    FamilyMismatch(String),

    #[error("invalid scan description: {0}")]
    SpecInvalid(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

pub type Result<T> = std::result::Result<T, Error>;
