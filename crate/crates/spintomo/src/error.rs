use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bloch vector norm {norm} exceeds 1")]
    BlochNormTooLarge { norm: f64 },

    #[error("direction vector has near-zero or non-finite norm")]
    InvalidDirection,

    #[error("operator is not hermitian (max asymmetry {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("density operator trace {trace} differs from 1")]
    WrongTrace { trace: f64 },

    #[error("wave number must be positive and finite, got {value}")]
    InvalidWaveNumber { value: f64 },

    #[error("directions are not orthogonal (dot product {dot:e})")]
    NotOrthogonal { dot: f64 },

    #[error("scheme degenerate: {provenance}")]
    DegenerateScheme { provenance: String },

    #[error("probability has imaginary residue {residual:e}")]
    ImaginaryResidue { residual: f64 },

    #[error("probability {value} outside [0, 1]")]
    ProbabilityOutOfRange { value: f64 },

    #[error("no interior minimum found in [{lo}, {hi}]")]
    NoInteriorMinimum { lo: f64, hi: f64 },

    #[error("invalid plan: {0}")]
    InvalidPlan(String),
}
