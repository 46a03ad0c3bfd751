use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("positivity violated at t = {time}: minimum eigenvalue {min_eigenvalue:.3e} (reduce dt)")]
    PositivityViolation { time: f64, min_eigenvalue: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical failures raised while integrating.
    pub fn is_numerical_abort(&self) -> bool {
        matches!(self, Error::PositivityViolation { .. } | Error::NonFinite(_))
    }
}
