use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian: max deviation {deviation:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("map is not completely positive: min Choi eigenvalue {min_eig:.3e}")]
    NotCompletelyPositive { min_eig: f64 },

    #[error("Kraus set is not trace preserving: deviation {0:.3e}")]
    NotTracePreserving(f64),

    #[error("channel has no Kraus representation")]
    MissingKraus,

    #[error("input is not a normalized state: deviation {0:.3e}")]
    NotAState(f64),

    #[error("q = {q} lies outside the complete-positivity range [{lo}, 1]")]
    OutsideCpRange { q: f64, lo: f64 },

    #[error("separability undecidable by PPT for dA*dB = {0} > 6")]
    SeparabilityUndecidable(usize),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("channel file parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
