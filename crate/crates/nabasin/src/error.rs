use thiserror::Error;

/// Errors produced by the germ algebra, map families, solvers and the
/// dynamics engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no inverse registered for this map: {0}")]
    UnsupportedDirection(String),

    #[error("affine recurrence is not expanding at index {index}: |beta| = {modulus}")]
    ExpansionViolation { index: usize, modulus: f64 },

    #[error(
        "conjugation hypothesis violated at coordinate {coordinate}, index {index:?}, n = {n}: \
         expanding factor has modulus {modulus}"
    )]
    HypothesisViolation {
        coordinate: usize,
        index: Vec<u32>,
        n: usize,
        modulus: f64,
    },

    #[error("solver failed to converge: residual {residual:.3e} > tolerance {tol:.3e}\n{diagnostics}")]
    Convergence {
        residual: f64,
        tol: f64,
        diagnostics: String,
    },

    #[error("orbit overflowed at step {step}")]
    Overflow { step: usize },

    #[error("filtration radius search failed: {0}")]
    SearchFailure(String),

    #[error("orbit did not enter the handoff ball within {maxiter} steps")]
    NotInBasin { maxiter: usize },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("scenario schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
