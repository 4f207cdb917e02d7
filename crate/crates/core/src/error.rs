use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// An outcome has zero probability but a nonzero derivative in η, so the
    /// Fisher information diverges.
    #[error("outcome {index} has zero probability but nonzero derivative {derivative}")]
    SingularOutcome { index: usize, derivative: f64 },

    #[error("Fisher information is zero; the Cramér–Rao bound is unbounded")]
    ZeroInformation,

    #[error("Fisher information diverges at this point")]
    Divergent,

    #[error("quadrature did not converge: estimate {estimate}, error {error} after {subdivisions} subdivisions")]
    ConvergenceFailure {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("curves do not share the same total mean energy: {0}")]
    EnergyMismatch(String),

    #[error("bracket endpoint evaluation failed at η = {eta}: {reason}")]
    BracketError { eta: f64, reason: String },

    #[error("no heralding threshold: ξ = 1 gives {best}, below reference {reference}")]
    NoThreshold { best: f64, reference: f64 },

    #[error("maximum-likelihood estimate lies on the boundary η = {0}")]
    BoundaryEstimate(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
