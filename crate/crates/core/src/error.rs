use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{what} = {value} is outside {domain}")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("structure is not coherent: {0}")]
    NotCoherent(String),

    #[error("structure has {0} minimal path sets; at most {max} are supported", max = crate::systems::MAX_PATH_SETS)]
    TooManyPathSets(usize),

    #[error("distortion fails its invariants: {0}")]
    InvalidDistortion(String),

    #[error("grid is invalid: {0}")]
    InvalidGrid(String),

    #[error("no finite values left on the grid after skipping {skipped} flagged points")]
    EmptyGrid { skipped: usize },

    #[error("relation {0} is not supported by this operation")]
    UnsupportedRelation(String),

    #[error("quadrature did not converge on [{lo}, {hi}]: error estimate {estimate:e} after {intervals} subintervals")]
    QuadratureNonConvergence {
        lo: f64,
        hi: f64,
        estimate: f64,
        intervals: usize,
    },

    #[error(
        "rejection sampler hit its iteration cap ({attempts} attempts, acceptance rate {acceptance_rate:.4})"
    )]
    RejectionCap { attempts: u64, acceptance_rate: f64 },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("table format error: {0}")]
    Table(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Table(e.to_string())
    }
}
