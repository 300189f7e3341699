use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("arctan2 is undefined at the origin")]
    UndefinedAtOrigin,
    #[error("degenerate direction: location is parallel to the first axis (mu0 = {0:e})")]
    DegenerateDirection(f64),
    #[error("location vector has zero norm")]
    ZeroLocation,
    #[error("scatter matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("numerical domain error: {0}")]
    NumericalDomain(String),
    #[error("window ({lower}, {upper}) lies outside (-pi/2, pi/2) around the location; use the numeric CDF")]
    OutOfWindow { lower: f64, upper: f64 },
    #[error("quadrature did not converge: estimate {estimate}, error {error:e} after {subdivisions} subdivisions")]
    QuadratureNonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },
    #[error("objective is not finite at the starting point")]
    NonFiniteObjective,
    #[error("design matrix is rank deficient (rank {rank} < {cols} columns)")]
    RankDeficient { rank: usize, cols: usize },
    #[error("sequence has zero circular variance")]
    ZeroVariance,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("not enough observations: need at least {needed}, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Input(String),
    #[error("fit failed: {0}")]
    FitFailed(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
