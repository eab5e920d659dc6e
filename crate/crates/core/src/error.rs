use thiserror::Error;

/// Every failure the library can report. Variants are grouped by the module
/// that raises them; the CLI maps input-side variants to exit code 2.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // geometry
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("exact volume is not available for this domain")]
    UnsupportedExact,
    #[error("curve mixes timelike and spacelike segments")]
    MixedCausalType,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("point too close to the sampled boundary for finite differences")]
    BoundaryTooClose,
    #[error("diamond corner lies outside the domain")]
    CornerOutsideDomain,

    // dirac / sigop
    #[error("quadrature too coarse: {0}")]
    QuadratureTooCoarse(String),

    // spectral
    #[error("eigensolver failed: {0}")]
    EigensolverFailure(String),
    #[error("spectrum has an unpaired eigenvalue {0}")]
    OddUnpairedEigenvalue(f64),
    #[error("Monte Carlo estimator accepted no samples")]
    ZeroAcceptance,
    #[error("operator is not chiral (massive): {0}")]
    NotChiral(String),

    // inverse
    #[error("reconstruction window of {0} cells is smaller than 2")]
    WindowTooSmall(usize),
    #[error("empty interval [{0}, {1}]")]
    EmptyInterval(f64, f64),
    #[error("test curve leaves the domain")]
    CurveLeavesDomain,
    #[error("root not found: {0}")]
    RootNotFound(String),

    // expressions and spec files
    #[error("syntax error at byte {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("evaluation error: {0}")]
    EvaluationError(String),
    #[error("schema error: {0}")]
    SchemaError(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invariant(msg: impl Into<String>) -> Error {
    Error::InvariantViolation(msg.into())
}
