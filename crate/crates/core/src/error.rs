use thiserror::Error;

/// Errors raised by the cohomology model, bundle constructors, criteria and I/O.
///
/// Mathematical failures of a criterion are not errors; they are reported
/// through a failing [`crate::report::CheckReport`]. An `Error` means the
/// inputs are malformed or mutually inconsistent.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("product of degrees {left} and {right} exceeds the top degree 8")]
    DegreeOverflow { left: usize, right: usize },
    #[error("expected a class of degree {expected}, found degree {found}")]
    WrongDegree { expected: usize, found: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("Sq2 is only modelled on degrees 2, 4 and 6 (got {0})")]
    UnsupportedSq2Degree(usize),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("{what} is not divisible by {divisor}")]
    NotDivisible { what: String, divisor: String },
    #[error("lift mismatch: {0}")]
    LiftMismatch(String),
    #[error("expression {expression} evaluates to the non-integer {value}; model or witness data is inconsistent")]
    NonIntegral { expression: String, value: String },
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed ({axiom}): {detail}")]
    Validation { axiom: String, detail: String },
    #[error("unknown manifold `{0}`")]
    UnknownManifold(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("search space has {size} points, above the cap of {cap}")]
    SpaceTooLarge { size: u128, cap: u128 },
    #[error("window of {window} points is too small for every trial period (need at least {needed})")]
    WindowTooSmall { window: usize, needed: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
