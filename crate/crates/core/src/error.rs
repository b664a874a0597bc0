use thiserror::Error;

/// Errors raised by the library.
///
/// `Budget` is kept distinct from everything else because callers (the CLI in
/// particular) report compute-budget rejections with their own exit status.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("division by zero in rational literal")]
    ZeroDenominator,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("compute budget exceeded: {0}")]
    Budget(String),

    #[error("table length mismatch: {left} vs {right}")]
    LengthMismatch { left: u64, right: u64 },

    #[error("range [{start}, {end}] not covered by table of length {n_max}")]
    RangeOutsideTable { start: u64, end: u64, n_max: u64 },

    #[error("Dirichlet series is not a unit: f(1) = {0}")]
    NotUnit(i64),

    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error("phase precision budget exceeded: n = {n} at degree {degree}")]
    PhasePrecision { n: u64, degree: usize },

    #[error("negative weight {weight} at n = {n}")]
    NegativeWeight { n: u64, weight: f64 },

    #[error("leading coefficient is rational; irrational leading coefficient required")]
    RationalLeading,

    #[error("independent re-verification failed: {0}")]
    Verification(String),

    #[error("table format: {0}")]
    Format(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
