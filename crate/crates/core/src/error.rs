use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("beta shape `{name}` must be positive and finite, got {value}")]
    InvalidShape { name: &'static str, value: f64 },

    #[error("x must lie in [0, 1], got {0}")]
    OutsideUnitInterval(f64),

    #[error("theta must lie strictly inside (0, 1), got {0}")]
    ThetaOutOfRange(f64),

    #[error("k = {k} is outside 0..={n}")]
    BinomialIndex { n: u64, k: u64 },

    #[error("log_sum_exp needs at least one term")]
    EmptyInput,

    #[error("NaN is not a valid log value")]
    NanLogValue,

    #[error("continued fraction did not converge within {iterations} iterations (a = {a}, b = {b}, x = {x})")]
    NoConvergence {
        a: f64,
        b: f64,
        x: f64,
        iterations: usize,
    },

    #[error("trial count n must be at least 1")]
    ZeroTrials,

    #[error("success count y = {y} exceeds trial count n = {n}")]
    SuccessesExceedTrials { n: u64, y: u64 },

    #[error("boundary z must lie strictly inside (0, 1), got {0}")]
    BoundaryOutOfRange(f64),

    #[error("theta fraction must be positive with fraction * z < 1, got fraction = {fraction}, z = {z}")]
    InvalidFraction { fraction: f64, z: f64 },

    #[error("invalid n grid: {0}")]
    InvalidGrid(String),

    #[error("rounded success count {y} is outside 0..={n}")]
    RoundedOutOfRange { n: u64, y: i64 },
}
