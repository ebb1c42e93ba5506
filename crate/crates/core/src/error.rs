use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("empty sample")]
    EmptySample,

    #[error("Lambert W argument {0} is below -1/e")]
    LambertDomain(f64),

    #[error(
        "quadrature on [{lower}, {upper}] did not converge (estimate {estimate}, error {error})"
    )]
    Quadrature {
        lower: f64,
        upper: f64,
        estimate: f64,
        error: f64,
    },

    #[error("threshold {epsilon} is above the maximum influence {gamma_star}")]
    ThresholdAboveMaximum { epsilon: f64, gamma_star: f64 },

    #[error("all observations rejected (weight sum {0:e})")]
    AllRejected(f64),

    #[error("weighted design is rank deficient: rank {rank} of {columns} columns ({} deficient)", columns - rank)]
    RankDeficient { rank: usize, columns: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(&'static str),

    #[error("too few points: need {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("order statistic index k={k} out of range for n={n}")]
    OrderOutOfRange { k: usize, n: usize },

    #[error("non-positive order statistic {0} in log domain")]
    NonPositive(f64),
}
