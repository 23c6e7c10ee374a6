//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by the learners, applications and harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A weight vector that cannot be normalised into a probability distribution.
    #[error("bad simplex point: {0}")]
    BadSimplexPoint(String),

    /// A vector whose length disagrees with the declared dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An offline local optimiser returned a distribution with a negative payoff coordinate.
    #[error("subproblem {subproblem}: update parameter has payoff slack {slack:e} below tolerance")]
    InfeasibleTheta { subproblem: usize, slack: f64 },

    /// The saddle oracle could not certify a nonpositive worst-case value.
    #[error("saddle response value {value:e} exceeds tolerance")]
    SaddleValuePositive { value: f64 },

    /// A linear program that should have a feasible point does not.
    #[error("linear program infeasible: {0}")]
    LpInfeasible(String),

    /// Feedback was fed to a bandit learner on a round where it did not explore.
    #[error("bandit feedback supplied on a non-exploration round")]
    FeedWithoutExplore,

    /// The value oracle was queried more than once in a bandit round.
    #[error("bandit contract violated: value oracle queried {calls} times in one round")]
    BanditContractViolation { calls: usize },

    /// Invalid parameters for a model or instance.
    #[error("bad parameters: {0}")]
    BadParams(String),

    /// The feasible region is too large for exhaustive enumeration.
    #[error("feasible region of size {size} exceeds the enumeration limit {limit}")]
    TooLargeToEnumerate { size: u128, limit: u128 },

    /// A scaling fit over nonpositive or too few data points. Carries the slope
    /// obtained after clamping values at 1e-9 when one could be computed.
    #[error("degenerate slope fit: {reason}")]
    DegenerateFit { reason: String, clamped_slope: Option<f64> },

    /// Malformed experiment configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that signal a broken learner/oracle contract rather than bad input.
    pub fn is_contract_violation(&self) -> bool {
        matches!(
            self,
            Error::InfeasibleTheta { .. }
                | Error::SaddleValuePositive { .. }
                | Error::LpInfeasible(_)
                | Error::FeedWithoutExplore
                | Error::BanditContractViolation { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
