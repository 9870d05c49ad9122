//! Error type shared by every module.

use thiserror::Error;

/// Failure modes of the numeric operations.
///
/// `Parse` and `InvalidParameter` are caller mistakes (bad flags, parameters
/// outside an operation's domain); everything else is a numeric or regime
/// failure reported by an operation whose preconditions were met.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ParseError: {0}")]
    Parse(String),

    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),

    /// Adaptive subdivision budget exhausted before the tolerance was met.
    #[error("NonConvergence: {0}")]
    NonConvergence(String),

    /// A derivative was requested at a point where the required moment diverges.
    #[error("MomentRequired: {0}")]
    MomentRequired(String),

    /// `B >= log(q-1)`: the landscape is concave and has no transition structure.
    #[error("ConcaveRegime: {0}")]
    ConcaveRegime(String),

    /// The steep unique zero-crossing condition does not hold.
    #[error("NoSteepness: {0}")]
    NoSteepness(String),

    /// The second derivative of the landscape does not cross zero exactly once.
    #[error("NotZeroCrossing: {0}")]
    NotZeroCrossing(String),

    #[error("DivergentSecondMoment: {0}")]
    DivergentSecondMoment(String),

    /// Operation requires the three-solution regime.
    #[error("WrongRegime: {0}")]
    WrongRegime(String),

    /// Two-atom calibration needs values of opposite sign at the two atoms.
    #[error("NoSignChange: {0}")]
    NoSignChange(String),

    /// Brute-force oracle is restricted to small color counts.
    #[error("TooLargeQ: {0}")]
    TooLargeQ(String),

    /// Exact enumeration would exceed the configuration budget.
    #[error("BudgetExceeded: {0}")]
    BudgetExceeded(String),
}

impl Error {
    /// Stable machine-readable name, as printed in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Parse(_) => "ParseError",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NonConvergence(_) => "NonConvergence",
            Error::MomentRequired(_) => "MomentRequired",
            Error::ConcaveRegime(_) => "ConcaveRegime",
            Error::NoSteepness(_) => "NoSteepness",
            Error::NotZeroCrossing(_) => "NotZeroCrossing",
            Error::DivergentSecondMoment(_) => "DivergentSecondMoment",
            Error::WrongRegime(_) => "WrongRegime",
            Error::NoSignChange(_) => "NoSignChange",
            Error::TooLargeQ(_) => "TooLargeQ",
            Error::BudgetExceeded(_) => "BudgetExceeded",
        }
    }

    /// True for caller mistakes, false for numeric failures.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::InvalidParameter(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
