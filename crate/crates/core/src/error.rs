use thiserror::Error;

/// Every failure the engine can report. Point-level variants (division,
/// branch cut, floors) mean "pick another sample", not "the code is wrong".
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("divisor magnitude {0:e} below the admissibility floor")]
    DivisionNearZero(f64),
    #[error("square root argument {re:e}{im:+e}i sits on the principal branch cut")]
    BranchCutViolation { re: f64, im: f64 },
    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),
    #[error("integer power {0} exceeds the cap of 64")]
    ExponentTooLarge(u32),
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    #[error("coordinate pole: sin(theta1) = {0:e}")]
    PoleSingularity(f64),
    #[error("inadmissible point: {0}")]
    InadmissiblePoint(String),
    #[error("negative square root argument for {name}: {value:e}")]
    NegativeSqrtArgument { name: &'static str, value: f64 },
    #[error("indices p1={p1} q1={q1} p2={p2} q2={q2} must all be odd")]
    UnsupportedParity { p1: u32, q1: u32, p2: u32, q2: u32 },
    #[error("Euclidean extras need k1 = k2 = 1 in the 4-parameter system")]
    WrongK,
    #[error("no admissible point after {0} draws")]
    SamplerExhausted(usize),
    #[error("{name}: log-log slope {slope:.4} is not within 0.01 of an integer")]
    NotPolynomial { name: String, slope: f64 },
    #[error("least-squares fit residual {residual:e} above threshold {threshold:e}")]
    FitFailure { residual: f64, threshold: f64 },
    #[error("integrator step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("unknown observable '{0}'")]
    UnknownObservable(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures caused by where a sample landed rather than by
    /// the input contract.
    pub fn is_point_failure(&self) -> bool {
        matches!(
            self,
            Error::DivisionNearZero(_)
                | Error::BranchCutViolation { .. }
                | Error::NonFinite(_)
                | Error::PoleSingularity(_)
                | Error::InadmissiblePoint(_)
                | Error::NegativeSqrtArgument { .. }
        )
    }
}

impl Error {
    /// Failures of the caller's input rather than of the run.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::UnsupportedParity { .. }
                | Error::WrongK
                | Error::ChartMismatch(_)
                | Error::UnknownObservable(_)
                | Error::ExponentTooLarge(_)
        )
    }
}
