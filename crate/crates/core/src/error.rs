use thiserror::Error;

use crate::model::ResolveError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown factor '{0}'")]
    UnknownFactor(String),
    #[error("'{0}' is not a quality aspect")]
    NotAnAspect(String),
    #[error("unknown measure '{0}'")]
    UnknownMeasure(String),
    #[error("factor '{0}' has no evaluation")]
    NoEvaluation(String),
    #[error("evaluation cycle through factor '{0}'")]
    EvaluationCycle(String),
    #[error("evaluation of '{0}' has an invalid weight assignment")]
    InvalidWeights(String),
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("utility function needs min < max, got min={min} max={max}")]
    InvalidUtility { min: f64, max: f64 },

    #[error("{line}:{column}: syntax error: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: schema violation: {message}")]
    Schema { line: usize, column: usize, message: String },
    #[error("unsupported format version '{0}', expected \"1\"")]
    FormatVersion(String),

    #[error("calibration needs at least {min} baseline values, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("calibration value {0} is negative")]
    NegativeSample(f64),
    #[error("degenerate-thresholds: calibration of '{measure}' produced min = max = {value}")]
    DegenerateThresholds { measure: String, value: f64 },
    #[error("quartile of an empty sample")]
    EmptySample,

    #[error("ranking must contain at least one element")]
    EmptyRanking,
    #[error("malformed ranking: {0}")]
    MalformedRanking(String),

    #[error("rank vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("rank vectors list different items")]
    LabelMismatch,
    #[error("correlation undefined: a rank vector has zero variance")]
    ZeroVariance,

    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Input(String),
}
