use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("undefined: zero variance in {0}")]
    ZeroVariance(String),

    #[error("arity mismatch: expected {expected} features, got {got}")]
    Arity { expected: usize, got: usize },

    /// The subject/video rating graph splits into independent pieces, so the
    /// score model is not identifiable across them.
    #[error("rating graph is disconnected into {} components: {components:?}", components.len())]
    Disconnected { components: Vec<Vec<String>> },

    #[error("{what} did not converge after {iterations} iterations (best objective {objective})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        best: Vec<f64>,
        objective: f64,
    },

    #[error("ids do not match: missing predictions for {missing_predictions:?}, missing mos for {missing_mos:?}")]
    IdMismatch {
        missing_predictions: Vec<String>,
        missing_mos: Vec<String>,
    },

    #[error("source {0} appears in both train and test")]
    SplitOverlap(String),

    #[error("every rater was rejected for video {0}")]
    AllRejected(String),
}
