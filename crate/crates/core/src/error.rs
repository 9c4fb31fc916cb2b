use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot or eigenvalue {value:e} below tolerance)")]
    NotPositiveDefinite { value: f64 },
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty sample")]
    EmptySample,
    #[error("histogram needs at least 2 bins, got {0}")]
    InvalidBins(usize),
    #[error("graphs have different node counts ({0} vs {1})")]
    NodeCountMismatch(usize, usize),
    #[error("invalid graph: {0}")]
    InvalidGraph(&'static str),
    #[error("object variant does not match metric {metric}")]
    VariantMismatch { metric: &'static str },
    #[error("sample covariance of the responses is singular")]
    SingularSampleCovariance,
    #[error("predictor covariance is singular")]
    SingularCovariance,
    #[error("all off-diagonal distances are zero; kernel bandwidth is undefined")]
    DegenerateBandwidth,
    #[error("slicing produced an empty slice")]
    DegenerateSlicing,
    #[error("every surrogate column was degenerate ({skipped} skipped)")]
    NoUsableSurrogates { skipped: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
    #[error("leave-one-out fold {index} failed: {source}")]
    Fold {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}
