use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty point set")]
    EmptyPointSet,

    #[error("empty label list")]
    EmptyLabels,

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("sample {index} has a non-finite feature value")]
    NonFinite { index: usize },

    #[error("duplicate sample index {0}")]
    DuplicateIndex(usize),

    #[error("unknown sample index {0}")]
    UnknownIndex(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("split precondition violated: {0}")]
    SplitPrecondition(String),

    #[error("split did not converge within {0} child constructions")]
    SplitDidNotConverge(usize),

    #[error("granulation did not converge within {max_iterations} iterations; {balls} balls remain ({impure} impure): {dump}")]
    GranulationDidNotConverge {
        max_iterations: usize,
        balls: usize,
        impure: usize,
        dump: String,
    },

    #[error("empty model: granulation left no balls")]
    EmptyModel,

    #[error("classifier rule mismatch: expected {expected}")]
    RuleMismatch { expected: &'static str },

    #[error("dataset is already normalized")]
    AlreadyNormalized,
}
