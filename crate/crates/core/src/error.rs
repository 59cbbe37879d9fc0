use thiserror::Error;

/// Errors produced by the ccspace library.
#[derive(Debug, Error)]
pub enum CcError {
    /// Mismatched sizes between a graph, partition, matrix or vector.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An argument outside its documented domain.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A co-membership vector that is not the image of any partition.
    /// Carries one violated triple: exactly two of the three pair
    /// variables are set, which breaks transitivity.
    #[error("invalid co-membership: triple ({i}, {j}, {k}) violates transitivity")]
    InvalidComembership { i: usize, j: usize, k: usize },

    /// Malformed text in a graph, partition, solutions or matrix file.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// The search hit its time limit before proving optimality.
    /// `best_bound` is the largest lower bound proven so far.
    #[error("incomplete search: time limit exceeded (best proven lower bound {best_bound})")]
    TimeLimit { best_bound: f64 },

    /// Exhaustive enumeration refused: the instance is too large.
    #[error("exhaustive guard: n = {n} exceeds the supported limit {max}")]
    ExhaustiveGuard { n: usize, max: usize },

    /// A recomputation from persisted artifacts disagreed with the report.
    #[error("internal cross-check failed: {0}")]
    CrossCheck(String),

    /// A pipeline stage failed; wraps the underlying error with its stage name.
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<CcError>,
    },
}

impl CcError {
    pub(crate) fn stage(stage: &'static str, source: CcError) -> CcError {
        CcError::Stage {
            stage,
            source: Box::new(source),
        }
    }

    /// Process exit code for this error: 2 bad input, 3 resource limit,
    /// 4 internal cross-check failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CcError::Dimension(_)
            | CcError::Parameter(_)
            | CcError::InvalidComembership { .. }
            | CcError::Parse(_)
            | CcError::Io(_)
            | CcError::Json(_)
            | CcError::ExhaustiveGuard { .. } => 2,
            CcError::TimeLimit { .. } => 3,
            CcError::CrossCheck(_) => 4,
            CcError::Stage { source, .. } => source.exit_code(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CcError>;
