use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a rational number: {0:?}")]
    BadRational(String),
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("family {family}: parameter {param} out of range: {reason}")]
    ParamOutOfRange {
        family: String,
        param: String,
        reason: String,
    },
    #[error("family {family}: missing parameter {param}")]
    MissingParam { family: String, param: String },
    #[error("family {0:?} is not factorable")]
    NotFactorable(String),
    #[error("family {0:?} is not a weighted shift")]
    NotShift(String),
    #[error("malformed family spec: {0}")]
    FamilySpec(String),
    #[error("ratio a_k/c_k is not strictly decreasing at k = {index}")]
    RhoNotDecreasing { index: usize },
    #[error("nonpositive entry {what}[{index}] = {value}")]
    NonPositiveEntry {
        what: &'static str,
        index: usize,
        value: String,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("negative diagonal entry d[{index}] = {value}")]
    NegativeDiagonal { index: usize, value: String },
    #[error("zero diagonal entry {what}[{index}] where a strict inequality is required")]
    ZeroDiagonal { what: &'static str, index: usize },
    #[error("tail sum cannot be certified: {0}")]
    TailUnavailable(String),
    #[error("weight w[{index}] is zero after the zero prefix")]
    ZeroWeightAfterPrefix { index: usize },
    #[error("weights vanish on the prefix only up to index {found:?}, expected prefix through {expected}")]
    PrefixShape { expected: i64, found: Option<usize> },
    #[error("index {index} below minimum {min}")]
    IndexTooSmall { index: usize, min: usize },
    #[error("eigensolver failure: {0}")]
    Eigen(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Errors that mean a mathematical hypothesis failed, as opposed to a
    /// malformed request.
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(
            self,
            Error::RhoNotDecreasing { .. }
                | Error::NonPositiveEntry { .. }
                | Error::NegativeDiagonal { .. }
                | Error::ZeroDiagonal { .. }
                | Error::ZeroWeightAfterPrefix { .. }
                | Error::PrefixShape { .. }
                | Error::TailUnavailable(_)
        )
    }
}
