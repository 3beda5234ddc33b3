use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension {n} outside the supported range 1..={max}")]
    DimensionOutOfRange { n: usize, max: usize },

    #[error("matrix {index} has a zero row or a zero column")]
    NotNz { index: usize },

    #[error("matrix {index} has a zero row {row}")]
    ZeroRow { index: usize, row: usize },

    #[error("empty matrix set")]
    EmptySet,

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} cap of {cap} exhausted")]
    CapExhausted { what: &'static str, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// True for errors that mean "the analysis ran out of budget" rather than
    /// "the input is wrong".
    pub fn is_cap_exhausted(&self) -> bool {
        matches!(self, Error::CapExhausted { .. })
    }
}
