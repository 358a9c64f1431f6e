use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the library. Each variant carries a stable `code()`
/// used by the CLI for machine-readable error objects and exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("descriptor mismatch: expected {expected}, found {found}")]
    DescriptorMismatch { expected: String, found: String },

    #[error("invalid group spec `{0}`: {1}")]
    GroupSpec(String, String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("empty tuple cannot be canonicalized")]
    EmptyTuple,

    #[error("degree {0} has no boundary")]
    DegreeTooLow(usize),

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("averaging set is empty")]
    EmptyAveragingSet,

    #[error("set element {0} does not lie in the normal subgroup")]
    NotInNormalSubgroup(String),

    #[error("normal subgroup is infinite")]
    InfiniteNormalSubgroup,

    #[error("chain is not a cycle; boundary has {terms} terms, e.g. {witness}")]
    NotACycle { terms: usize, witness: String },

    #[error("push-forward is nonzero on the orbit of {orbit}")]
    NonzeroPushforward { orbit: String },

    #[error("filling consistency check failed; residual has {terms} terms, e.g. {witness}")]
    FillingResidual { terms: usize, witness: String },

    #[error("invalid normed module: {0}")]
    InvalidModule(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no filling exists within the truncation")]
    NoFillingInTruncation,

    #[error("linear program error: {0}")]
    LinearProgram(String),
}

impl Error {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DescriptorMismatch { .. } => "descriptor_mismatch",
            Error::GroupSpec(..) => "group_spec",
            Error::InvalidElement(_) => "invalid_element",
            Error::EmptyTuple => "empty_tuple",
            Error::DegreeTooLow(_) => "degree_too_low",
            Error::DegreeMismatch { .. } => "degree_mismatch",
            Error::EmptyAveragingSet => "empty_averaging_set",
            Error::NotInNormalSubgroup(_) => "not_in_normal_subgroup",
            Error::InfiniteNormalSubgroup => "infinite_normal_subgroup",
            Error::NotACycle { .. } => "not_a_cycle",
            Error::NonzeroPushforward { .. } => "nonzero_pushforward",
            Error::FillingResidual { .. } => "filling_residual",
            Error::InvalidModule(_) => "invalid_module",
            Error::Unsupported(_) => "unsupported",
            Error::Config(_) => "invalid_config",
            Error::NoFillingInTruncation => "no_filling_in_truncation",
            Error::LinearProgram(_) => "linear_program",
        }
    }

    /// Whether the error means "no solution within the requested truncation"
    /// rather than invalid input.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::NoFillingInTruncation)
    }
}
