use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariableAt { name: String, pos: usize },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable lists differ: {0}")]
    RingMismatch(String),

    #[error("expected {expected} coordinates, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Groebner basis computation exceeded the S-pair budget of {cap}")]
    ResourceCap { cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("polynomial is not monic of degree {degree} in `{var}`")]
    NotMonic { var: String, degree: u32 },

    #[error("center {center:?} is not admissible: {detail}")]
    InadmissibleCenter { center: Vec<String>, detail: String },

    #[error("no maximal contact element of the form c*x + g(others): {0}")]
    NoAlgebraicContact(String),

    #[error("center is not a coordinate subspace after tracked coordinate changes: {0}")]
    UnsupportedCenter(String),

    #[error("mark {0} is too large for the coefficient ideal (at most 8)")]
    MarkTooLarge(u64),

    #[error("blow-up budget of {0} steps exhausted")]
    BudgetExhausted(usize),

    #[error("cone is not simplicial")]
    NonSimplicial,

    #[error("ray {0} is not in the support of the fan")]
    RayOutsideSupport(String),

    #[error("invalid fan: {0}")]
    InvalidFan(String),

    #[error("trace rejected: {0}")]
    TraceRejected(String),

    #[error("malformed trace document: {0}")]
    TraceFormat(String),
}

impl Error {
    /// Parse-class errors (bad user input text).
    pub fn is_parse(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::UnknownVariableAt { .. } | Error::UnknownVariable(_) | Error::TraceFormat(_) | Error::InvalidFan(_)
        )
    }
}
