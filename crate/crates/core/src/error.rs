use crate::mero::MeroError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coordinate system mismatch: {0}")]
    CoordMismatch(String),
    #[error("degree {degree} exceeds dimension {dim}")]
    DegreeTooLarge { degree: usize, dim: usize },
    #[error("pole error: {0}")]
    Pole(#[from] MeroError),
    #[error("{0}")]
    Parse(#[from] crate::parse::ParseError),
    #[error("unknown variety '{0}'")]
    UnknownVariety(String),
    #[error("unknown map '{0}'")]
    UnknownMap(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{file}: line {line}: field '{field}': {msg}")]
    Schema { file: String, line: usize, field: String, msg: String },
    #[error("parametrization does not satisfy the equation {0}")]
    InconsistentParametrization(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("missing alpha seed for {variety} in degree {q}")]
    MissingSeed { variety: String, q: usize },
    #[error("unresolved generator name '{0}'")]
    Unresolved(String),
    #[error("certificate degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("non-monomial input: {0}")]
    NonMonomial(String),
    #[error("degenerate arc: {0}")]
    DegenerateArc(String),
    #[error("no stabilization for {variety} in degree {q} by level cap {cap}")]
    NoStabilization { variety: String, q: usize, cap: usize },
    #[error("stabilization level {p} violates the bound {bound} for {variety} in degree {q}")]
    StabilizationBound { variety: String, q: usize, p: usize, bound: usize },
    #[error("seed sweep undecided for {variety} in degree {q} at multidegree {degree:?}")]
    Undecided { variety: String, q: usize, degree: Vec<u32> },
    #[error("oracle disagreement: {0}")]
    OracleDisagreement(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numeric: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
