use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("malformed rational `{0}`")]
    BadRational(String),
    #[error("zero denominator")]
    ZeroDenominator,
}

/// Errors raised across the library. Every variant carries a stable short
/// code (see [`Error::code`]) that the command line prints.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("weight {value} of `{label}` outside the allowed range")]
    WeightOutOfRange { label: String, value: String },
    #[error("zero weight on `{0}` where only positive weights are allowed")]
    ZeroWeight(String),
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("weight point lies on a wall: {0}")]
    OnWall(String),
    #[error("n = {n} exceeds the supported bound {max}")]
    TooLarge { n: usize, max: usize },
    #[error("weight data not componentwise comparable")]
    Incomparable,
    #[error("inadmissible data: {0}")]
    Inadmissible(String),
    #[error("flag {0} is not a tail")]
    NotATail(usize),
    #[error("flag {0} is not part of an edge")]
    NotAnEdge(usize),
    #[error("gluing requires weight-1 tails, flag {flag} has weight {weight}")]
    GluingWeight { flag: usize, weight: String },
    #[error("combined weight {0} exceeds 1")]
    WeightOverflow(String),
    #[error("tails do not share a vertex")]
    NotColocated,
    #[error("invalid graph: {}", .0.join("; "))]
    InvalidGraph(Vec<String>),
    #[error("invalid morphism: {}", .0.join("; "))]
    InvalidMorphism(Vec<String>),
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("document error at {path}: {message}")]
    Document { path: String, message: String },
    #[error("usage: {0}")]
    Usage(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Arith(_) => "bad-rational",
            Error::UnknownLabel(_) => "unknown-label",
            Error::DuplicateLabel(_) => "duplicate-label",
            Error::WeightOutOfRange { .. } => "weight-range",
            Error::ZeroWeight(_) => "zero-weight",
            Error::RankMismatch { .. } => "rank-mismatch",
            Error::OnWall(_) => "on-wall",
            Error::TooLarge { .. } => "too-large",
            Error::Incomparable => "incomparable",
            Error::Inadmissible(_) => "inadmissible",
            Error::NotATail(_) => "not-a-tail",
            Error::NotAnEdge(_) => "not-an-edge",
            Error::GluingWeight { .. } => "gluing-weight",
            Error::WeightOverflow(_) => "weight-overflow",
            Error::NotColocated => "not-colocated",
            Error::InvalidGraph(_) => "invalid-graph",
            Error::InvalidMorphism(_) => "invalid-morphism",
            Error::Mismatch(_) => "mismatch",
            Error::Document { .. } => "document",
            Error::Usage(_) => "usage",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
