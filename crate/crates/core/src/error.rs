use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid dual graph: {0}")]
    InvalidGraph(String),

    #[error("(g, n) = ({genus}, {legs}) is outside the admitted range (g > 0, excluding (1,0), (1,1), (2,0))")]
    OutsideAdmittedRange { genus: u32, legs: usize },

    #[error("3g - 3 + n = {dim} exceeds the configured edge bound {bound}")]
    EdgeBoundExceeded { dim: usize, bound: usize },

    #[error("graph is not stable")]
    NotStable,

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("cone {0} is not a ray")]
    NotARay(usize),

    #[error("unknown cone: {0}")]
    UnknownCone(String),

    #[error("operands live on different cone complexes")]
    ComplexMismatch,

    #[error("piecewise polynomial invalid on cone {cone}: {reason}")]
    InvalidPiecewise { cone: usize, reason: String },

    #[error("strict-support decomposition failed on cone {0}: residue not divisible by the cone monomial")]
    Decomposition(usize),

    #[error("subcomplex mismatch: {0}")]
    SubcomplexMismatch(String),

    #[error("piecewise-linear map is ill-defined: {0}")]
    IllDefinedMap(String),

    #[error("intersection numbers are only available in genus <= 1 (got genus {0})")]
    UnsupportedGenus(u32),

    #[error("expression has degree {found}, expected top degree {expected}")]
    WrongDegree { found: u32, expected: u32 },

    #[error("unsupported term for the pushforward along T: {0}")]
    UnsupportedPushforward(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
