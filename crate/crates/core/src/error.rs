use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("point must lie in the open unit ball, got |z| = {norm}")]
    OutsideBall { norm: f64 },

    #[error("dimension {n} out of range (1..=8)")]
    BadDimension { n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("exponent range ({p_minus}, {p_plus}) violates 1 < p- <= p+ < inf")]
    ExponentRange { p_minus: f64, p_plus: f64 },

    #[error("density non-finite at node {node}")]
    NonFiniteDensity { node: usize },

    #[error("self-map leaves the ball: |phi(z)| = {modulus} at a validation sample")]
    NotSelfMap { modulus: f64 },

    #[error("bracket for the Luxemburg norm not found within {0} doublings")]
    BracketFailure(usize),

    #[error("unknown property check: {0}")]
    UnknownCheck(String),

    #[error("unresolved reference: {0}")]
    UnresolvedReference(String),

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed scenario file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
