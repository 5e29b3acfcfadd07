use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("custom root list is not closed under its own reflections")]
    NonClosedSystem,
    #[error("multiplicity {0} is negative")]
    NegativeMultiplicity(f64),
    #[error("root vector is zero")]
    ZeroRoot,
    #[error("reflection group exceeded {cap} elements")]
    ClosureOverflow { cap: usize },
    #[error("point lies on a reflection hyperplane")]
    OnWall,
    #[error("quadrature did not converge within {cells} cells (value {value:e}, error {error:e})")]
    NoConvergence { cells: usize, value: f64, error: f64 },
    #[error("full-space integral requested for a field without a decay declaration")]
    UnboundedDomain,
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("kernel argument |x·y| = {0} exceeds the series cap")]
    ArgumentTooLarge(f64),
    #[error("unsupported root system: {0}")]
    UnsupportedRootSystem(String),
    #[error("heat kernel time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("semigroup time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("Besov smoothness must be negative, got {0}")]
    NonNegativeS(f64),
    #[error("integral diverges: {0}")]
    DivergentIntegral(String),
    #[error("parameter out of range: {0}")]
    ParameterRange(String),
    #[error("mass must be nonnegative, got {0}")]
    NegativeMass(f64),
    #[error("field is unbounded or lacks compact support: {0}")]
    UnboundedField(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
