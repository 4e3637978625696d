use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point ({x}, {y}) lies on the skeleton: nearest boundary point is not unique")]
    SkeletonPoint { x: f64, y: f64 },
    #[error("point ({x}, {y}) is outside the eps-neighbourhood of the boundary")]
    OutsideNeighborhood { x: f64, y: f64 },
    #[error("outer normal is set-valued at the corner theta = {theta}")]
    NormalUndefinedAtCorner { theta: f64 },
    #[error("eps = {eps} must lie in (0, {limit})")]
    EpsTooLarge { eps: f64, limit: f64 },
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("invalid family element: {0}")]
    InvalidFamily(String),
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("shatter check supports at most {max} points, got {got}")]
    TooManyPoints { got: usize, max: usize },
    #[error("covariance matrix is not positive semidefinite (jitter {jitter})")]
    CovarianceNotPsd { jitter: f64 },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("no grid pair satisfies d(B_n, B) <= gamma")]
    EmptyPairing,
    #[error("maximiser is the empty set")]
    DegenerateSolution,
    #[error("no class element reaches the required mass {alpha}")]
    Infeasible { alpha: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
}
