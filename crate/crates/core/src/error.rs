use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported root system family/rank combination: {family} {rank}")]
    UnsupportedFamily { family: String, rank: usize },

    #[error("invalid root system: {0}")]
    InvalidRootSystem(String),

    #[error("index {index} out of range (length {len})")]
    InvalidIndex { index: usize, len: usize },

    #[error("group closure exceeded cap of {cap} elements")]
    GroupTooLarge { cap: usize },

    #[error("theta is not a subset of the simple roots: {0}")]
    ThetaNotSubset(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("point lies inside the convex body")]
    PointInsideBody,

    #[error("no point of the set lies outside the convex body")]
    NoExteriorPoint,

    #[error("could not find a generic functional after {tries} perturbations")]
    GenericityFailure { tries: usize },

    #[error("body is not invariant under the group")]
    NotInvariant,

    #[error("point {x:?} lies on a singular hyperplane")]
    SingularPoint { x: Vec<f64> },

    #[error("operator carries no claimed factorization")]
    MissingFactorization,

    #[error("regularization power is insufficient: singular forms remain {remaining:?}")]
    InsufficientPower { remaining: Vec<Vec<f64>> },

    #[error("expression outside the supported coefficient algebra: {0}")]
    OutsideAlgebra(String),

    #[error("grid point {x:?} is within half a grid step of a singular hyperplane")]
    SingularGridPoint { x: Vec<f64> },

    #[error("quadrature did not converge: {coarse} vs {fine}")]
    QuadratureNonconvergence { coarse: f64, fine: f64 },

    #[error("bump body does not lie inside the region a_theta")]
    BodyNotInRegion,

    #[error("bump hull is not invariant under the parabolic subgroup")]
    BodyNotInvariant,

    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),

    #[error("unknown operator '{0}'")]
    UnknownOperator(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed user input rather than by the
    /// mathematics (used for CLI exit codes).
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::UnsupportedFamily { .. }
                | Error::InvalidIndex { .. }
                | Error::ThetaNotSubset(_)
                | Error::UnknownScenario(_)
                | Error::UnknownOperator(_)
                | Error::InvalidParameter(_)
                | Error::Config(_)
        )
    }
}
