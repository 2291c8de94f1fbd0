use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("the norm is not uniformly convex")]
    NotUniformlyConvex,

    #[error("argument outside its domain: {0}")]
    DomainError(String),

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("x1 + x2 is the zero vector")]
    ZeroSum,

    #[error("point lies outside the world")]
    PointOutsideWorld,

    #[error("operation requires a bounded world")]
    UnboundedWorld,

    #[error("anchor has zero distance to the other sites")]
    AnchorOnOtherSite,

    #[error("cells were built with different resolutions")]
    ResolutionMismatch,

    #[error("epsilon {epsilon} must lie in (0, {limit})")]
    EpsilonTooLarge { epsilon: f64, limit: f64 },

    #[error("sites are not separated (eta = 0)")]
    EtaZero,

    #[error("sites touch the boundary of the world")]
    SitesTouchBoundary,

    #[error("epsilon {epsilon} exceeds 8 * boundary gap = {limit}")]
    EpsilonExceedsBoundaryBound { epsilon: f64, limit: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("direction is not in the admissible cone at p (ray leaves the world immediately)")]
    DirectionNotInThetaP,

    #[error("schema error at {path}: {reason}")]
    Schema { path: String, reason: String },

    #[error("operation requires a two-dimensional scene")]
    NotTwoDimensional,

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            reason: reason.into(),
        }
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NotUniformlyConvex => "NotUniformlyConvex",
            Error::DomainError(_) => "DomainError",
            Error::ZeroVector => "ZeroVector",
            Error::ZeroSum => "ZeroSum",
            Error::PointOutsideWorld => "PointOutsideWorld",
            Error::UnboundedWorld => "UnboundedWorld",
            Error::AnchorOnOtherSite => "AnchorOnOtherSite",
            Error::ResolutionMismatch => "ResolutionMismatch",
            Error::EpsilonTooLarge { .. } => "EpsilonTooLarge",
            Error::EtaZero => "EtaZero",
            Error::SitesTouchBoundary => "SitesTouchBoundary",
            Error::EpsilonExceedsBoundaryBound { .. } => "EpsilonExceedsBoundaryBound",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::UnknownScenario(_) => "UnknownScenario",
            Error::DirectionNotInThetaP => "DirectionNotInThetaP",
            Error::Schema { .. } => "SchemaError",
            Error::NotTwoDimensional => "NotTwoDimensional",
            Error::Io(_) => "IoError",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
