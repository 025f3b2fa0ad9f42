use thiserror::Error;

/// Errors raised by geometry, hull, sampling and estimation routines.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    /// Point set (or simplex) does not span the required dimension.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Dimension outside the supported range of an operation.
    #[error("dimension {dim} unsupported (allowed {min}..={max})")]
    UnsupportedDimension { dim: usize, min: usize, max: usize },

    /// Input larger than the documented hard limit.
    #[error("too many points: {count} > {limit}")]
    TooManyPoints { count: usize, limit: usize },

    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The asymptotic surface-area surrogate left (0, vol(∂B)).
    #[error("asymptotic-invalid: deficit {deficit} >= sphere area {sphere_area} (n={dim}, N={points})")]
    AsymptoticInvalid {
        dim: usize,
        points: u64,
        deficit: f64,
        sphere_area: f64,
    },

    /// A facet does not meet the ball on the side the operation integrates over.
    #[error("empty-intersection: facet {0}")]
    EmptyIntersection(String),

    /// Structural inconsistency in a loaded polytope.
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),
}

impl Error {
    /// Stable short tag used in CSV/JSON output.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::DegenerateInput(_) => "degenerate-input",
            Error::UnsupportedDimension { .. } => "unsupported-dimension",
            Error::TooManyPoints { .. } => "too-many-points",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::AsymptoticInvalid { .. } => "asymptotic-invalid",
            Error::EmptyIntersection(_) => "empty-intersection",
            Error::InvalidPolytope(_) => "invalid-polytope",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
