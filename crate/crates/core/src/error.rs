use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ExponentOutOfRange: {name} = {value} must be > -1")]
    ExponentOutOfRange { name: String, value: f64 },
    #[error("InvalidExponent: {0}")]
    InvalidExponent(String),
    #[error("DuplicateLocation: {0} appears more than once")]
    DuplicateLocation(f64),
    #[error("MassNotPositive: mass {mass} at {location}")]
    MassNotPositive { location: f64, mass: f64 },
    #[error("LocationOutsideSupport: {0} is not in the support of the base measure")]
    LocationOutsideSupport(f64),
    #[error("UnknownLocation: {0} is not a mass point of the measure")]
    UnknownLocation(f64),
    #[error("InvalidWeight: {0}")]
    InvalidWeight(String),
    #[error("NoEndpoint: max(alpha, beta) = {0} <= -1/2, no finite mean convergence endpoints")]
    NoEndpoint(f64),
    #[error("GridTooSmall: {grid} points cannot resolve degree {degree}")]
    GridTooSmall { grid: usize, degree: usize },
    #[error("NumericalBreakdown: {0}")]
    NumericalBreakdown(String),
    #[error("DegreeOutOfRange: degree {degree} exceeds cap {cap}")]
    DegreeOutOfRange { degree: usize, cap: usize },
    #[error("IllConditionedFit: condition number {0:e}")]
    IllConditionedFit(f64),
    #[error("GridMismatch: {0}")]
    GridMismatch(String),
    #[error("PointOnBoundary: {0} must lie strictly inside (-1, 1)")]
    PointOnBoundary(f64),
    #[error("EigenFailure: no convergence after {0} iterations")]
    EigenFailure(usize),
    #[error("NonFiniteWeight at node {node} (x = {x})")]
    NonFiniteWeight { node: usize, x: f64 },
    #[error("Unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Validation failures are caller errors; everything else is numerical.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::ExponentOutOfRange { .. }
                | Error::InvalidExponent(_)
                | Error::DuplicateLocation(_)
                | Error::MassNotPositive { .. }
                | Error::LocationOutsideSupport(_)
                | Error::UnknownLocation(_)
                | Error::InvalidWeight(_)
                | Error::NoEndpoint(_)
                | Error::DegreeOutOfRange { .. }
                | Error::GridMismatch(_)
                | Error::PointOnBoundary(_)
                | Error::Unsupported(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
