use thiserror::Error;

/// Errors raised by the geometry, transport and n-field routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point at radius {radius:e} lies inside the origin exclusion ball (r_min = {r_min:e})")]
    OriginExclusion { radius: f64, r_min: f64 },

    #[error("point lies on the excluded nonpositive 3-axis (distance to axis {distance:e})")]
    AxisExclusion { distance: f64 },

    #[error("matrix is not antisymmetric: symmetric part norm {norm:e} exceeds {tolerance:e}")]
    NotAntisymmetric { norm: f64, tolerance: f64 },

    #[error("matrix is not a rotation: orthogonality defect {orthogonality:e}, det {det}")]
    NotRotation { orthogonality: f64, det: f64 },

    #[error("finite-difference stencil of step {step:e} at radius {radius:e} intersects the exclusion ball (r_min = {r_min:e})")]
    StencilViolation { radius: f64, step: f64, r_min: f64 },

    #[error("invalid profile `{label}`: {reason}")]
    InvalidProfile { label: String, reason: String },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("transport integration did not converge: error estimate {estimate:e} > {tolerance:e} after {steps} steps")]
    IntegrationFailure {
        estimate: f64,
        tolerance: f64,
        steps: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
