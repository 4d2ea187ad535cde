//! Point disclinations from flat, spherically symmetric SO(3) connections.
//!
//! * [`so3`] – rotation group algebra in the crate's index convention.
//! * [`profile`] – the radial profile `f(r)` and generic radial functions.
//! * [`ansatz`] – the spherically symmetric connection, its curvature, the
//!   equilibrium ODE residuals and the flat-solution family.
//! * [`transport`] – parallel transport, closed-form and numerical.
//! * [`nfield`] – director fields, the hedgehog construction and origin
//!   classification.

// Negated comparisons such as `!(r > 0.0)` are used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ansatz;
pub mod error;
pub mod nfield;
pub mod profile;
pub mod so3;
pub mod transport;

pub use error::{Error, Result};
pub use profile::{ProfileFunction, RadialFunction};
pub use so3::{Mat3, RotationMatrix, So3Vector, Vec3};
