//! Command-line front end: profile configuration, verification, field
//! sampling and export, transport and origin classification.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod classify_cmd;
pub mod error;
pub mod expr;
pub mod format;
pub mod profile_spec;
pub mod sample;
pub mod transport_cmd;
pub mod verify;

pub use error::{CliError, CliResult};
pub use profile_spec::{ProfileKind, ProfileSpec};
pub use sample::{FieldSampleSet, SampleGridSpec, Section};
