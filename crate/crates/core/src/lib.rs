//! Dupin surfaces in the space forms, in Möbius geometry and in Lie sphere
//! geometry: canonical constructions, moving-frame checks, orbit surfaces and
//! mesh/report export.

// `!(r <= tol)` also rejects NaN residuals
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod export;
pub mod frames;
pub mod lie_sphere;
pub mod linalg;
pub mod moebius;
pub mod space_forms;
pub mod surface;
pub mod tolerances;

pub use error::{Error, Result};
