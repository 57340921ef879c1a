//! Möbius geometry of surfaces: oriented spheres, curvature spheres, Möbius
//! frames with their invariant `C`, and the homogeneous Dupin surfaces.

pub mod frames;
pub mod orbits;
pub mod spheres;

pub use frames::*;
pub use orbits::*;
pub use spheres::*;
