//! Lie sphere geometry: lines in the Lie quadric, Legendre maps, Lie frames,
//! and the orbits of the subgroup `H`.

pub mod frames;
pub mod lines;

pub use frames::*;
pub use lines::*;
