//! Meshes, reports, configuration and the commands the CLI and the web demo
//! share.

pub mod commands;
pub mod config;
pub mod mesh;
pub mod report;
pub mod verify;

pub use commands::*;
pub use config::*;
pub use mesh::*;
pub use report::*;
pub use verify::*;
