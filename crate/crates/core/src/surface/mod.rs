//! Parametric surfaces in the space forms.

pub mod best_frame;
pub mod catalog;
pub mod classify;
pub mod domain;
pub mod parametric;

pub use catalog::{cylinder, default_domain, hyperboloid, pushforward, round_sphere, torus, torus_of_revolution, warped_torus, Projection};
pub use domain::{Axis, Linear, ParamDomain};
pub use parametric::{principal, CurvatureData, Jet, ParametricSurface};
pub use classify::{classify, curvature_line_derivative, Classification, ClassifyOptions, Principal};
pub use best_frame::{best_frame_residual, dupin_pde_residual, euclidean_best_frame, principal_frame, principal_frames, BestFrame, DupinPdeResidual, PrincipalFrame};
