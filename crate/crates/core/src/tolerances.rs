//! Default numerical tolerances. The CLI can override most of these through
//! its config file; library code takes them as arguments where it matters.

/// Group/algebra membership and bracket closure.
pub const MEMBERSHIP: f64 = 1e-10;
/// Frame fields built from finite differences.
pub const FRAME_FIELD: f64 = 1e-8;
/// Stereographic pole rejection radius.
pub const POLE: f64 = 1e-9;
/// Isoparametric / Dupin thresholds with analytic partials.
pub const ISO_ANALYTIC: f64 = 1e-6;
pub const DUPIN_ANALYTIC: f64 = 1e-6;
/// Same thresholds when partials come from finite differences.
pub const ISO_FD: f64 = 1e-3;
pub const DUPIN_FD: f64 = 1e-3;
/// Relative threshold on det I for flagging singular points.
pub const RANK: f64 = 1e-8;
/// Distinct principal curvatures, relative to their size.
pub const UMBILIC: f64 = 1e-8;
pub const UMBILIC_FD: f64 = 1e-5;
/// Discriminant band treated as a double root.
pub const DOUBLE_ROOT: f64 = 1e-12;
/// Order conditions and coefficient checks on Möbius and Lie frames.
pub const FRAME_ORDER: f64 = 1e-6;
/// Second singular value threshold for the sphere-map rank test.
pub const SPHERE_RANK: f64 = 1e-6;
/// Contact and tangency of Legendre maps.
pub const CONTACT: f64 = 1e-8;
/// Flatness of pulled-back forms before integration.
pub const INTEGRABILITY: f64 = 1e-3;
/// Congruence deviation.
pub const CONGRUENCE: f64 = 1e-8;
