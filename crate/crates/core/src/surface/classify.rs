//! Isoparametric and Dupin classification on a parameter grid.

use serde::Serialize;

use crate::error::Result;
use crate::surface::domain::ParamDomain;
use crate::surface::parametric::{CurvatureData, ParametricSurface};
use crate::tolerances::{DUPIN_ANALYTIC, DUPIN_FD, ISO_ANALYTIC, ISO_FD};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Principal {
    A,
    C,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifyOptions {
    pub iso_tol: f64,
    pub dupin_tol: f64,
    /// Arc-length step of the curvature-line integration.
    pub arc_step: f64,
}

impl ClassifyOptions {
    pub fn for_surface(s: &ParametricSurface) -> Self {
        if s.has_analytic_partials() {
            Self { iso_tol: ISO_ANALYTIC, dupin_tol: DUPIN_ANALYTIC, arc_step: 1e-3 }
        } else {
            Self { iso_tol: ISO_FD, dupin_tol: DUPIN_FD, arc_step: 1e-3 }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub isoparametric: bool,
    /// `None` when umbilic points make the question undefined.
    pub dupin: Option<bool>,
    pub umbilic_points: Vec<(usize, usize)>,
    pub singular_points: Vec<(usize, usize)>,
    pub a_range: (f64, f64),
    pub c_range: (f64, f64),
    /// Largest |derivative of a along its own curvature line|, same for c.
    pub max_da: f64,
    pub max_dc: f64,
    pub iso_tol: f64,
    pub dupin_tol: f64,
    pub warnings: Vec<String>,
}

fn dir(k: &CurvatureData, which: Principal) -> [f64; 2] {
    match which {
        Principal::A => k.dir_a,
        Principal::C => k.dir_c,
    }
}

fn value(k: &CurvatureData, which: Principal) -> f64 {
    match which {
        Principal::A => k.a,
        Principal::C => k.c,
    }
}

/// One RK4 step of length `h` along the principal direction field, keeping
/// the direction consistent with `reference`.
fn rk4_step(s: &ParametricSurface, p: (f64, f64), h: f64, which: Principal, reference: [f64; 2]) -> Result<(f64, f64)> {
    let field = |q: (f64, f64)| -> Result<[f64; 2]> {
        let d = dir(&s.curvature(q.0, q.1)?, which);
        if d[0] * reference[0] + d[1] * reference[1] < 0.0 {
            Ok([-d[0], -d[1]])
        } else {
            Ok(d)
        }
    };
    let k1 = field(p)?;
    let k2 = field((p.0 + 0.5 * h * k1[0], p.1 + 0.5 * h * k1[1]))?;
    let k3 = field((p.0 + 0.5 * h * k2[0], p.1 + 0.5 * h * k2[1]))?;
    let k4 = field((p.0 + h * k3[0], p.1 + h * k3[1]))?;
    Ok((
        p.0 + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        p.1 + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ))
}

/// Derivative of a principal curvature with respect to arc length along its
/// own line of curvature, by a central difference over two RK4 steps.
pub fn curvature_line_derivative(s: &ParametricSurface, u: f64, v: f64, which: Principal, h: f64) -> Result<f64> {
    let k0 = s.curvature(u, v)?;
    let d0 = dir(&k0, which);
    let fwd = rk4_step(s, (u, v), h, which, d0)?;
    let back = rk4_step(s, (u, v), -h, which, d0)?;
    let kf = value(&s.curvature(fwd.0, fwd.1)?, which);
    let kb = value(&s.curvature(back.0, back.1)?, which);
    Ok((kf - kb) / (2.0 * h))
}

pub fn classify(s: &ParametricSurface, domain: &ParamDomain, opts: &ClassifyOptions) -> Result<Classification> {
    let mut umbilic_points = Vec::new();
    let mut singular_points = Vec::new();
    let mut a_range = (f64::INFINITY, f64::NEG_INFINITY);
    let mut c_range = a_range;
    let (mut max_da, mut max_dc) = (0.0f64, 0.0f64);
    let mut warnings = Vec::new();

    for (i, j, u, v) in domain.points() {
        let k = match s.curvature(u, v) {
            Ok(k) => k,
            Err(_) => {
                singular_points.push((i, j));
                continue;
            }
        };
        a_range = (a_range.0.min(k.a), a_range.1.max(k.a));
        c_range = (c_range.0.min(k.c), c_range.1.max(k.c));
        if k.umbilic {
            umbilic_points.push((i, j));
            continue;
        }
        match (
            curvature_line_derivative(s, u, v, Principal::A, opts.arc_step),
            curvature_line_derivative(s, u, v, Principal::C, opts.arc_step),
        ) {
            (Ok(da), Ok(dc)) => {
                max_da = max_da.max(da.abs());
                max_dc = max_dc.max(dc.abs());
            }
            _ => singular_points.push((i, j)),
        }
    }
    let isoparametric = a_range.1 - a_range.0 < opts.iso_tol && c_range.1 - c_range.0 < opts.iso_tol;
    let dupin = if umbilic_points.is_empty() {
        Some(max_da < opts.dupin_tol && max_dc < opts.dupin_tol)
    } else {
        warnings.push(format!("{} umbilic grid points: the Dupin condition is undefined there", umbilic_points.len()));
        None
    };
    if !singular_points.is_empty() {
        warnings.push(format!("{} singular grid points were skipped", singular_points.len()));
    }
    Ok(Classification {
        isoparametric,
        dupin,
        umbilic_points,
        singular_points,
        a_range,
        c_range,
        max_da,
        max_dc,
        iso_tol: opts.iso_tol,
        dupin_tol: opts.dupin_tol,
        warnings,
    })
}
