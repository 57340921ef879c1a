//! The canonical isoparametric surfaces, a few controls, and pushforward by
//! the stereographic projections.

use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Coords;
use crate::space_forms::{hyp_stereo_coords, stereo_coords, SpaceForm};
use crate::surface::domain::ParamDomain;
use crate::surface::parametric::{Jet, ParametricSurface};

fn v(c: &[f64]) -> Coords {
    Coords::from_column_slice(c)
}

/// `S¹(cos α) × S¹(sin α) ⊂ S³`, first factor in span{ε₀, ε₁}.
///
/// Principal curvatures are `−tan α` along `u` and `cot α` along `v`.
pub fn torus(alpha: f64) -> Result<ParametricSurface> {
    if !(alpha > 0.0 && alpha <= FRAC_PI_4 + 1e-9) {
        return Err(Error::OutOfRange(format!("torus parameter α = {alpha} must lie in (0, π/4]")));
    }
    // a decimal rendering of π/4 may round just above it
    let alpha = alpha.min(FRAC_PI_4);
    let (r, s) = (alpha.cos(), alpha.sin());
    let pos = Arc::new(move |u: f64, w: f64| v(&[r * u.cos(), r * u.sin(), s * w.cos(), s * w.sin()]));
    let jet = Arc::new(move |u: f64, w: f64| {
        let (cu, su, cw, sw) = (u.cos(), u.sin(), w.cos(), w.sin());
        Jet {
            x: v(&[r * cu, r * su, s * cw, s * sw]),
            xu: v(&[-r * su, r * cu, 0.0, 0.0]),
            xv: v(&[0.0, 0.0, -s * sw, s * cw]),
            xuu: v(&[-r * cu, -r * su, 0.0, 0.0]),
            xuv: v(&[0.0; 4]),
            xvv: v(&[0.0, 0.0, -s * cw, -s * sw]),
        }
    });
    Ok(ParametricSurface::new(SpaceForm::Sphere, "torus", pos, (TAU, TAU))
        .with_jet(jet)
        .with_param("alpha", alpha)
        .oriented_like(0.0, 0.0, &v(&[s, 0.0, -r, 0.0])))
}

/// `S¹(a/b) × H¹(1/b) ⊂ H³` with `b = √(1−a²)`.
///
/// Principal curvatures are `a` along `v` and `1/a` along `u`.
pub fn hyperboloid(a: f64) -> Result<ParametricSurface> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::OutOfRange(format!("hyperboloid parameter a = {a} must lie in (0, 1)")));
    }
    let b = (1.0 - a * a).sqrt();
    let (p, q) = (a / b, 1.0 / b);
    let pos = Arc::new(move |u: f64, w: f64| v(&[p * u.cos(), p * u.sin(), q * w.sinh(), q * w.cosh()]));
    let jet = Arc::new(move |u: f64, w: f64| {
        let (cu, su, ch, sh) = (u.cos(), u.sin(), w.cosh(), w.sinh());
        Jet {
            x: v(&[p * cu, p * su, q * sh, q * ch]),
            xu: v(&[-p * su, p * cu, 0.0, 0.0]),
            xv: v(&[0.0, 0.0, q * ch, q * sh]),
            xuu: v(&[-p * cu, -p * su, 0.0, 0.0]),
            xuv: v(&[0.0; 4]),
            xvv: v(&[0.0, 0.0, q * sh, q * ch]),
        }
    });
    Ok(ParametricSurface::new(SpaceForm::Hyperbolic, "hyperboloid", pos, (TAU, 2.0))
        .with_jet(jet)
        .with_param("a", a)
        .oriented_like(0.0, 0.0, &v(&[-q, 0.0, 0.0, -p])))
}

/// `(R cos u, R sin u, v)` with the inward normal, so the curvatures are `(0, 1/R)`.
pub fn cylinder(radius: f64) -> Result<ParametricSurface> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::OutOfRange(format!("cylinder radius {radius} must be positive")));
    }
    let r = radius;
    let pos = Arc::new(move |u: f64, w: f64| v(&[r * u.cos(), r * u.sin(), w]));
    let jet = Arc::new(move |u: f64, w: f64| {
        let (cu, su) = (u.cos(), u.sin());
        Jet {
            x: v(&[r * cu, r * su, w]),
            xu: v(&[-r * su, r * cu, 0.0]),
            xv: v(&[0.0, 0.0, 1.0]),
            xuu: v(&[-r * cu, -r * su, 0.0]),
            xuv: v(&[0.0; 3]),
            xvv: v(&[0.0; 3]),
        }
    });
    Ok(ParametricSurface::new(SpaceForm::Euclidean, "cylinder", pos, (TAU, 2.0))
        .with_jet(jet)
        .with_param("radius", radius)
        .oriented_like(0.0, 0.0, &v(&[-1.0, 0.0, 0.0])))
}

/// Round sphere of radius `rho` in `R³` in latitude/longitude coordinates
/// (use a latitude range away from the poles).
pub fn round_sphere(rho: f64) -> Result<ParametricSurface> {
    if !(rho > 0.0) {
        return Err(Error::OutOfRange(format!("sphere radius {rho} must be positive")));
    }
    let pos = Arc::new(move |u: f64, w: f64| v(&[rho * u.cos() * w.cos(), rho * u.sin() * w.cos(), rho * w.sin()]));
    Ok(ParametricSurface::new(SpaceForm::Euclidean, "round_sphere", pos, (TAU, PI))
        .with_param("radius", rho)
        .oriented_like(0.0, 0.0, &v(&[-1.0, 0.0, 0.0])))
}

/// Torus of revolution in `R³` with radii `big > small`.
pub fn torus_of_revolution(big: f64, small: f64) -> Result<ParametricSurface> {
    warped_torus(big, small, 0.0)
}

/// The torus of revolution scaled pointwise by `1 + eps·sin u`: a non-Dupin control.
pub fn warped_torus(big: f64, small: f64, eps: f64) -> Result<ParametricSurface> {
    if !(big > small && small > 0.0) {
        return Err(Error::OutOfRange("torus of revolution needs big > small > 0".into()));
    }
    let base = move |u: f64, w: f64| {
        let rr = big + small * w.cos();
        let t = v(&[rr * u.cos(), rr * u.sin(), small * w.sin()]);
        let tu = v(&[-rr * u.sin(), rr * u.cos(), 0.0]);
        let tv = v(&[-small * w.sin() * u.cos(), -small * w.sin() * u.sin(), small * w.cos()]);
        let tuu = v(&[-rr * u.cos(), -rr * u.sin(), 0.0]);
        let tuv = v(&[small * w.sin() * u.sin(), -small * w.sin() * u.cos(), 0.0]);
        let tvv = v(&[-small * w.cos() * u.cos(), -small * w.cos() * u.sin(), -small * w.sin()]);
        (t, tu, tv, tuu, tuv, tvv)
    };
    let pos = Arc::new(move |u: f64, w: f64| base(u, w).0 * (1.0 + eps * u.sin()));
    let jet = Arc::new(move |u: f64, w: f64| {
        let (t, tu, tv, tuu, tuv, tvv) = base(u, w);
        let (f, f1, f2) = (1.0 + eps * u.sin(), eps * u.cos(), -eps * u.sin());
        Jet {
            x: &t * f,
            xu: &t * f1 + &tu * f,
            xv: &tv * f,
            xuu: &t * f2 + &tu * (2.0 * f1) + &tuu * f,
            xuv: &tv * f1 + &tuv * f,
            xvv: &tvv * f,
        }
    });
    let name = if eps == 0.0 { "torus_of_revolution" } else { "warped_torus" };
    Ok(ParametricSurface::new(SpaceForm::Euclidean, name, pos, (TAU, TAU))
        .with_jet(jet)
        .with_param("big", big)
        .with_param("small", small)
        .with_param("eps", eps))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    None,
    Stereo,
    HypStereo,
}

impl std::str::FromStr for Projection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" | "identity" => Ok(Projection::None),
            "stereo" => Ok(Projection::Stereo),
            "hyp_stereo" => Ok(Projection::HypStereo),
            other => Err(Error::Invalid(format!("unknown projection '{other}' (expected none, stereo or hyp_stereo)"))),
        }
    }
}

/// Push a surface into `R³`. Partials are composed by the chain rule, so an
/// analytic source gives an analytic result.
pub fn pushforward(s: &ParametricSurface, map: Projection) -> Result<ParametricSurface> {
    let (num, den): (fn(&Coords) -> Coords, usize) = match (map, s.form()) {
        (Projection::None, _) => return Ok(s.clone()),
        (Projection::Stereo, SpaceForm::Sphere) => (|x: &Coords| x.rows(1, 3).into_owned(), 0),
        (Projection::HypStereo, SpaceForm::Hyperbolic) => (|x: &Coords| x.rows(0, 3).into_owned(), 3),
        (m, f) => return Err(Error::Invalid(format!("projection {m:?} does not apply to a {f:?} surface"))),
    };
    let src = s.clone();
    let src_pos = s.position_fn();
    let pos: Arc<dyn Fn(f64, f64) -> Coords + Send + Sync> = match map {
        Projection::Stereo => Arc::new(move |u, w| {
            let x = src_pos(u, w);
            stereo_coords(&x).unwrap_or_else(|_| Coords::from_element(3, f64::NAN))
        }),
        _ => Arc::new(move |u, w| hyp_stereo_coords(&src_pos(u, w))),
    };
    let jet = Arc::new(move |u: f64, w: f64| {
        let j = src.jet(u, w);
        let wgt = |x: &Coords| if den == 0 { 1.0 + x[0] } else { 1.0 + x[3] };
        let lin = |x: &Coords| if den == 0 { x[0] } else { x[3] };
        let w0 = wgt(&j.x);
        let (wu, wv) = (lin(&j.xu), lin(&j.xv));
        let (wuu, wuv, wvv) = (lin(&j.xuu), lin(&j.xuv), lin(&j.xvv));
        let y = num(&j.x) / w0;
        let yu = (num(&j.xu) - &y * wu) / w0;
        let yv = (num(&j.xv) - &y * wv) / w0;
        let yuu = (num(&j.xuu) - &yu * (2.0 * wu) - &y * wuu) / w0;
        let yvv = (num(&j.xvv) - &yv * (2.0 * wv) - &y * wvv) / w0;
        let yuv = (num(&j.xuv) - &yv * wu - &y * wuv - &yu * wv) / w0;
        Jet { x: y, xu: yu, xv: yv, xuu: yuu, xuv: yuv, xvv: yvv }
    });
    let mut out = ParametricSurface::new(SpaceForm::Euclidean, format!("{}_{}", s.name(), match map {
        Projection::Stereo => "stereo",
        _ => "hyp_stereo",
    }), pos, s.fd_scale());
    if s.has_analytic_partials() {
        out = out.with_jet(jet);
    }
    for (k, val) in s.params() {
        out = out.with_param(k, *val);
    }
    Ok(out)
}

/// The domain each catalog surface is normally sampled on.
pub fn default_domain(s: &ParametricSurface, nu: usize, nv: usize) -> Result<ParamDomain> {
    match s.name() {
        n if n.starts_with("torus") || n.starts_with("warped_torus") => ParamDomain::torus(nu, nv),
        n if n.starts_with("hyperboloid") => ParamDomain::new((0.0, TAU), (-1.0, 1.0), nu, nv, true, false),
        n if n.starts_with("cylinder") => ParamDomain::new((0.0, TAU), (-1.0, 1.0), nu, nv, true, false),
        n if n.starts_with("round_sphere") => ParamDomain::new((0.0, TAU), (-1.2, 1.2), nu, nv, true, false),
        _ => ParamDomain::new((0.0, 1.0), (0.0, 1.0), nu, nv, false, false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn torus_curvatures() {
        let t = torus(PI / 6.0).unwrap();
        let k = t.curvature(0.3, 1.1).unwrap();
        assert_abs_diff_eq!(k.a, -(PI / 6.0).tan(), epsilon = 1e-12);
        assert_abs_diff_eq!(k.c, 1.0 / (PI / 6.0).tan(), epsilon = 1e-12);
        // a along u
        assert!(k.dir_a[1].abs() < 1e-12);
        let t4 = torus(FRAC_PI_4).unwrap();
        let k4 = t4.curvature(2.0, -1.0).unwrap();
        assert_abs_diff_eq!(k4.a, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k4.c, 1.0, epsilon = 1e-12);
        assert!(t4.constraint_residual(0.4, 0.9) < 1e-15);
        assert!(torus(0.0).is_err());
        assert!(torus(1.0).is_err());
    }

    #[test]
    fn hyperboloid_curvatures() {
        let h = hyperboloid(0.5).unwrap();
        assert!(h.constraint_residual(0.7, 0.4) < 1e-14);
        let k = h.curvature(0.7, 0.4).unwrap();
        assert_abs_diff_eq!(k.a, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(k.c, 2.0, epsilon = 1e-12);
        assert!(k.dir_a[0].abs() < 1e-12);
        assert!(hyperboloid(1.0).is_err());
    }

    #[test]
    fn cylinder_forms() {
        let c = cylinder(2.0).unwrap();
        let (i, ii) = c.fundamental_forms(0.5, 0.1).unwrap();
        assert_abs_diff_eq!(i[(0, 0)], 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(i[(1, 1)], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ii[(0, 0)].abs(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ii[(1, 1)], 0.0, epsilon = 1e-14);
        let k = c.curvature(0.5, 0.1).unwrap();
        assert_abs_diff_eq!(k.a, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(k.c, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn fd_partials_track_analytic_ones() {
        let t = torus(0.6).unwrap();
        let a = t.jet(0.4, 1.3);
        let f = t.fd_jet(0.4, 1.3);
        assert!((a.xu - f.xu).amax() < 1e-9);
        assert!((a.xvv - f.xvv).amax() < 1e-7);
        assert!((a.xuv - f.xuv).amax() < 1e-7);
    }

    #[test]
    fn stereo_chain_rule_matches_differences() {
        let s = pushforward(&torus(FRAC_PI_4).unwrap(), Projection::Stereo).unwrap();
        let a = s.jet(0.9, 2.1);
        let f = s.fd_jet(0.9, 2.1);
        assert!((&a.x - &f.x).amax() < 1e-15);
        assert!((a.xu - f.xu).amax() < 1e-8);
        assert!((a.xuu - f.xuu).amax() < 1e-6);
        assert!((a.xuv - f.xuv).amax() < 1e-6);
        let h = pushforward(&hyperboloid(0.5).unwrap(), Projection::HypStereo).unwrap();
        let a = h.jet(0.2, 0.3);
        let f = h.fd_jet(0.2, 0.3);
        assert!((a.xvv - f.xvv).amax() < 1e-6);
        assert!(pushforward(&cylinder(1.0).unwrap(), Projection::Stereo).is_err());
    }

    #[test]
    fn sphere_is_umbilic() {
        let s = round_sphere(1.0).unwrap();
        let k = s.curvature(0.3, 0.2).unwrap();
        assert!(k.umbilic);
        assert_abs_diff_eq!(k.a, 1.0, epsilon = 1e-6);
    }
}
