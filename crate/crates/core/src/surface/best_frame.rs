//! Principal frames along surfaces: the Euclidean best frame and the Dupin
//! PDE residuals computed from it.

use nalgebra::Matrix2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::{pullback_mc, FrameField, GroupKind, MCForm};
use crate::linalg::{Coords, Mat, Metric};
use crate::space_forms::SpaceForm;
use crate::surface::domain::{Axis, ParamDomain};
use crate::surface::parametric::ParametricSurface;

/// Point, principal frame and curvatures at one parameter value.
#[derive(Clone, Debug)]
pub struct PrincipalFrame {
    pub x: Coords,
    pub e1: Coords,
    pub e2: Coords,
    pub n: Coords,
    pub a: f64,
    pub c: f64,
}

fn push(j: &crate::surface::parametric::Jet, d: [f64; 2]) -> Coords {
    &j.xu * d[0] + &j.xv * d[1]
}

/// `e₁` along the `a` direction (sign as given), `e₃ = n`, and `e₂` chosen to
/// make the frame positively oriented.
pub fn principal_frame(s: &ParametricSurface, u: f64, v: f64) -> Result<PrincipalFrame> {
    let j = s.jet(u, v);
    let k = s.curvature_from_jet(u, v, &j)?;
    if k.umbilic {
        return Err(Error::Umbilic(vec![]));
    }
    let n = s.normal(&j);
    let e1 = push(&j, k.dir_a);
    let mut e2 = push(&j, k.dir_c);
    if orientation(s.form(), &j.x, &e1, &e2, &n) < 0.0 {
        e2 = -e2;
    }
    Ok(PrincipalFrame { x: j.x, e1, e2, n, a: k.a, c: k.c })
}

fn orientation(form: SpaceForm, x: &Coords, e1: &Coords, e2: &Coords, n: &Coords) -> f64 {
    match form {
        SpaceForm::Euclidean => e1.cross(e2).dot(n),
        SpaceForm::Sphere => Mat::from_columns(&[x.clone(), e1.clone(), e2.clone(), n.clone()]).determinant(),
        SpaceForm::Hyperbolic => Mat::from_columns(&[e1.clone(), e2.clone(), n.clone(), x.clone()]).determinant(),
    }
}

/// Principal frames on the whole grid with `e₁` signs propagated from the
/// base corner (down the first column, then along each row).
pub fn principal_frames(s: &ParametricSurface, domain: &ParamDomain) -> Result<Vec<PrincipalFrame>> {
    let mut out: Vec<Option<PrincipalFrame>> = vec![None; domain.len()];
    let mut umbilic = Vec::new();
    for (i, j, u, v) in domain.points() {
        match principal_frame(s, u, v) {
            Ok(f) => out[domain.index(i, j)] = Some(f),
            Err(Error::Umbilic(_)) => umbilic.push((i, j)),
            Err(e) => return Err(e),
        }
    }
    if !umbilic.is_empty() {
        return Err(Error::Umbilic(umbilic));
    }
    let mut frames: Vec<PrincipalFrame> = out.into_iter().map(|f| f.expect("filled")).collect();
    let flip = |f: &mut PrincipalFrame, reference: &Coords| {
        if f.e1.dot(reference) < 0.0 {
            f.e1 = -&f.e1;
            f.e2 = -&f.e2;
        }
    };
    for i in 1..domain.nu {
        let r = frames[domain.index(i - 1, 0)].e1.clone();
        flip(&mut frames[domain.index(i, 0)], &r);
    }
    for i in 0..domain.nu {
        for j in 1..domain.nv {
            let r = frames[domain.index(i, j - 1)].e1.clone();
            flip(&mut frames[domain.index(i, j)], &r);
        }
    }
    Ok(frames)
}

#[derive(Clone, Debug)]
pub struct BestFrame {
    pub field: FrameField,
    pub a: Vec<f64>,
    pub c: Vec<f64>,
}

/// `E(3)` frame `(x, [e₁ e₂ e₃])` with principal `e₁, e₂` (`a ≤ c`) and `e₃` normal.
pub fn euclidean_best_frame(s: &ParametricSurface, domain: &ParamDomain) -> Result<BestFrame> {
    if s.form() != SpaceForm::Euclidean {
        return Err(Error::Invalid("the Euclidean best frame needs a surface in R^3".into()));
    }
    let frames = principal_frames(s, domain)?;
    let mats = frames
        .iter()
        .map(|f| {
            let mut m = Mat::identity(4, 4);
            m.view_mut((1, 0), (3, 1)).copy_from(&f.x);
            m.view_mut((1, 1), (3, 1)).copy_from(&f.e1);
            m.view_mut((1, 2), (3, 1)).copy_from(&f.e2);
            m.view_mut((1, 3), (3, 1)).copy_from(&f.n);
            m
        })
        .collect();
    Ok(BestFrame {
        field: FrameField::new(*domain, GroupKind::Euclidean3, mats)?,
        a: frames.iter().map(|f| f.a).collect(),
        c: frames.iter().map(|f| f.c).collect(),
    })
}

/// Frames in `SO(4)` (sphere) or `SO(3,1)` (hyperbolic space), columns
/// `[x e₁ e₂ n]` resp. `[e₁ e₂ n x]`.
pub fn space_form_frame_matrix(form: SpaceForm, f: &PrincipalFrame) -> Mat {
    match form {
        SpaceForm::Sphere => Mat::from_columns(&[f.x.clone(), f.e1.clone(), f.e2.clone(), f.n.clone()]),
        SpaceForm::Hyperbolic => Mat::from_columns(&[f.e1.clone(), f.e2.clone(), f.n.clone(), f.x.clone()]),
        SpaceForm::Euclidean => {
            let mut m = Mat::identity(4, 4);
            m.view_mut((1, 0), (3, 1)).copy_from(&f.x);
            m.view_mut((1, 1), (3, 1)).copy_from(&f.e1);
            m.view_mut((1, 2), (3, 1)).copy_from(&f.e2);
            m.view_mut((1, 3), (3, 1)).copy_from(&f.n);
            m
        }
    }
}

pub fn space_form_group(form: SpaceForm) -> GroupKind {
    match form {
        SpaceForm::Euclidean => GroupKind::Euclidean3,
        SpaceForm::Sphere => GroupKind::Metric(Metric::euclidean4()),
        SpaceForm::Hyperbolic => GroupKind::Metric(Metric::minkowski()),
    }
}

/// Residuals of `θ³ = 0`, `ω³₁ = aθ¹`, `ω³₂ = cθ²` over interior points.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BestFrameResidual {
    pub theta3: f64,
    pub omega31: f64,
    pub omega32: f64,
}

pub fn best_frame_residual(bf: &BestFrame, w: &MCForm) -> BestFrameResidual {
    let d = w.domain;
    let mut r = BestFrameResidual { theta3: 0.0, omega31: 0.0, omega32: 0.0 };
    for (i, j, _, _) in d.points() {
        if !d.is_interior(i, j) {
            continue;
        }
        let k = d.index(i, j);
        for m in [&w.wu[k], &w.wv[k]] {
            r.theta3 = r.theta3.max(m[(3, 0)].abs());
            r.omega31 = r.omega31.max((m[(3, 1)] - bf.a[k] * m[(1, 0)]).abs());
            r.omega32 = r.omega32.max((m[(3, 2)] - bf.c[k] * m[(2, 0)]).abs());
        }
    }
    r
}

/// Max-abs residuals over interior points of the Dupin system
/// `a₂ = p(a−c)`, `c₁ = q(a−c)`, `p₂ − q₁ = ac + p² + q²`, together with the
/// Dupin conditions `a₁ = 0`, `c₂ = 0` themselves.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DupinPdeResidual {
    pub codazzi_a: f64,
    pub codazzi_c: f64,
    pub gauss: f64,
    pub a1: f64,
    pub c2: f64,
    pub max: f64,
}

pub fn dupin_pde_residual(bf: &BestFrame) -> Result<DupinPdeResidual> {
    let w = pullback_mc(&bf.field)?;
    let d = w.domain;
    let mut p = Vec::with_capacity(d.len());
    let mut q = Vec::with_capacity(d.len());
    let mut binv = Vec::with_capacity(d.len());
    for k in 0..d.len() {
        let b = Matrix2::new(w.wu[k][(1, 0)], w.wv[k][(1, 0)], w.wu[k][(2, 0)], w.wv[k][(2, 0)]);
        let bi = b.try_inverse().ok_or(Error::NotImmersive(b.determinant()))?;
        let (pk, qk) = to_coframe(w.entry(k, 2, 1), &bi);
        p.push(pk);
        q.push(qk);
        binv.push(bi);
    }
    let (au, av) = (d.diff(&bf.a, Axis::U), d.diff(&bf.a, Axis::V));
    let (cu, cv) = (d.diff(&bf.c, Axis::U), d.diff(&bf.c, Axis::V));
    let (pu, pv) = (d.diff(&p, Axis::U), d.diff(&p, Axis::V));
    let (qu, qv) = (d.diff(&q, Axis::U), d.diff(&q, Axis::V));
    let mut r = DupinPdeResidual { codazzi_a: 0.0, codazzi_c: 0.0, gauss: 0.0, a1: 0.0, c2: 0.0, max: 0.0 };
    for (i, j, _, _) in d.points() {
        if !d.is_interior(i, j) {
            continue;
        }
        let k = d.index(i, j);
        let (a1, a2) = to_coframe((au[k], av[k]), &binv[k]);
        let (c1, c2) = to_coframe((cu[k], cv[k]), &binv[k]);
        let (_, p2) = to_coframe((pu[k], pv[k]), &binv[k]);
        let (q1, _) = to_coframe((qu[k], qv[k]), &binv[k]);
        let (a, c) = (bf.a[k], bf.c[k]);
        r.codazzi_a = r.codazzi_a.max((a2 - p[k] * (a - c)).abs());
        r.codazzi_c = r.codazzi_c.max((c1 - q[k] * (a - c)).abs());
        r.gauss = r.gauss.max((p2 - q1 - (a * c + p[k] * p[k] + q[k] * q[k])).abs());
        r.a1 = r.a1.max(a1.abs());
        r.c2 = r.c2.max(c2.abs());
    }
    r.max = r.codazzi_a.max(r.codazzi_c).max(r.gauss).max(r.a1).max(r.c2);
    Ok(r)
}

/// Coefficients of a form given in `(du, dv)` with respect to `(θ¹, θ²)`.
fn to_coframe(f: (f64, f64), binv: &Matrix2<f64>) -> (f64, f64) {
    (f.0 * binv[(0, 0)] + f.1 * binv[(1, 0)], f.0 * binv[(0, 1)] + f.1 * binv[(1, 1)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::catalog::{cylinder, default_domain, pushforward, torus, warped_torus, Projection};
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn cylinder_frame_and_forms() {
        let s = cylinder(1.0).unwrap();
        let d = default_domain(&s, 24, 12).unwrap();
        let bf = euclidean_best_frame(&s, &d).unwrap();
        // e₁ is the ruling
        let m = bf.field.at(3, 4);
        assert!((m[(3, 1)].abs() - 1.0).abs() < 1e-14);
        let w = pullback_mc(&bf.field).unwrap();
        let r = best_frame_residual(&bf, &w);
        assert!(r.theta3 < 1e-6 && r.omega31 < 1e-4 && r.omega32 < 1e-4, "{r:?}");
        let pde = dupin_pde_residual(&bf).unwrap();
        assert!(pde.max < 1e-6, "{pde:?}");
    }

    #[test]
    fn stereo_torus_satisfies_the_pde() {
        let s = pushforward(&torus(FRAC_PI_4).unwrap(), Projection::Stereo).unwrap();
        let bf = euclidean_best_frame(&s, &default_domain(&s, 64, 64).unwrap()).unwrap();
        let pde = dupin_pde_residual(&bf).unwrap();
        assert!(pde.max < 1e-3, "{pde:?}");
    }

    #[test]
    fn warped_torus_fails_the_pde() {
        let s = warped_torus(2.0, 1.0, 0.1).unwrap();
        let bf = euclidean_best_frame(&s, &default_domain(&s, 64, 64).unwrap()).unwrap();
        let pde = dupin_pde_residual(&bf).unwrap();
        assert!(pde.max > 1e-2, "{pde:?}");
        assert!(pde.codazzi_a < 1e-3 && pde.gauss < 1e-3, "{pde:?}");
    }
}
