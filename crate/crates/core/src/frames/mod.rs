//! Maurer–Cartan calculus on gridded frame fields: pullback, flatness,
//! congruence and integration of flat algebra-valued forms.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{algebra_residual, expm, group_inverse, group_residual, project_to_algebra, Mat, Metric};
use crate::space_forms::euclidean_residual;
use crate::surface::domain::{Axis, ParamDomain};
use crate::tolerances::{CONGRUENCE, FRAME_FIELD, INTEGRABILITY};

/// The matrix groups frames live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GroupKind {
    /// `E(3)` as 4×4 matrices `[[1, 0], [x, A]]`.
    Euclidean3,
    /// Isometries of a metric (`SO(4)`, `SO(3,1)`, Möbius group, Lie sphere group).
    Metric(Metric),
}

impl GroupKind {
    pub fn dimension(&self) -> usize {
        match self {
            GroupKind::Euclidean3 => 4,
            GroupKind::Metric(m) => m.dimension(),
        }
    }

    pub fn residual(&self, t: &Mat) -> f64 {
        if t.nrows() != self.dimension() || t.ncols() != self.dimension() {
            return f64::INFINITY;
        }
        match self {
            GroupKind::Euclidean3 => euclidean_residual(t),
            GroupKind::Metric(m) => group_residual(t, m),
        }
    }

    pub fn algebra_residual(&self, x: &Mat) -> f64 {
        match self {
            GroupKind::Euclidean3 => {
                let mut r = x.row(0).amax();
                let a = x.view((1, 1), (3, 3));
                r = r.max((a + a.transpose()).amax());
                r
            }
            GroupKind::Metric(m) => algebra_residual(x, m),
        }
    }

    pub fn project(&self, x: &Mat) -> Mat {
        match self {
            GroupKind::Euclidean3 => {
                let mut p = x.clone();
                p.row_mut(0).fill(0.0);
                let a = x.view((1, 1), (3, 3)).into_owned();
                p.view_mut((1, 1), (3, 3)).copy_from(&((&a - a.transpose()) * 0.5));
                p
            }
            GroupKind::Metric(m) => project_to_algebra(x, m),
        }
    }

    pub fn inverse(&self, t: &Mat) -> Mat {
        match self {
            GroupKind::Euclidean3 => {
                let a = t.view((1, 1), (3, 3)).transpose();
                let x = t.view((1, 0), (3, 1)).into_owned();
                let mut out = Mat::identity(4, 4);
                out.view_mut((1, 0), (3, 1)).copy_from(&(-(&a * x)));
                out.view_mut((1, 1), (3, 3)).copy_from(&a);
                out
            }
            GroupKind::Metric(m) => group_inverse(t, m),
        }
    }
}

/// A gridded map into a matrix group.
#[derive(Clone, Debug)]
pub struct FrameField {
    domain: ParamDomain,
    group: GroupKind,
    mats: Vec<Mat>,
    max_residual: f64,
}

impl FrameField {
    pub fn new(domain: ParamDomain, group: GroupKind, mats: Vec<Mat>) -> Result<Self> {
        if mats.len() != domain.len() {
            return Err(Error::GridMismatch);
        }
        let mut max_residual: f64 = 0.0;
        for m in &mats {
            let r = group.residual(m);
            if !(r <= FRAME_FIELD) {
                return Err(Error::NotInGroup { residual: r });
            }
            max_residual = max_residual.max(r);
        }
        Ok(Self { domain, group, mats, max_residual })
    }

    pub fn from_fn(domain: ParamDomain, group: GroupKind, f: impl Fn(f64, f64) -> Mat) -> Result<Self> {
        let mats = domain.points().map(|(_, _, u, v)| f(u, v)).collect();
        Self::new(domain, group, mats)
    }

    pub fn domain(&self) -> &ParamDomain {
        &self.domain
    }

    pub fn group(&self) -> GroupKind {
        self.group
    }

    pub fn mats(&self) -> &[Mat] {
        &self.mats
    }

    pub fn at(&self, i: usize, j: usize) -> &Mat {
        &self.mats[self.domain.index(i, j)]
    }

    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    /// `g·e` for a constant group element `g`.
    pub fn left_translate(&self, g: &Mat) -> Result<Self> {
        Self::new(self.domain, self.group, self.mats.iter().map(|m| g * m).collect())
    }

    /// `e·k` for a constant group element `k`.
    pub fn right_translate(&self, k: &Mat) -> Result<Self> {
        Self::new(self.domain, self.group, self.mats.iter().map(|m| m * k).collect())
    }
}

/// Pulled-back Maurer–Cartan form: `ω = ω_u du + ω_v dv` at every grid point.
#[derive(Clone, Debug)]
pub struct MCForm {
    pub domain: ParamDomain,
    pub group: GroupKind,
    pub wu: Vec<Mat>,
    pub wv: Vec<Mat>,
    /// Largest algebra residual removed by projection.
    pub projection_noise: f64,
}

impl MCForm {
    /// `X du + Y dv` with constant coefficients.
    pub fn constant(domain: ParamDomain, group: GroupKind, x: &Mat, y: &Mat) -> Self {
        Self { domain, group, wu: vec![x.clone(); domain.len()], wv: vec![y.clone(); domain.len()], projection_noise: 0.0 }
    }

    /// Coefficients `(du, dv)` of the entry `ω^row_col` at grid index `k`.
    pub fn entry(&self, k: usize, row: usize, col: usize) -> (f64, f64) {
        (self.wu[k][(row, col)], self.wv[k][(row, col)])
    }

    /// Largest entrywise difference to another form on the same grid.
    pub fn distance(&self, other: &MCForm, interior_only: bool) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, j, _, _) in self.domain.points() {
            if interior_only && !self.domain.is_interior(i, j) {
                continue;
            }
            let k = self.domain.index(i, j);
            worst = worst.max((&self.wu[k] - &other.wu[k]).amax()).max((&self.wv[k] - &other.wv[k]).amax());
        }
        worst
    }
}

/// `ω_u = e⁻¹ ∂_u e`, `ω_v = e⁻¹ ∂_v e` by central differences, projected onto the algebra.
pub fn pullback_mc(e: &FrameField) -> Result<MCForm> {
    let d = e.domain;
    let du = d.diff(&e.mats, Axis::U);
    let dv = d.diff(&e.mats, Axis::V);
    let mut noise: f64 = 0.0;
    let mut wu = Vec::with_capacity(d.len());
    let mut wv = Vec::with_capacity(d.len());
    for k in 0..d.len() {
        let inv = e.group.inverse(&e.mats[k]);
        let a = &inv * &du[k];
        let b = &inv * &dv[k];
        noise = noise.max(e.group.algebra_residual(&a)).max(e.group.algebra_residual(&b));
        wu.push(e.group.project(&a));
        wv.push(e.group.project(&b));
    }
    Ok(MCForm { domain: d, group: e.group, wu, wv, projection_noise: noise })
}

/// Max-abs entry of `∂_u ω_v − ∂_v ω_u + [ω_u, ω_v]` over interior points.
pub fn structure_residual(w: &MCForm) -> f64 {
    let d = w.domain;
    let dvu = d.diff(&w.wv, Axis::U);
    let duv = d.diff(&w.wu, Axis::V);
    let mut worst: f64 = 0.0;
    for (i, j, _, _) in d.points() {
        if !d.is_interior(i, j) {
            continue;
        }
        let k = d.index(i, j);
        let br = &w.wu[k] * &w.wv[k] - &w.wv[k] * &w.wu[k];
        worst = worst.max((&dvu[k] - &duv[k] + br).amax());
    }
    worst
}

#[derive(Clone, Debug, Serialize)]
pub struct Congruence {
    pub congruent: bool,
    /// Mean of `ẽ e⁻¹` over the grid when congruent.
    #[serde(skip)]
    pub g: Option<Mat>,
    /// Largest entrywise spread of `ẽ e⁻¹` over the grid.
    pub deviation: f64,
}

pub fn congruence_test(e: &FrameField, e2: &FrameField, tol: f64) -> Result<Congruence> {
    if e.domain != e2.domain {
        return Err(Error::GridMismatch);
    }
    if e.group != e2.group {
        return Err(Error::MetricMismatch);
    }
    let n = e.group.dimension();
    let mut lo = Mat::from_element(n, n, f64::INFINITY);
    let mut hi = Mat::from_element(n, n, f64::NEG_INFINITY);
    let mut mean = Mat::zeros(n, n);
    for (a, b) in e.mats.iter().zip(&e2.mats) {
        let g = b * e.group.inverse(a);
        lo.zip_apply(&g, |l, x| *l = l.min(x));
        hi.zip_apply(&g, |h, x| *h = h.max(x));
        mean += g;
    }
    mean /= e.mats.len() as f64;
    let deviation = (hi - lo).amax();
    let congruent = deviation < tol;
    Ok(Congruence { congruent, g: congruent.then_some(mean), deviation })
}

pub fn congruence_default(e: &FrameField, e2: &FrameField) -> Result<Congruence> {
    congruence_test(e, e2, CONGRUENCE)
}

#[derive(Clone, Debug)]
pub struct Integration {
    pub field: FrameField,
    /// Max-abs difference between row-first and column-first integration.
    pub path_residual: f64,
    /// Max-abs difference between the pullback of the result and the input (interior points).
    pub pullback_residual: f64,
}

fn midpoint_step(e: &Mat, a: &Mat, b: &Mat, h: f64) -> Mat {
    e * expm(&((a + b) * (0.5 * h)))
}

fn integrate_path(eta: &MCForm, base: &Mat, rows_first: bool) -> Vec<Mat> {
    let d = eta.domain;
    let (hu, hv) = (d.step_u(), d.step_v());
    let mut out = vec![Mat::zeros(0, 0); d.len()];
    out[0] = base.clone();
    if rows_first {
        for i in 1..d.nu {
            let (p, q) = (d.index(i - 1, 0), d.index(i, 0));
            out[q] = midpoint_step(&out[p], &eta.wu[p], &eta.wu[q], hu);
        }
        for i in 0..d.nu {
            for j in 1..d.nv {
                let (p, q) = (d.index(i, j - 1), d.index(i, j));
                out[q] = midpoint_step(&out[p], &eta.wv[p], &eta.wv[q], hv);
            }
        }
    } else {
        for j in 1..d.nv {
            let (p, q) = (d.index(0, j - 1), d.index(0, j));
            out[q] = midpoint_step(&out[p], &eta.wv[p], &eta.wv[q], hv);
        }
        for j in 0..d.nv {
            for i in 1..d.nu {
                let (p, q) = (d.index(i - 1, j), d.index(i, j));
                out[q] = midpoint_step(&out[p], &eta.wu[p], &eta.wu[q], hu);
            }
        }
    }
    out
}

/// Integrate a flat form from the base corner: along the first `v` row in
/// the `u` direction, then up each column, by exponential midpoint steps.
pub fn integrate_mc(eta: &MCForm, base: &Mat) -> Result<Integration> {
    integrate_mc_with(eta, base, INTEGRABILITY)
}

pub fn integrate_mc_with(eta: &MCForm, base: &Mat, tol: f64) -> Result<Integration> {
    let flat = structure_residual(eta);
    if !(flat <= tol) {
        return Err(Error::NotIntegrable(flat));
    }
    let r = eta.group.residual(base);
    if !(r <= FRAME_FIELD) {
        return Err(Error::NotInGroup { residual: r });
    }
    let rows = integrate_path(eta, base, true);
    let cols = integrate_path(eta, base, false);
    let path_residual = rows.iter().zip(&cols).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max);
    let field = FrameField::new(eta.domain, eta.group, rows)?;
    let pullback_residual = pullback_mc(&field)?.distance(eta, true);
    Ok(Integration { field, path_residual, pullback_residual })
}

/// Generators of the `E(3)` distribution `θ³ = 0, ω¹₂ = ω³₂ = 0, ω³₁ = aθ¹`:
/// `X` has `θ¹ = 1` and `Y` has `θ² = 1`. They commute, and the orbit of the
/// origin is the cylinder `x² + (z − 1/a)² = 1/a²`.
pub fn cylinder_distribution(a: f64) -> (Mat, Mat) {
    let mut x = Mat::zeros(4, 4);
    x[(1, 0)] = 1.0;
    x[(3, 1)] = a;
    x[(1, 3)] = -a;
    let mut y = Mat::zeros(4, 4);
    y[(2, 0)] = 1.0;
    (x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::subalgebra::MatrixAlgebra;

    fn so3(i: usize, j: usize) -> Mat {
        let mut x = Mat::zeros(3, 3);
        x[(i, j)] = -1.0;
        x[(j, i)] = 1.0;
        x
    }

    #[test]
    fn constant_field_has_zero_form() {
        let d = ParamDomain::patch((0.0, 0.0), 1.0, 6).unwrap();
        let g = GroupKind::Metric(Metric::euclidean3());
        let e = FrameField::from_fn(d, g, |_, _| expm(&so3(0, 1))).unwrap();
        let w = pullback_mc(&e).unwrap();
        assert!(w.wu.iter().chain(&w.wv).all(|m| m.amax() < 1e-14));
        assert!(structure_residual(&w) < 1e-13);
    }

    #[test]
    fn one_parameter_subgroup_recovers_its_generator() {
        let d = ParamDomain::patch((0.3, 0.0), 0.5, 21).unwrap();
        let m = Metric::moebius();
        let x = MatrixAlgebra::new(m).basis()[3].clone() + MatrixAlgebra::new(m).basis()[7].clone() * 0.5;
        let e = FrameField::from_fn(d, GroupKind::Metric(m), |u, _| expm(&(&x * u))).unwrap();
        let w = pullback_mc(&e).unwrap();
        let interior = d.points().filter(|&(i, j, _, _)| d.is_interior(i, j));
        let worst = interior.map(|(i, j, _, _)| (&w.wu[d.index(i, j)] - &x).amax()).fold(0.0, f64::max);
        assert!(worst < 1e-5, "{worst}");
        // second-order one-sided stencils on the edges
        let edge = (&w.wu[0] - &x).amax();
        assert!(edge < 1e-2, "{edge}");
        assert!(w.wv.iter().all(|a| a.amax() < 1e-12));
    }

    #[test]
    fn non_flat_form_is_detected() {
        let d = ParamDomain::patch((0.0, 0.0), 1.0, 9).unwrap();
        let g = GroupKind::Metric(Metric::euclidean3());
        let (x, y) = (so3(0, 1), so3(1, 2));
        let mut w = MCForm::constant(d, g, &x, &y);
        for (i, j, _, v) in d.points() {
            w.wv[d.index(i, j)] = &y * v;
        }
        assert!(structure_residual(&w) > 0.1);
        assert!(matches!(integrate_mc(&w, &Mat::identity(3, 3)), Err(Error::NotIntegrable(_))));
        assert_eq!(structure_residual(&MCForm::constant(d, g, &Mat::zeros(3, 3), &Mat::zeros(3, 3))), 0.0);
    }

    #[test]
    fn constant_form_integrates_to_exponential() {
        let d = ParamDomain::patch((0.0, 0.0), 1.0, 9).unwrap();
        let g = GroupKind::Metric(Metric::euclidean3());
        let x = so3(0, 1);
        let w = MCForm::constant(d, g, &x, &Mat::zeros(3, 3));
        let out = integrate_mc(&w, &Mat::identity(3, 3)).unwrap();
        for (i, j, u, _) in d.points() {
            let want = expm(&(&x * (u - d.u_range.0)));
            assert!((out.field.at(i, j) - want).amax() < 1e-13);
        }
        assert!(out.path_residual < 1e-13);
    }

    #[test]
    fn euclidean_group_helpers() {
        let g = GroupKind::Euclidean3;
        let mut t = Mat::identity(4, 4);
        t.view_mut((1, 1), (3, 3)).copy_from(&expm(&so3(0, 2)));
        t[(1, 0)] = 1.0;
        t[(3, 0)] = -2.0;
        assert!(g.residual(&t) < 1e-15);
        assert!((g.inverse(&t) * &t - Mat::identity(4, 4)).amax() < 1e-15);
    }

    #[test]
    fn congruence_of_a_translated_field() {
        let d = ParamDomain::patch((0.0, 0.0), 1.0, 7).unwrap();
        let g = GroupKind::Metric(Metric::euclidean3());
        let e = FrameField::from_fn(d, g, |u, v| expm(&(so3(0, 1) * u + so3(1, 2) * (u * v)))).unwrap();
        let g0 = expm(&(so3(0, 2) * 0.7));
        let c = congruence_default(&e, &e.left_translate(&g0).unwrap()).unwrap();
        assert!(c.congruent);
        assert!((c.g.unwrap() - g0).amax() < 1e-14);
        let shifted = FrameField::from_fn(d, g, |u, v| expm(&(so3(0, 1) * (u + 0.3) + so3(1, 2) * ((u + 0.3) * v)))).unwrap();
        assert!(!congruence_default(&e, &shifted).unwrap().congruent);
    }

    #[test]
    fn cylinder_distribution_integrates_to_the_cylinder() {
        let (x, y) = cylinder_distribution(1.0);
        assert_eq!((&x * &y - &y * &x).amax(), 0.0);
        let d = ParamDomain::new((0.0, 6.0), (-1.0, 1.0), 32, 8, false, false).unwrap();
        let eta = MCForm::constant(d, GroupKind::Euclidean3, &x, &y);
        let r = integrate_mc(&eta, &Mat::identity(4, 4)).unwrap();
        for (k, (_, _, u, v)) in d.points().enumerate() {
            let m = &r.field.mats()[k];
            let p = (m[(1, 0)], m[(2, 0)], m[(3, 0)]);
            assert!((p.0 * p.0 + (p.2 - 1.0).powi(2) - 1.0).abs() < 1e-12);
            assert!((p.0 - u.sin()).abs() < 1e-12 && (p.1 - (v + 1.0)).abs() < 1e-12);
        }
        assert!(r.path_residual < 1e-12);
    }
}
