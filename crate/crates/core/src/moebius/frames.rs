//! Möbius frames along surfaces in the space forms and verification of the
//! first, second and third order frame conditions.

use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::{pullback_mc, FrameField, GroupKind, MCForm};
use crate::linalg::{lstsq, GroupElement, Mat, Metric};
use crate::space_forms::{group_embed, SpaceForm, SpaceFormIsometry};
use crate::surface::best_frame::{principal_frames, space_form_frame_matrix, PrincipalFrame};
use crate::surface::domain::{Axis, ParamDomain};
use crate::surface::parametric::ParametricSurface;
use crate::tolerances::{FRAME_ORDER, INTEGRABILITY};

/// A Möbius frame: `Yᵀ g Y = g` in the `δ` basis.
#[derive(Clone, Debug)]
pub struct MoebiusFrame(pub GroupElement);

impl MoebiusFrame {
    pub fn new(y: Mat) -> Result<Self> {
        Ok(Self(GroupElement::new(y, Metric::moebius())?))
    }

    pub fn mat(&self) -> &Mat {
        self.0.mat()
    }
}

/// Gauge fixing `Y₃ ↦ Y₃ + H Y₀` and `Y₀ ↦ s Y₀`, completed to a group element.
pub fn second_order_gauge(h: f64, s: f64) -> Mat {
    let mut k = Mat::identity(5, 5);
    k[(0, 0)] = s;
    k[(0, 3)] = h;
    k[(4, 4)] = 1.0 / s;
    k[(3, 4)] = h / s;
    k[(0, 4)] = h * h / (2.0 * s);
    k
}

/// Principal curvatures rescaled to the Möbius frame: `√2 a` through `F₊`, `F₋`
/// and `a/√2` through `F₀`.
pub fn frame_curvature_scale(form: SpaceForm) -> f64 {
    match form {
        SpaceForm::Euclidean => std::f64::consts::FRAC_1_SQRT_2,
        _ => std::f64::consts::SQRT_2,
    }
}

/// Second-order gauge for rescaled curvatures `ã ≠ c̃`.
pub fn gauge_for(at: f64, ct: f64) -> Mat {
    let h = (at + ct) / 2.0;
    let k = (ct - at) / 2.0;
    second_order_gauge(h, -k)
}

/// The first-order frame `F(x, e)` induced by a space-form frame.
pub fn first_order_frame(form: SpaceForm, f: &PrincipalFrame) -> Result<Mat> {
    let m = space_form_frame_matrix(form, f);
    let iso = match form {
        SpaceForm::Sphere => SpaceFormIsometry::Sphere(m),
        SpaceForm::Euclidean => SpaceFormIsometry::Euclidean(m),
        SpaceForm::Hyperbolic => SpaceFormIsometry::Hyperbolic(m),
    };
    Ok(group_embed(&iso)?.into_mat())
}

/// Candidate best Möbius frame: the image of the principal space-form frame
/// under `F₊`, `F₀` or `F₋`, followed by the second-order gauge.
pub fn moebius_best_frame(s: &ParametricSurface, domain: &ParamDomain) -> Result<FrameField> {
    let form = s.form();
    let scale = frame_curvature_scale(form);
    let frames = principal_frames(s, domain)?;
    let mats = frames
        .iter()
        .map(|f| Ok(first_order_frame(form, f)? * gauge_for(scale * f.a, scale * f.c)))
        .collect::<Result<Vec<_>>>()?;
    FrameField::new(*domain, GroupKind::Metric(Metric::moebius()), mats)
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct OrderResiduals {
    /// `max |ω³₀|`
    pub first: f64,
    /// `max |ω³₁ − ω¹₀|, |ω³₂ + ω²₀|`
    pub second: f64,
    /// `max |ω⁰₃|`
    pub third: f64,
}

/// Coefficients of a second-order Möbius frame relative to the coframe
/// `φ = ω¹₀ + iω²₀`.
#[derive(Clone, Debug, Serialize)]
pub struct MoebiusCoefficients {
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub p3: Vec<f64>,
    /// `(ω¹₀, ω²₀)` as `(du, dv)` coefficient pairs.
    #[serde(skip)]
    pub phi: Vec<[(f64, f64); 2]>,
    /// Mean of `(p₁ − p₃)/2` over interior points.
    pub c: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MoebiusCheck {
    pub orders: OrderResiduals,
    pub coefficients: MoebiusCoefficients,
    /// Largest least-squares residual of the coefficient fits.
    pub fit_residual: f64,
    /// The two complex integrability equations.
    pub integrability: [f64; 2],
    pub max_q: f64,
    pub max_p2: f64,
    /// `max |p₁ + p₃ + 1|`
    pub trace_residual: f64,
    /// `max − min` of `p₁ − p₃`.
    pub c_spread: f64,
    pub dupin: bool,
}

fn coframe(binv: &nalgebra::Matrix2<f64>, f: (f64, f64)) -> (f64, f64) {
    (f.0 * binv[(0, 0)] + f.1 * binv[(1, 0)], f.0 * binv[(0, 1)] + f.1 * binv[(1, 1)])
}

/// Verify the order conditions of a Möbius frame field and extract its
/// invariants. Fails if the frame is not first order.
pub fn frame_order_check(y: &FrameField) -> Result<MoebiusCheck> {
    frame_order_check_with(y, FRAME_ORDER)
}

pub fn frame_order_check_with(y: &FrameField, tol: f64) -> Result<MoebiusCheck> {
    if y.group() != GroupKind::Metric(Metric::moebius()) {
        return Err(Error::MetricMismatch);
    }
    let w = pullback_mc(y)?;
    check_form(&w, tol)
}

pub fn check_form(w: &MCForm, tol: f64) -> Result<MoebiusCheck> {
    let d = w.domain;
    let interior: Vec<usize> = d.points().filter(|&(i, j, _, _)| d.is_interior(i, j)).map(|(i, j, _, _)| d.index(i, j)).collect();
    let mut orders = OrderResiduals::default();
    for &k in &interior {
        for m in [&w.wu[k], &w.wv[k]] {
            orders.first = orders.first.max(m[(3, 0)].abs());
            orders.second = orders.second.max((m[(3, 1)] - m[(1, 0)]).abs()).max((m[(3, 2)] + m[(2, 0)]).abs());
            orders.third = orders.third.max(m[(0, 3)].abs());
        }
    }
    if !(orders.first <= tol) {
        return Err(Error::FrameOrder { order: "first", residual: orders.first });
    }
    let n = d.len();
    let (mut q1, mut q2, mut p1, mut p2, mut p3) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut phi = Vec::with_capacity(n);
    let mut binv = Vec::with_capacity(n);
    let mut fit: f64 = 0.0;
    for k in 0..n {
        let t1 = w.entry(k, 1, 0);
        let t2 = w.entry(k, 2, 0);
        phi.push([t1, t2]);
        let b = nalgebra::Matrix2::new(t1.0, t1.1, t2.0, t2.1);
        binv.push(b.try_inverse().ok_or(Error::NotImmersive(b.determinant()))?);
        let (w21, w00, w01, w02) = (w.entry(k, 2, 1), w.entry(k, 0, 0), w.entry(k, 0, 1), w.entry(k, 0, 2));
        // ω²₁ = q₁ω¹₀ + q₂ω²₀, ω⁰₀ = −2(q₂ω¹₀ − q₁ω²₀)
        let a = DMatrix::from_row_slice(4, 2, &[
            t1.0, t2.0, t1.1, t2.1,
            2.0 * t2.0, -2.0 * t1.0, 2.0 * t2.1, -2.0 * t1.1,
        ]);
        let (x, r) = lstsq(&a, &DVector::from_vec(vec![w21.0, w21.1, w00.0, w00.1]));
        q1[k] = x[0];
        q2[k] = x[1];
        let r_q = r;
        // ω⁰₁ = p₁ω¹₀ + p₂ω²₀, ω⁰₂ = −p₂ω¹₀ + p₃ω²₀
        let a = DMatrix::from_row_slice(4, 3, &[
            t1.0, t2.0, 0.0, t1.1, t2.1, 0.0,
            0.0, -t1.0, t2.0, 0.0, -t1.1, t2.1,
        ]);
        let (x, r) = lstsq(&a, &DVector::from_vec(vec![w01.0, w01.1, w02.0, w02.1]));
        p1[k] = x[0];
        p2[k] = x[1];
        p3[k] = x[2];
        if d.is_interior(d.ij(k).0, d.ij(k).1) {
            fit = fit.max(r_q).max(r);
        }
    }
    let integrability = integrability_residuals(&d, &binv, &q1, &q2, &p1, &p2, &p3, &interior);
    let mut max_q: f64 = 0.0;
    let mut max_p2: f64 = 0.0;
    let mut trace: f64 = 0.0;
    let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for &k in &interior {
        max_q = max_q.max(q1[k].abs()).max(q2[k].abs());
        max_p2 = max_p2.max(p2[k].abs());
        trace = trace.max((p1[k] + p3[k] + 1.0).abs());
        let diff = p1[k] - p3[k];
        lo = lo.min(diff);
        hi = hi.max(diff);
        sum += diff;
    }
    let c = sum / (2.0 * interior.len() as f64);
    Ok(MoebiusCheck {
        orders,
        coefficients: MoebiusCoefficients { q1, q2, p1, p2, p3, phi, c },
        fit_residual: fit,
        integrability,
        max_q,
        max_p2,
        trace_residual: trace,
        c_spread: hi - lo,
        dupin: max_q < tol && max_p2 < tol,
    })
}

/// Residuals of
/// `d(q₂ + iq₁)∧φ = −½(p₁ + p₃ + 1 + q₁² + q₂² + ip₂) φ∧φ̄` and
/// `d(p₁ + p₃ − 2ip₂)∧φ + d(p₁ − p₃)∧φ̄ = 0`, as coefficients of `ω¹₀∧ω²₀`.
#[allow(clippy::too_many_arguments)]
fn integrability_residuals(
    d: &ParamDomain,
    binv: &[nalgebra::Matrix2<f64>],
    q1: &[f64],
    q2: &[f64],
    p1: &[f64],
    p2: &[f64],
    p3: &[f64],
    interior: &[usize],
) -> [f64; 2] {
    let grad = |f: &[f64]| (d.diff(f, Axis::U), d.diff(f, Axis::V));
    let (q1g, q2g, p1g, p2g, p3g) = (grad(q1), grad(q2), grad(p1), grad(p2), grad(p3));
    let i = Complex::new(0.0, 1.0);
    let mut r = [0.0_f64; 2];
    for &k in interior {
        let cf = |g: &(Vec<f64>, Vec<f64>)| coframe(&binv[k], (g.0[k], g.1[k]));
        let (q1d, q2d, p1d, p2d, p3d) = (cf(&q1g), cf(&q2g), cf(&p1g), cf(&p2g), cf(&p3g));
        // df∧φ = (i f₁ − f₂) ω¹₀∧ω²₀ and df∧φ̄ = (−i f₁ − f₂) ω¹₀∧ω²₀; φ∧φ̄ = −2i ω¹₀∧ω²₀
        let f1 = Complex::new(q2d.0, q1d.0);
        let f2 = Complex::new(q2d.1, q1d.1);
        let z = Complex::new(p1[k] + p3[k] + 1.0 + q1[k] * q1[k] + q2[k] * q2[k], p2[k]);
        r[0] = r[0].max((i * f1 - f2 - i * z).norm());
        let g1 = Complex::new(p1d.0 + p3d.0, -2.0 * p2d.0);
        let g2 = Complex::new(p1d.1 + p3d.1, -2.0 * p2d.1);
        let (h1, h2) = (p1d.0 - p3d.0, p1d.1 - p3d.1);
        r[1] = r[1].max((i * g1 - g2 - i * h1 - h2).norm());
    }
    r
}

/// Whether the integrability residuals pass at the default tolerance.
pub fn integrable(c: &MoebiusCheck) -> bool {
    c.integrability[0] < INTEGRABILITY && c.integrability[1] < INTEGRABILITY
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::spheres::curvature_sphere_params;
    use crate::surface::catalog::{cylinder, hyperboloid, torus, warped_torus};
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

    fn check(s: &ParametricSurface, center: (f64, f64)) -> MoebiusCheck {
        let d = ParamDomain::patch(center, 4e-3, 9).unwrap();
        frame_order_check(&moebius_best_frame(s, &d).unwrap()).unwrap()
    }

    #[test]
    fn torus_invariant() {
        for (alpha, want) in [(FRAC_PI_4, 0.0), (FRAC_PI_6, 0.5)] {
            let c = check(&torus(alpha).unwrap(), (0.3, 1.1));
            assert!(c.orders.second < 1e-6 && c.orders.third < 1e-6, "{:?}", c.orders);
            assert!((c.coefficients.c - want).abs() < 1e-6, "{} vs {want}", c.coefficients.c);
            assert!(c.max_q < 1e-6 && c.max_p2 < 1e-6 && c.trace_residual < 1e-6, "{c:?}");
            assert!(c.dupin && integrable(&c));
        }
    }

    #[test]
    fn cylinder_and_hyperboloid_invariants() {
        let c = check(&cylinder(1.0).unwrap(), (0.3, 0.2));
        assert!((c.coefficients.c - 1.0).abs() < 1e-6, "{}", c.coefficients.c);
        let c = check(&hyperboloid(0.5).unwrap(), (0.3, 0.2));
        assert!((c.coefficients.c - 5.0 / 3.0).abs() < 1e-6, "{}", c.coefficients.c);
        assert!(c.max_q < 1e-6 && c.max_p2 < 1e-6 && c.trace_residual < 1e-6, "{c:?}");
    }

    #[test]
    fn best_frame_pencil_has_roots_plus_minus_one() {
        let d = ParamDomain::patch((0.3, 1.1), 4e-3, 9).unwrap();
        let w = pullback_mc(&moebius_best_frame(&torus(FRAC_PI_4).unwrap(), &d).unwrap()).unwrap();
        let k = d.index(4, 4);
        let r = curvature_sphere_params(&w.wu[k], &w.wv[k]);
        assert!((r.roots[0] + 1.0).abs() < 1e-6 && (r.roots[1] - 1.0).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn non_dupin_surface_is_reported() {
        let c = check(&warped_torus(2.0, 1.0, 0.1).unwrap(), (0.3, 1.1));
        assert!(c.orders.second < 1e-6);
        assert!(!c.dupin, "{c:?}");
    }

    #[test]
    fn identity_field_is_not_first_order() {
        // a frame whose base point moves off the first-order condition
        let d = ParamDomain::patch((0.0, 0.0), 0.1, 9).unwrap();
        let field = FrameField::from_fn(d, GroupKind::Metric(Metric::moebius()), |u, v| {
            let mut x = Mat::zeros(5, 5);
            x[(3, 0)] = u + v;
            crate::linalg::expm(&crate::linalg::project_to_algebra(&x, &Metric::moebius()))
        })
        .unwrap();
        match frame_order_check(&field) {
            Err(Error::FrameOrder { order, .. }) => assert_eq!(order, "first"),
            other => panic!("{other:?}"),
        }
    }
}
