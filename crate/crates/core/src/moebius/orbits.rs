//! The subalgebras `𝔥_C` of the Möbius algebra and their orbit surfaces.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2, TAU};

use nalgebra::SymmetricEigen;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::{FrameField, GroupKind};
use crate::linalg::{expm, null_space, subalgebra_from_constraints, BasisTag, Coords, LinearFunctional, Mat, Metric, ProjectivePoint, SubalgebraBasis};
use crate::moebius::frames::gauge_for;
use crate::space_forms::{chart_inverse, SpaceForm};
use crate::surface::domain::ParamDomain;
use crate::surface::parametric::ParametricSurface;

/// `C` within this distance of `±1` is treated as the cylinder case.
const CYLINDER_BAND: f64 = 1e-12;

/// The eight relations cutting `𝔥_C` out of the Möbius algebra.
pub fn hc_constraints(c: f64) -> Vec<LinearFunctional> {
    vec![
        LinearFunctional::entry(0, 0),
        LinearFunctional::relation(0, 1, -0.5 + c, 1, 0),
        LinearFunctional::relation(0, 2, -0.5 - c, 2, 0),
        LinearFunctional::entry(0, 3),
        LinearFunctional::entry(2, 1),
        LinearFunctional::relation(3, 1, 1.0, 1, 0),
        LinearFunctional::relation(3, 2, -1.0, 2, 0),
        LinearFunctional::entry(3, 0),
    ]
}

pub fn hc_basis(c: f64) -> SubalgebraBasis {
    subalgebra_from_constraints(&hc_constraints(c), Metric::moebius())
}

/// The basis `X, Y` of `𝔥_C` dual to the coframe: `ω¹₀(X) = ω²₀(Y) = 1`,
/// `ω²₀(X) = ω¹₀(Y) = 0`.
pub fn hc_generators(c: f64) -> Result<(Mat, Mat)> {
    let b = hc_basis(c);
    if b.dimension() != 2 {
        return Err(Error::Invalid(format!("h_C has dimension {} for C = {c}", b.dimension())));
    }
    let (x, y) = (b.elements[0].mat(), b.elements[1].mat());
    let m = nalgebra::Matrix2::new(x[(1, 0)], y[(1, 0)], x[(2, 0)], y[(2, 0)]);
    let mi = m.try_inverse().ok_or(Error::Dependent)?;
    Ok((x * mi[(0, 0)] + y * mi[(1, 0)], x * mi[(0, 1)] + y * mi[(1, 1)]))
}

/// Swap `δ₁ ↔ δ₂` and reverse `δ₃`; conjugates `𝔥_C` onto `𝔥_{−C}` and fixes `δ₀`.
pub fn sign_flip() -> Mat {
    let mut p = Mat::zeros(5, 5);
    p[(0, 0)] = 1.0;
    p[(2, 1)] = 1.0;
    p[(1, 2)] = 1.0;
    p[(3, 3)] = -1.0;
    p[(4, 4)] = 1.0;
    p
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `|C| < 1`: isoparametric torus in `S³` through `f₊`.
    Torus,
    /// `|C| = 1`: circular cylinder of radius 1 in `R³` through `f₀`.
    Cylinder,
    /// `|C| > 1`: circular hyperboloid in `H³` through `f₋`.
    Hyperboloid,
}

impl Regime {
    pub fn of(c: f64) -> Self {
        let a = c.abs();
        if (a - 1.0).abs() <= CYLINDER_BAND {
            Regime::Cylinder
        } else if a < 1.0 {
            Regime::Torus
        } else {
            Regime::Hyperboloid
        }
    }

    pub fn chart(self) -> SpaceForm {
        match self {
            Regime::Torus => SpaceForm::Sphere,
            Regime::Cylinder => SpaceForm::Euclidean,
            Regime::Hyperboloid => SpaceForm::Hyperbolic,
        }
    }
}

/// Principal curvatures `(a, c)` of the space-form surface with invariant `|C|`.
pub fn regime_curvatures(c: f64) -> (f64, f64) {
    let ca = c.abs();
    match Regime::of(c) {
        Regime::Torus => {
            let alpha = ca.acos() / 2.0;
            (-alpha.tan(), 1.0 / alpha.tan())
        }
        Regime::Cylinder => (0.0, 1.0),
        Regime::Hyperboloid => {
            let a = ((ca - 1.0) / (ca + 1.0)).sqrt();
            (a, 1.0 / a)
        }
    }
}

/// The fixed Möbius transformation undoing the second-order gauge, so that
/// the orbit lands on the standard surface (up to a space-form isometry) in
/// its chart.
pub fn orbit_normalization(c: f64) -> Mat {
    let (a, cc) = regime_curvatures(c);
    let s = match Regime::of(c) {
        Regime::Cylinder => FRAC_1_SQRT_2,
        _ => SQRT_2,
    };
    let k = gauge_for(s * a, s * cc);
    if c < 0.0 {
        let p = sign_flip();
        &p * k * p.transpose()
    } else {
        k
    }
}

/// `K exp(sX) exp(tY)`: the orbit frame at `(s, t)`.
pub fn hc_frame(c: f64, s: f64, t: f64) -> Result<Mat> {
    let (x, y) = hc_generators(c)?;
    Ok(orbit_normalization(c) * expm(&(x * s)) * expm(&(y * t)))
}

#[derive(Clone, Debug)]
pub struct HcOrbit {
    pub c: f64,
    pub regime: Regime,
    pub domain: ParamDomain,
    /// `K exp(sX) exp(tY)` per grid point (`δ` basis).
    pub frames: Vec<Mat>,
    /// Orbit points `[K exp(sX) exp(tY) δ₀]` (`δ` basis).
    pub points: Vec<ProjectivePoint>,
    /// Pullback through the regime's chart; `None` where the point leaves it.
    pub chart_points: Vec<Option<Coords>>,
    pub flagged: Vec<usize>,
}

impl HcOrbit {
    pub fn frame_field(&self) -> Result<FrameField> {
        FrameField::new(self.domain, GroupKind::Metric(Metric::moebius()), self.frames.clone())
    }
}

fn chart_of(regime: Regime, frame: &Mat) -> Result<(ProjectivePoint, Coords)> {
    let q = frame.column(0).into_owned();
    let p = ProjectivePoint::from_coords(q, Metric::moebius())?;
    let eps = p.to_basis(BasisTag::Epsilon)?;
    let y = chart_inverse(regime.chart(), eps.coords())?;
    Ok((p, y))
}

/// Sample the orbit of `[δ₀]` under `𝔥_C` over `(s, t) ∈ domain`.
pub fn hc_orbit(c: f64, domain: &ParamDomain) -> Result<HcOrbit> {
    let regime = Regime::of(c);
    let (x, y) = hc_generators(c)?;
    let k = orbit_normalization(c);
    let mut frames = Vec::with_capacity(domain.len());
    let mut points = Vec::with_capacity(domain.len());
    let mut chart_points = Vec::with_capacity(domain.len());
    let mut flagged = Vec::new();
    for (i, j, s, t) in domain.points() {
        let f = &k * expm(&(&x * s)) * expm(&(&y * t));
        let q = f.column(0).into_owned();
        points.push(ProjectivePoint::from_coords(q, Metric::moebius())?);
        match chart_of(regime, &f) {
            Ok((_, p)) => chart_points.push(Some(p)),
            Err(_) => {
                chart_points.push(None);
                flagged.push(domain.index(i, j));
            }
        }
        frames.push(f);
    }
    Ok(HcOrbit { c, regime, domain: *domain, frames, points, chart_points, flagged })
}

/// Period of `s ↦ exp(sX)[δ₀]` when the curve closes, from the largest
/// rotation rate of `X`.
pub fn orbit_period(x: &Mat) -> Option<f64> {
    let ev = x.clone().complex_eigenvalues();
    let w = ev.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if w < 1e-9 || ev.iter().any(|z| z.re.abs() > 1e-9) {
        return None;
    }
    let period = TAU / w;
    let q0 = x.column(0).len();
    let e = expm(&(x * period));
    let mut d0 = Coords::zeros(q0);
    d0[0] = 1.0;
    let back = e * &d0;
    let r = (&back / back.amax() - &d0).amax();
    (r < 1e-9).then_some(period)
}

/// Default parameter grid for the orbit: periodic where the orbit closes,
/// `[−2, 2]` otherwise.
pub fn hc_default_domain(c: f64, ns: usize, nt: usize) -> Result<ParamDomain> {
    let (x, y) = hc_generators(c)?;
    let range = |p: Option<f64>| match p {
        Some(p) => ((0.0, p), true),
        None => ((-2.0, 2.0), false),
    };
    let (su, pu) = range(orbit_period(&x));
    let (sv, pv) = range(orbit_period(&y));
    ParamDomain::new(su, sv, ns, nt, pu, pv)
}

/// The chart pullback of the orbit as a parametric surface (finite-difference partials).
pub fn hc_surface(c: f64) -> Result<ParametricSurface> {
    let regime = Regime::of(c);
    let (x, y) = hc_generators(c)?;
    let k = orbit_normalization(c);
    let pos = move |s: f64, t: f64| {
        let f = &k * expm(&(&x * s)) * expm(&(&y * t));
        chart_of(regime, &f).map(|(_, p)| p).unwrap_or_else(|_| Coords::from_element(regime.chart().ambient().dimension(), f64::NAN))
    };
    Ok(ParametricSurface::new(regime.chart(), "hc_orbit", std::sync::Arc::new(pos), (1.0, 1.0)).with_param("C", c))
}

/// Least-squares circular cylinder through a point cloud in `R³`.
#[derive(Clone, Debug, Serialize)]
pub struct CylinderFit {
    pub axis_point: [f64; 3],
    pub axis_dir: [f64; 3],
    pub radius: f64,
    /// Max `| dist(p, axis) − radius |`.
    pub max_deviation: f64,
    /// Max `| dist(p, axis) − 1 |`.
    pub max_unit_deviation: f64,
    /// Smallest-to-largest eigenvalue ratio of the quadratic part; zero for a cylinder.
    pub degeneracy: f64,
}

/// Fit a quadric `pᵀAp + bᵀp + c = 0` and read off the axis as the null
/// direction of `A`. Needs at least ten points in general position.
pub fn fit_cylinder(points: &[Coords]) -> Result<CylinderFit> {
    if points.len() < 10 {
        return Err(Error::Invalid("need at least ten points to fit a quadric".into()));
    }
    let rows: Vec<f64> = points
        .iter()
        .flat_map(|p| {
            let (x, y, z) = (p[0], p[1], p[2]);
            [x * x, y * y, z * z, x * y, x * z, y * z, x, y, z, 1.0]
        })
        .collect();
    let d = Mat::from_row_slice(points.len(), 10, &rows);
    // the coefficient vector is the direction of the smallest singular value
    let ns = null_space(&d, 1e-9);
    if ns.ncols() == 0 {
        return Err(Error::Invalid("points do not lie on a quadric".into()));
    }
    let q = ns.column(0);
    let a = nalgebra::Matrix3::new(q[0], q[3] / 2.0, q[4] / 2.0, q[3] / 2.0, q[1], q[5] / 2.0, q[4] / 2.0, q[5] / 2.0, q[2]);
    let b = nalgebra::Vector3::new(q[6], q[7], q[8]);
    let eig = SymmetricEigen::new(a);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[i].abs().total_cmp(&eig.eigenvalues[j].abs()));
    let axis = eig.eigenvectors.column(order[0]).into_owned();
    let lam = (eig.eigenvalues[order[1]] + eig.eigenvalues[order[2]]) / 2.0;
    let degeneracy = (eig.eigenvalues[order[0]] / lam).abs();
    let mut center = nalgebra::Vector3::zeros();
    for &i in &order[1..] {
        let v = eig.eigenvectors.column(i);
        center -= v * (v.dot(&b) / (2.0 * eig.eigenvalues[i]));
    }
    let r2 = (center.dot(&(a * center)) - q[9]) / lam;
    if !(r2 > 0.0) {
        return Err(Error::Invalid("fitted quadric is not a real cylinder".into()));
    }
    let radius = r2.sqrt();
    let (mut dev, mut unit) = (0.0_f64, 0.0_f64);
    for p in points {
        let w = nalgebra::Vector3::new(p[0], p[1], p[2]) - center;
        let dist = (w - axis * axis.dot(&w)).norm();
        dev = dev.max((dist - radius).abs());
        unit = unit.max((dist - 1.0).abs());
    }
    Ok(CylinderFit {
        axis_point: center.into(),
        axis_dir: axis.into(),
        radius,
        max_deviation: dev,
        max_unit_deviation: unit,
        degeneracy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::closure_residual;
    use crate::moebius::frames::frame_order_check;
    use crate::moebius::spheres::{sphere_map_dupin_test, SphereVec};
    use crate::tolerances::SPHERE_RANK;

    const CS: [f64; 4] = [0.0, 0.5, 1.0, 5.0 / 3.0];

    #[test]
    fn dimensions_and_closure() {
        for c in CS.into_iter().chain([-0.5, -2.0]) {
            let b = hc_basis(c);
            assert_eq!(b.dimension(), 2, "C = {c}");
            assert!(b.closure_residual < 1e-10 && b.constraint_residual() < 1e-12);
            let (x, y) = hc_generators(c).unwrap();
            assert!((&x * &y - &y * &x).amax() < 1e-12, "abelian");
        }
    }

    #[test]
    fn flip_conjugates_the_subalgebras() {
        let p = sign_flip();
        for c in [0.5, 2.0] {
            let (x, y) = hc_generators(c).unwrap();
            let (xm, ym) = hc_generators(-c).unwrap();
            assert!((&p * &y * p.transpose() - &xm).amax() < 1e-12);
            assert!((&p * &x * p.transpose() - &ym).amax() < 1e-12);
            assert!(closure_residual(&[xm, ym]) < 1e-12);
        }
    }

    #[test]
    fn orbit_frames_recover_c() {
        for c in CS.into_iter().chain([-0.5]) {
            let d = ParamDomain::patch((0.2, 0.3), 4e-3, 9).unwrap();
            let o = hc_orbit(c, &d).unwrap();
            let chk = frame_order_check(&o.frame_field().unwrap()).unwrap();
            assert!((chk.coefficients.c - c).abs() < 1e-6, "{} vs {c}", chk.coefficients.c);
            assert!(chk.dupin && chk.trace_residual < 1e-6);
        }
    }

    #[test]
    fn cylinder_orbit_has_unit_radius() {
        let d = ParamDomain::new((-1.0, 1.0), (-2.0, 2.0), 9, 9, false, false).unwrap();
        let o = hc_orbit(1.0, &d).unwrap();
        assert!(o.flagged.is_empty());
        let pts: Vec<Coords> = o.chart_points.iter().flatten().cloned().collect();
        let fit = fit_cylinder(&pts).unwrap();
        assert!(fit.max_unit_deviation < 1e-8, "{fit:?}");
    }

    #[test]
    fn orbit_surfaces_have_the_regime_curvatures() {
        for (c, prod) in [(0.0, -1.0), (0.5, -1.0), (5.0 / 3.0, 1.0)] {
            let s = hc_surface(c).unwrap();
            let k = s.curvature(0.3, 0.4).unwrap();
            assert!((k.a * k.c - prod).abs() < 1e-6, "C = {c}: {} {}", k.a, k.c);
            let (a, cc) = regime_curvatures(c);
            let mut want = [a.abs(), cc.abs()];
            let mut got = [k.a.abs(), k.c.abs()];
            want.sort_by(f64::total_cmp);
            got.sort_by(f64::total_cmp);
            assert!((want[0] - got[0]).abs() < 1e-6 && (want[1] - got[1]).abs() < 1e-6);
        }
    }

    #[test]
    fn torus_orbit_closes() {
        let d = hc_default_domain(0.5, 24, 24).unwrap();
        assert!(d.periodic_u && d.periodic_v, "{d:?}");
        assert!(hc_orbit(0.5, &d).unwrap().flagged.is_empty());
    }

    #[test]
    fn curvature_sphere_maps_are_dupin() {
        let m = Metric::moebius();
        for c in CS {
            let d = ParamDomain::new((0.0, 1.0), (0.0, 1.0), 33, 33, false, false).unwrap();
            let o = hc_orbit(c, &d).unwrap();
            for sign in [1.0, -1.0] {
                let maps: Vec<SphereVec> = o
                    .frames
                    .iter()
                    .map(|f| {
                        let s = f.column(3) + f.column(0) * sign;
                        let eps = m.change_matrix() * s;
                        SphereVec::new(eps).unwrap()
                    })
                    .collect();
                let t = sphere_map_dupin_test(&d, &maps, None, SPHERE_RANK).unwrap();
                assert!(t.dupin && !t.degenerate, "C = {c}, sign {sign}: {}", t.max_second);
            }
        }
    }
}
