//! Oriented spheres in `S³` as unit spacelike vectors of `R^{4,1}`, tangent
//! and curvature sphere maps, and the rank test for sphere maps.

use nalgebra::SVD;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Coords, Mat, Metric, Vector};
use crate::surface::domain::{Axis, ParamDomain};
use crate::tolerances::{DOUBLE_ROOT, MEMBERSHIP, SPHERE_RANK};

/// The sphere of center `m ∈ S³` and radius `r ∈ (0, π)`, oriented by the
/// unit normal pointing away from `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedSphere {
    m: Coords,
    r: f64,
}

impl OrientedSphere {
    pub fn new(m: &[f64], r: f64) -> Result<Self> {
        if m.len() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: m.len() });
        }
        let m = Coords::from_column_slice(m);
        let res = (m.norm_squared() - 1.0).abs();
        if !(res <= MEMBERSHIP) {
            return Err(Error::OffQuadric(res));
        }
        if !(r > 0.0 && r < std::f64::consts::PI) {
            return Err(Error::OutOfRange(format!("radius {r} is not in (0, pi)")));
        }
        Ok(Self { m, r })
    }

    pub fn center(&self) -> &Coords {
        &self.m
    }

    pub fn radius(&self) -> f64 {
        self.r
    }
}

/// A point of `S^{3,1}`: `⟨S, S⟩ = 1`, in `ε` coordinates of `R^{4,1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereVec {
    s: Coords,
}

impl SphereVec {
    pub fn new(s: Coords) -> Result<Self> {
        if s.len() != 5 {
            return Err(Error::DimensionMismatch { expected: 5, got: s.len() });
        }
        let res = (Metric::conformal().inner_coords(&s, &s) - 1.0).abs();
        if !(res <= MEMBERSHIP) {
            return Err(Error::OffQuadric(res));
        }
        Ok(Self { s })
    }

    pub fn coords(&self) -> &Coords {
        &self.s
    }

    pub fn vector(&self) -> Vector {
        Vector::new(self.s.clone(), Metric::conformal()).expect("five coordinates")
    }
}

/// `S_r(m) ↦ (m + cos r ε₄) / sin r`.
pub fn sphere_to_vec(s: &OrientedSphere) -> SphereVec {
    let (sn, cs) = s.r.sin_cos();
    let mut v = Coords::zeros(5);
    v.rows_mut(0, 4).copy_from(&(&s.m / sn));
    v[4] = cs / sn;
    SphereVec { s: v }
}

/// Inverse of [`sphere_to_vec`]: `cot r = s⁴`.
pub fn vec_to_sphere(v: &SphereVec) -> OrientedSphere {
    let r = 1.0_f64.atan2(v.s[4]);
    let m = v.s.rows(0, 4) * r.sin();
    OrientedSphere { m: &m / m.norm(), r }
}

fn unit_check(x: &Coords, what: &str) -> Result<()> {
    let res = (x.norm_squared() - 1.0).abs();
    if !(res <= MEMBERSHIP) {
        return Err(Error::Invalid(format!("{what} is not a unit vector (residual {res:e})")));
    }
    Ok(())
}

/// `cot r (x + ε₄) + e₃`: the sphere through `x` tangent to the normal `e₃`.
pub fn tangent_sphere(x: &Coords, e3: &Coords, r: f64) -> Result<SphereVec> {
    if x.len() != 4 || e3.len() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: x.len().max(e3.len()) });
    }
    unit_check(x, "x")?;
    unit_check(e3, "e3")?;
    let d = x.dot(e3).abs();
    if !(d <= MEMBERSHIP) {
        return Err(Error::NonOrthogonal(d));
    }
    if !(r > 0.0 && r < std::f64::consts::PI) {
        return Err(Error::OutOfRange(format!("radius {r} is not in (0, pi)")));
    }
    Ok(tangent_sphere_cot(x, e3, 1.0 / r.tan()))
}

/// [`tangent_sphere`] parametrized by `cot r` directly.
pub fn tangent_sphere_cot(x: &Coords, e3: &Coords, cot_r: f64) -> SphereVec {
    let mut s = Coords::zeros(5);
    s.rows_mut(0, 4).copy_from(&(x * cot_r + e3));
    s[4] = cot_r;
    SphereVec { s }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PencilFlag {
    /// Discriminant within the double-root band: one root, repeated.
    DoubleRoot,
    /// Negative discriminant: no real curvature spheres.
    Complex,
    /// The determinant vanishes identically in `r`.
    TotallyUmbilic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureSpheres {
    pub roots: Vec<f64>,
    pub flag: Option<PencilFlag>,
}

/// Real roots `r` of `(ω¹₃ + r ω¹₀) ∧ (ω²₃ + r ω²₀) = 0` for the Möbius
/// Maurer–Cartan coefficients `(ω_u, ω_v)` at one point.
pub fn curvature_sphere_params(wu: &Mat, wv: &Mat) -> CurvatureSpheres {
    // α = A + rB, β = C + rD; α∧β = (α_u β_v − α_v β_u) du∧dv
    let (a, b) = ((wu[(1, 3)], wv[(1, 3)]), (wu[(1, 0)], wv[(1, 0)]));
    let (c, d) = ((wu[(2, 3)], wv[(2, 3)]), (wu[(2, 0)], wv[(2, 0)]));
    let q2 = b.0 * d.1 - b.1 * d.0;
    let q1 = a.0 * d.1 + b.0 * c.1 - a.1 * d.0 - b.1 * c.0;
    let q0 = a.0 * c.1 - a.1 * c.0;
    let scale = q2.abs().max(q1.abs()).max(q0.abs());
    if scale < DOUBLE_ROOT || q2.abs() < DOUBLE_ROOT * scale {
        if q1.abs() < DOUBLE_ROOT * scale.max(1.0) {
            return CurvatureSpheres { roots: vec![], flag: Some(PencilFlag::TotallyUmbilic) };
        }
        return CurvatureSpheres { roots: vec![-q0 / q1], flag: None };
    }
    let (p, q) = (q1 / q2, q0 / q2);
    let disc = p * p / 4.0 - q;
    if disc.abs() <= DOUBLE_ROOT {
        CurvatureSpheres { roots: vec![-p / 2.0], flag: Some(PencilFlag::DoubleRoot) }
    } else if disc < 0.0 {
        CurvatureSpheres { roots: vec![], flag: Some(PencilFlag::Complex) }
    } else {
        let s = disc.sqrt();
        CurvatureSpheres { roots: vec![-p / 2.0 - s, -p / 2.0 + s], flag: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SphereMapTest {
    pub dupin: bool,
    /// Second singular value of `dS` per grid point.
    pub min_singular_values: Vec<f64>,
    /// Largest second singular value over interior points.
    pub max_second: f64,
    /// Largest second singular value of `dS` with the `x + ε₄` component
    /// removed (only reported when the point lift is supplied).
    pub max_second_mod_point: Option<f64>,
    /// `dS` vanishes: the map is constant.
    pub degenerate: bool,
}

/// `S` is Dupin when its differential is singular everywhere: the second
/// singular value of the 5×2 matrix `[S_u S_v]` stays below `tol` relative to
/// `max(1, σ₁)` at every interior grid point.
pub fn sphere_map_dupin_test(domain: &ParamDomain, s: &[SphereVec], point_lift: Option<&[Coords]>, tol: f64) -> Result<SphereMapTest> {
    if s.len() != domain.len() || point_lift.is_some_and(|p| p.len() != domain.len()) {
        return Err(Error::GridMismatch);
    }
    let data: Vec<Coords> = s.iter().map(|v| v.s.clone()).collect();
    let su = domain.diff(&data, Axis::U);
    let sv = domain.diff(&data, Axis::V);
    let second = |a: &Coords, b: &Coords| {
        let sv = SVD::new(Mat::from_columns(&[a.clone(), b.clone()]), false, false).singular_values;
        let (s1, s2) = (sv[0].max(sv[1]), sv[0].min(sv[1]));
        (s1, s2 / s1.max(1.0))
    };
    let mut mins = vec![0.0; domain.len()];
    let (mut worst, mut worst_mod, mut top) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (i, j, _, _) in domain.points() {
        let k = domain.index(i, j);
        let (s1, s2) = second(&su[k], &sv[k]);
        mins[k] = s2;
        if !domain.is_interior(i, j) {
            continue;
        }
        worst = worst.max(s2);
        top = top.max(s1);
        if let Some(p) = point_lift {
            // drop the component along the null point: pair against the
            // dual null vector (ε₄ − x)/2 with ⟨x + ε₄, (ε₄ − x)/2⟩ = −1
            let x = &p[k];
            let mut dual = -x;
            dual[4] = x[4];
            let m = Metric::conformal();
            let strip = |w: &Coords| w + x * (m.inner_coords(w, &dual) / 2.0);
            worst_mod = worst_mod.max(second(&strip(&su[k]), &strip(&sv[k])).1);
        }
    }
    let degenerate = top < tol;
    Ok(SphereMapTest {
        dupin: worst < tol,
        min_singular_values: mins,
        max_second: worst,
        max_second_mod_point: point_lift.map(|_| worst_mod),
        degenerate,
    })
}

pub fn sphere_map_dupin_default(domain: &ParamDomain, s: &[SphereVec]) -> Result<SphereMapTest> {
    sphere_map_dupin_test(domain, s, None, SPHERE_RANK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space_forms::moebius_lift;
    use crate::space_forms::SpaceForm;
    use crate::surface::best_frame::principal_frame;
    use crate::surface::catalog::torus;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    #[test]
    fn identification_examples() {
        let s = sphere_to_vec(&OrientedSphere::new(&[1.0, 0.0, 0.0, 0.0], FRAC_PI_2).unwrap());
        assert!((s.coords() - Coords::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0])).amax() < 1e-15);
        let s = sphere_to_vec(&OrientedSphere::new(&[1.0, 0.0, 0.0, 0.0], FRAC_PI_4).unwrap());
        assert!((s.coords() - Coords::from_vec(vec![SQRT_2, 0.0, 0.0, 0.0, 1.0])).amax() < 1e-15);
        assert!((s.vector().norm2() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tangent_sphere_contains_the_point() {
        let x = Coords::from_vec(vec![0.6, 0.8, 0.0, 0.0]);
        let n = Coords::from_vec(vec![0.0, 0.0, 0.6, 0.8]);
        let s = tangent_sphere(&x, &n, 0.7).unwrap();
        let p = moebius_lift(SpaceForm::Sphere, &x);
        assert!(Metric::conformal().inner_coords(s.coords(), &p).abs() < 1e-14);
        assert!(tangent_sphere(&x, &x, 0.7).is_err());
        assert!((tangent_sphere(&x, &n, FRAC_PI_2).unwrap().coords().rows(0, 4) - &n).amax() < 1e-15);
    }

    fn torus_sphere_map(cot_r: Option<f64>, n: usize) -> (ParamDomain, Vec<SphereVec>, Vec<Coords>) {
        let t = torus(FRAC_PI_4).unwrap();
        let d = ParamDomain::torus(n, n).unwrap();
        let mut maps = Vec::new();
        let mut lifts = Vec::new();
        for (_, _, u, v) in d.points() {
            let f = principal_frame(&t, u, v).unwrap();
            maps.push(tangent_sphere_cot(&f.x, &f.n, cot_r.unwrap_or(f.a)));
            lifts.push(moebius_lift(SpaceForm::Sphere, &f.x));
        }
        (d, maps, lifts)
    }

    #[test]
    fn curvature_sphere_map_on_torus_is_dupin() {
        let (d, s, p) = torus_sphere_map(None, 64);
        let t = sphere_map_dupin_test(&d, &s, Some(&p), SPHERE_RANK).unwrap();
        assert!(t.dupin && !t.degenerate, "{}", t.max_second);
        let (d, s, p) = torus_sphere_map(Some(1.0 / (FRAC_PI_2 + 0.3).tan()), 64);
        let t = sphere_map_dupin_test(&d, &s, Some(&p), SPHERE_RANK).unwrap();
        assert!(!t.dupin && t.max_second > 1e-2, "{}", t.max_second);
    }

    #[test]
    fn constant_map_is_degenerate() {
        let d = ParamDomain::torus(8, 8).unwrap();
        let s = vec![SphereVec::new(Coords::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0])).unwrap(); 64];
        let t = sphere_map_dupin_default(&d, &s).unwrap();
        assert!(t.dupin && t.degenerate);
    }

    #[test]
    fn pencil_roots() {
        // ω¹₃ = −2ω¹₀, ω²₃ = 3ω²₀ gives roots 2 and −3
        let mut wu = Mat::zeros(5, 5);
        let mut wv = Mat::zeros(5, 5);
        wu[(1, 0)] = 1.0;
        wu[(1, 3)] = -2.0;
        wv[(2, 0)] = 1.0;
        wv[(2, 3)] = 3.0;
        let c = curvature_sphere_params(&wu, &wv);
        assert_eq!(c.flag, None);
        assert!((c.roots[0] + 3.0).abs() < 1e-14 && (c.roots[1] - 2.0).abs() < 1e-14);
        wv[(2, 3)] = -2.0;
        assert_eq!(curvature_sphere_params(&wu, &wv).flag, Some(PencilFlag::DoubleRoot));
        let z = Mat::zeros(5, 5);
        assert_eq!(curvature_sphere_params(&z, &z).flag, Some(PencilFlag::TotallyUmbilic));
    }
}
