//! Parametric surfaces in a space form, their fundamental forms and
//! principal curvatures.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix2, Matrix4, Vector2};

use crate::error::{Error, Result};
use crate::linalg::Coords;
use crate::space_forms::SpaceForm;
use crate::tolerances::{RANK, UMBILIC, UMBILIC_FD};

/// Position and partial derivatives up to order two at one parameter value.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub x: Coords,
    pub xu: Coords,
    pub xv: Coords,
    pub xuu: Coords,
    pub xuv: Coords,
    pub xvv: Coords,
}

pub type PointFn = Arc<dyn Fn(f64, f64) -> Coords + Send + Sync>;
pub type JetFn = Arc<dyn Fn(f64, f64) -> Jet + Send + Sync>;

#[derive(Clone)]
pub struct ParametricSurface {
    form: SpaceForm,
    name: String,
    params: Vec<(String, f64)>,
    position: PointFn,
    jet: Option<JetFn>,
    normal_sign: f64,
    fd_scale: (f64, f64),
}

impl fmt::Debug for ParametricSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricSurface")
            .field("form", &self.form)
            .field("name", &self.name)
            .field("params", &self.params)
            .field("analytic", &self.jet.is_some())
            .field("normal_sign", &self.normal_sign)
            .finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureData {
    pub a: f64,
    pub c: f64,
    /// Unit principal directions in `(du, dv)` coordinates.
    pub dir_a: [f64; 2],
    pub dir_c: [f64; 2],
    pub umbilic: bool,
}

impl ParametricSurface {
    /// `fd_scale` is the typical parameter range length in each direction;
    /// finite-difference steps are taken relative to it.
    pub fn new(form: SpaceForm, name: impl Into<String>, position: PointFn, fd_scale: (f64, f64)) -> Self {
        Self { form, name: name.into(), params: vec![], position, jet: None, normal_sign: 1.0, fd_scale }
    }

    pub fn with_jet(mut self, jet: JetFn) -> Self {
        self.jet = Some(jet);
        self
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.push((key.to_string(), value));
        self
    }

    pub fn with_normal_sign(mut self, sign: f64) -> Self {
        self.normal_sign = if sign < 0.0 { -1.0 } else { 1.0 };
        self
    }

    /// Choose the normal sign so that the normal at `(u, v)` agrees with `n`.
    pub fn oriented_like(mut self, u: f64, v: f64, n: &Coords) -> Self {
        self.normal_sign = 1.0;
        let m = self.normal(&self.jet(u, v));
        if self.form.ambient().inner_coords(&m, n) < 0.0 {
            self.normal_sign = -1.0;
        }
        self
    }

    pub fn form(&self) -> SpaceForm {
        self.form
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.jet.is_some()
    }

    pub fn normal_sign(&self) -> f64 {
        self.normal_sign
    }

    pub fn fd_scale(&self) -> (f64, f64) {
        self.fd_scale
    }

    pub fn position(&self, u: f64, v: f64) -> Coords {
        (self.position)(u, v)
    }

    pub fn position_fn(&self) -> PointFn {
        self.position.clone()
    }

    /// Analytic jet when available, otherwise central differences.
    pub fn jet(&self, u: f64, v: f64) -> Jet {
        match &self.jet {
            Some(j) => j(u, v),
            None => self.fd_jet(u, v),
        }
    }

    pub fn fd_jet(&self, u: f64, v: f64) -> Jet {
        let p = &self.position;
        let h1u = 1e-5 * self.fd_scale.0;
        let h1v = 1e-5 * self.fd_scale.1;
        let h2u = 1e-3 * self.fd_scale.0;
        let h2v = 1e-3 * self.fd_scale.1;
        let x = p(u, v);
        let xu = (p(u + h1u, v) - p(u - h1u, v)) / (2.0 * h1u);
        let xv = (p(u, v + h1v) - p(u, v - h1v)) / (2.0 * h1v);
        // fourth-order stencils for the second derivatives
        let d2 = |f: &dyn Fn(f64) -> Coords, h: f64| (-f(2.0 * h) + f(h) * 16.0 - &x * 30.0 + f(-h) * 16.0 - f(-2.0 * h)) / (12.0 * h * h);
        let xuu = d2(&|s| p(u + s, v), h2u);
        let xvv = d2(&|s| p(u, v + s), h2v);
        let xuv = (p(u + h2u, v + h2v) - p(u + h2u, v - h2v) - p(u - h2u, v + h2v) + p(u - h2u, v - h2v)) / (4.0 * h2u * h2v);
        Jet { x, xu, xv, xuu, xuv, xvv }
    }

    /// Unit normal in the space form (tangent to `S³`/`H³` where applicable).
    pub fn normal(&self, j: &Jet) -> Coords {
        let n = match self.form {
            SpaceForm::Euclidean => j.xu.cross(&j.xv),
            SpaceForm::Sphere => cross4(&j.x, &j.xu, &j.xv),
            SpaceForm::Hyperbolic => {
                let mut n = cross4(&j.x, &j.xu, &j.xv);
                n[3] = -n[3];
                n
            }
        };
        let m = self.form.ambient();
        let len = m.inner_coords(&n, &n).abs().sqrt();
        n * (self.normal_sign / len)
    }

    /// First and second fundamental forms at `(u, v)`.
    pub fn fundamental_forms(&self, u: f64, v: f64) -> Result<(Matrix2<f64>, Matrix2<f64>)> {
        let j = self.jet(u, v);
        self.forms_from_jet(u, v, &j)
    }

    pub fn forms_from_jet(&self, u: f64, v: f64, j: &Jet) -> Result<(Matrix2<f64>, Matrix2<f64>)> {
        let m = self.form.ambient();
        let ip = |a: &Coords, b: &Coords| m.inner_coords(a, b);
        let e = ip(&j.xu, &j.xu);
        let f = ip(&j.xu, &j.xv);
        let g = ip(&j.xv, &j.xv);
        let det = e * g - f * f;
        let scale = e.max(g).max(f64::MIN_POSITIVE);
        if !(det > RANK * scale * scale) {
            return Err(Error::SingularPoint { u, v });
        }
        let n = self.normal(j);
        let first = Matrix2::new(e, f, f, g);
        let second = Matrix2::new(ip(&j.xuu, &n), ip(&j.xuv, &n), ip(&j.xuv, &n), ip(&j.xvv, &n));
        Ok((first, second))
    }

    pub fn curvature(&self, u: f64, v: f64) -> Result<CurvatureData> {
        let (i, ii) = self.fundamental_forms(u, v)?;
        Ok(principal(&i, &ii, self.umbilic_tol()))
    }

    pub fn curvature_from_jet(&self, u: f64, v: f64, j: &Jet) -> Result<CurvatureData> {
        let (i, ii) = self.forms_from_jet(u, v, j)?;
        Ok(principal(&i, &ii, self.umbilic_tol()))
    }

    pub fn umbilic_tol(&self) -> f64 {
        if self.jet.is_some() {
            UMBILIC
        } else {
            UMBILIC_FD
        }
    }

    /// Residual of the model constraint at `(u, v)`.
    pub fn constraint_residual(&self, u: f64, v: f64) -> f64 {
        self.form.constraint_residual(&self.position(u, v))
    }
}

/// Principal curvatures `a ≤ c` and I-orthonormal directions from the two forms.
pub fn principal(i: &Matrix2<f64>, ii: &Matrix2<f64>, umbilic_tol: f64) -> CurvatureData {
    let (e, f, g) = (i[(0, 0)], i[(0, 1)], i[(1, 1)]);
    let (l, m, n) = (ii[(0, 0)], ii[(0, 1)], ii[(1, 1)]);
    let det_i = e * g - f * f;
    let sum = (e * n - 2.0 * f * m + g * l) / det_i;
    let prod = (l * n - m * m) / det_i;
    let disc = (sum * sum - 4.0 * prod).max(0.0).sqrt();
    // avoid cancellation in the smaller-magnitude root
    let (a, c) = if sum >= 0.0 {
        let big = 0.5 * (sum + disc);
        let small = if big != 0.0 { prod / big } else { 0.0 };
        (small.min(big), small.max(big))
    } else {
        let big = 0.5 * (sum - disc);
        let small = if big != 0.0 { prod / big } else { 0.0 };
        (big.min(small), big.max(small))
    };
    let umbilic = (c - a).abs() <= umbilic_tol * (1.0 + a.abs() + c.abs());

    let kernel = |k: f64| -> Vector2<f64> {
        let r1 = Vector2::new(m - k * f, -(l - k * e));
        let r2 = Vector2::new(n - k * g, -(m - k * f));
        if r1.norm() >= r2.norm() {
            r1
        } else {
            r2
        }
    };
    let mut da = if umbilic { Vector2::new(1.0, 0.0) } else { kernel(a) };
    if da.norm() == 0.0 {
        da = Vector2::new(1.0, 0.0);
    }
    // deterministic sign: the larger component positive
    if (da[0].abs() >= da[1].abs() && da[0] < 0.0) || (da[1].abs() > da[0].abs() && da[1] < 0.0) {
        da = -da;
    }
    let inorm = |d: &Vector2<f64>| (d.transpose() * i * d)[(0, 0)].sqrt();
    da /= inorm(&da);
    let w = i * da;
    let mut dc = Vector2::new(-w[1], w[0]);
    dc /= inorm(&dc);
    CurvatureData { a, c, dir_a: [da[0], da[1]], dir_c: [dc[0], dc[1]], umbilic }
}

/// Generalized cross product in `R⁴`: the vector `n` with `n·w = det[a, b, c, w]`.
pub fn cross4(a: &Coords, b: &Coords, c: &Coords) -> Coords {
    let mut n = Coords::zeros(4);
    for k in 0..4 {
        let mut m = Matrix4::zeros();
        for r in 0..4 {
            m[(r, 0)] = a[r];
            m[(r, 1)] = b[r];
            m[(r, 2)] = c[r];
        }
        m[(k, 3)] = 1.0;
        n[k] = m.determinant();
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross4_is_orthogonal() {
        let a = Coords::from_vec(vec![1.0, 2.0, 0.5, -1.0]);
        let b = Coords::from_vec(vec![0.0, 1.0, 3.0, 2.0]);
        let c = Coords::from_vec(vec![-1.0, 0.0, 1.0, 1.0]);
        let n = cross4(&a, &b, &c);
        for w in [&a, &b, &c] {
            assert!(n.dot(w).abs() < 1e-12);
        }
        assert!(n.norm() > 1.0);
    }

    #[test]
    fn principal_of_diagonal_forms() {
        let d = principal(&Matrix2::new(4.0, 0.0, 0.0, 1.0), &Matrix2::new(-2.0, 0.0, 0.0, 0.0), UMBILIC);
        assert!((d.a + 0.5).abs() < 1e-15 && d.c.abs() < 1e-15);
        assert!((d.dir_a[0] - 0.5).abs() < 1e-15 && d.dir_a[1].abs() < 1e-15);
        assert!(d.dir_c[0].abs() < 1e-15 && (d.dir_c[1] - 1.0).abs() < 1e-15);
        assert!(!d.umbilic);
        let u = principal(&Matrix2::identity(), &(Matrix2::identity() * 3.0), UMBILIC);
        assert!(u.umbilic);
    }
}
