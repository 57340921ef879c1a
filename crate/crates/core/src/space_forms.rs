//! The three space forms, the conformal maps between them and their
//! embeddings into Möbius space.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{change_basis_matrix, group_residual, BasisTag, Coords, GroupElement, Mat, Metric, ProjectivePoint, Vector};
use crate::tolerances::{MEMBERSHIP, POLE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceForm {
    Euclidean,
    Sphere,
    Hyperbolic,
}

impl SpaceForm {
    /// Ambient space: `R³`, `R⁴` or `R^{3,1}`.
    pub fn ambient(self) -> Metric {
        match self {
            SpaceForm::Euclidean => Metric::euclidean3(),
            SpaceForm::Sphere => Metric::euclidean4(),
            SpaceForm::Hyperbolic => Metric::minkowski(),
        }
    }

    /// How far `x` is from the model's constraint set.
    pub fn constraint_residual(self, x: &Coords) -> f64 {
        match self {
            SpaceForm::Euclidean => 0.0,
            SpaceForm::Sphere => (x.norm_squared() - 1.0).abs(),
            SpaceForm::Hyperbolic => {
                let r = (self.ambient().inner_coords(x, x) + 1.0).abs();
                if x[3] < 1.0 - 1e-12 {
                    r.max(1.0 - x[3])
                } else {
                    r
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpaceFormPoint {
    form: SpaceForm,
    coords: Vector,
}

impl SpaceFormPoint {
    pub fn new(form: SpaceForm, coords: &[f64]) -> Result<Self> {
        let v = Vector::from_slice(coords, form.ambient())?;
        let r = form.constraint_residual(v.coords());
        if r > 1e-10 * (1.0 + v.coords().amax()) {
            return Err(Error::OutOfRange(format!("point is off the {form:?} model (residual {r:.3e})")));
        }
        Ok(Self { form, coords: v })
    }

    pub fn form(&self) -> SpaceForm {
        self.form
    }

    pub fn coords(&self) -> &Coords {
        self.coords.coords()
    }

    pub fn vector(&self) -> &Vector {
        &self.coords
    }
}

fn need(p: &SpaceFormPoint, form: SpaceForm) -> Result<()> {
    if p.form != form {
        return Err(Error::Invalid(format!("expected a {form:?} point, got {:?}", p.form)));
    }
    Ok(())
}

/// `x̄/(1+x⁰)` on raw `R⁴` coordinates.
pub fn stereo_coords(x: &Coords) -> Result<Coords> {
    let d = 1.0 + x[0];
    if d.abs() < POLE {
        return Err(Error::Pole);
    }
    Ok(Coords::from_vec(vec![x[1] / d, x[2] / d, x[3] / d]))
}

pub fn stereo_inv_coords(y: &Coords) -> Coords {
    let s = y.norm_squared();
    let d = 1.0 + s;
    Coords::from_vec(vec![(1.0 - s) / d, 2.0 * y[0] / d, 2.0 * y[1] / d, 2.0 * y[2] / d])
}

/// `x̄/(1+x⁴)` on raw `R^{3,1}` coordinates.
pub fn hyp_stereo_coords(x: &Coords) -> Coords {
    let d = 1.0 + x[3];
    Coords::from_vec(vec![x[0] / d, x[1] / d, x[2] / d])
}

pub fn hyp_stereo_inv_coords(y: &Coords) -> Result<Coords> {
    let s = y.norm_squared();
    if s >= 1.0 {
        return Err(Error::Domain(format!("|y| = {} is outside the unit ball", s.sqrt())));
    }
    let d = 1.0 - s;
    Ok(Coords::from_vec(vec![2.0 * y[0] / d, 2.0 * y[1] / d, 2.0 * y[2] / d, (1.0 + s) / d]))
}

pub fn stereo(x: &SpaceFormPoint) -> Result<SpaceFormPoint> {
    need(x, SpaceForm::Sphere)?;
    let y = stereo_coords(x.coords())?;
    Ok(SpaceFormPoint { form: SpaceForm::Euclidean, coords: Vector::new(y, Metric::euclidean3())? })
}

pub fn stereo_inv(y: &SpaceFormPoint) -> Result<SpaceFormPoint> {
    need(y, SpaceForm::Euclidean)?;
    let x = stereo_inv_coords(y.coords());
    Ok(SpaceFormPoint { form: SpaceForm::Sphere, coords: Vector::new(x, Metric::euclidean4())? })
}

pub fn hyp_stereo(x: &SpaceFormPoint) -> Result<SpaceFormPoint> {
    need(x, SpaceForm::Hyperbolic)?;
    let y = hyp_stereo_coords(x.coords());
    Ok(SpaceFormPoint { form: SpaceForm::Euclidean, coords: Vector::new(y, Metric::euclidean3())? })
}

pub fn hyp_stereo_inv(y: &SpaceFormPoint) -> Result<SpaceFormPoint> {
    need(y, SpaceForm::Euclidean)?;
    let x = hyp_stereo_inv_coords(y.coords())?;
    Ok(SpaceFormPoint { form: SpaceForm::Hyperbolic, coords: Vector::new(x, Metric::minkowski())? })
}

/// Conformal factor `2/(1−|y|²)` of the Poincaré ball.
pub fn poincare_factor(y: &SpaceFormPoint) -> Result<f64> {
    need(y, SpaceForm::Euclidean)?;
    let s = y.coords().norm_squared();
    if s >= 1.0 {
        return Err(Error::Domain(format!("|y| = {} is outside the unit ball", s.sqrt())));
    }
    Ok(2.0 / (1.0 - s))
}

/// Null lift in `R^{4,1}` (`ε` coordinates), unnormalized.
///
/// Sphere: `x + ε₄`. Euclidean: `S⁻¹(y) + ε₄`. Hyperbolic: `x + ε₀`, which is
/// the composite through the ball up to a positive factor.
pub fn moebius_lift(form: SpaceForm, x: &Coords) -> Coords {
    let mut q = Coords::zeros(5);
    match form {
        SpaceForm::Sphere => {
            q.rows_mut(0, 4).copy_from(x);
            q[4] = 1.0;
        }
        SpaceForm::Euclidean => {
            q.rows_mut(0, 4).copy_from(&stereo_inv_coords(x));
            q[4] = 1.0;
        }
        SpaceForm::Hyperbolic => {
            q.rows_mut(1, 4).copy_from(x);
            q[0] = 1.0;
        }
    }
    q
}

/// The embeddings `f₊`, `f₀`, `f₋` into Möbius space, as points in the `δ` basis.
///
/// `f₋` is evaluated literally as `f₀ ∘ 𝔰`.
pub fn embed_moebius(p: &SpaceFormPoint) -> Result<ProjectivePoint> {
    let q = match p.form {
        SpaceForm::Hyperbolic => moebius_lift(SpaceForm::Euclidean, &hyp_stereo_coords(p.coords())),
        f => moebius_lift(f, p.coords()),
    };
    ProjectivePoint::new(Vector::new(q, Metric::conformal())?)?.to_basis(BasisTag::Delta)
}

/// Inverse charts `f₊⁻¹`, `f₀⁻¹`, `f₋⁻¹` on a representative in `ε` coordinates.
pub fn chart_inverse(form: SpaceForm, q_eps: &Coords) -> Result<Coords> {
    let scale = q_eps.amax().max(1e-300);
    match form {
        SpaceForm::Sphere => {
            if q_eps[4].abs() < 1e-12 * scale {
                return Err(Error::Domain("point is not in the image of the sphere chart".into()));
            }
            Ok(q_eps.rows(0, 4) / q_eps[4])
        }
        SpaceForm::Euclidean => {
            // δ₀ coefficient is (q⁰+q⁴)/√2, and f₀(y) ∝ δ₀ + √2 y + |y|² δ₄
            let d0 = (q_eps[0] + q_eps[4]) / SQRT_2;
            if d0.abs() < 1e-12 * scale {
                return Err(Error::Pole);
            }
            Ok(q_eps.rows(1, 3) / (SQRT_2 * d0))
        }
        SpaceForm::Hyperbolic => {
            if q_eps[0].abs() < 1e-12 * scale {
                return Err(Error::Domain("point is on the ideal boundary of the hyperbolic chart".into()));
            }
            let x = q_eps.rows(1, 4) / q_eps[0];
            if x[3] <= 0.0 {
                return Err(Error::Domain("point lies on the other sheet of the hyperboloid".into()));
            }
            Ok(x.into_owned())
        }
    }
}

/// Isometries of the three space forms as 4×4 matrices.
#[derive(Clone, Debug)]
pub enum SpaceFormIsometry {
    /// `A ∈ SO(4)` acting on `R⁴`.
    Sphere(Mat),
    /// `(y, A) = [[1, 0], [y, A]]` acting on `R³`.
    Euclidean(Mat),
    /// `B ∈ SO(3,1)` acting on `R^{3,1}`.
    Hyperbolic(Mat),
}

impl SpaceFormIsometry {
    pub fn residual(&self) -> f64 {
        match self {
            SpaceFormIsometry::Sphere(a) => group_residual(a, &Metric::euclidean4()),
            SpaceFormIsometry::Hyperbolic(b) => group_residual(b, &Metric::minkowski()),
            SpaceFormIsometry::Euclidean(m) => euclidean_residual(m),
        }
    }

    pub fn form(&self) -> SpaceForm {
        match self {
            SpaceFormIsometry::Sphere(_) => SpaceForm::Sphere,
            SpaceFormIsometry::Euclidean(_) => SpaceForm::Euclidean,
            SpaceFormIsometry::Hyperbolic(_) => SpaceForm::Hyperbolic,
        }
    }

    pub fn apply(&self, x: &Coords) -> Coords {
        match self {
            SpaceFormIsometry::Sphere(a) | SpaceFormIsometry::Hyperbolic(a) => a * x,
            SpaceFormIsometry::Euclidean(m) => m.view((1, 0), (3, 1)).column(0) + m.view((1, 1), (3, 3)) * x,
        }
    }
}

/// Membership residual of a 4×4 matrix in `E(3)`.
pub fn euclidean_residual(m: &Mat) -> f64 {
    if m.nrows() != 4 || m.ncols() != 4 {
        return f64::INFINITY;
    }
    let a = m.view((1, 1), (3, 3)).into_owned();
    let mut r = group_residual(&a, &Metric::euclidean3());
    r = r.max((m[(0, 0)] - 1.0).abs());
    for j in 1..4 {
        r = r.max(m[(0, j)].abs());
    }
    r
}

/// The conformal translation by `y` in the `δ` basis.
pub fn moebius_translation(y: &Coords) -> Mat {
    let mut t = Mat::identity(5, 5);
    for i in 0..3 {
        t[(1 + i, 0)] = SQRT_2 * y[i];
        t[(4, 1 + i)] = SQRT_2 * y[i];
    }
    t[(4, 0)] = y.norm_squared();
    t
}

/// `F₊`, `F₀`, `F₋`: the Möbius transformation (δ basis) induced by an isometry.
pub fn group_embed(g: &SpaceFormIsometry) -> Result<GroupElement> {
    let r = g.residual();
    if !(r <= MEMBERSHIP) {
        return Err(Error::NotInGroup { residual: r });
    }
    let mut eps = Mat::identity(5, 5);
    let m = match g {
        SpaceFormIsometry::Sphere(a) => {
            eps.view_mut((0, 0), (4, 4)).copy_from(a);
            change_basis_matrix(&eps, Metric::conformal(), Metric::moebius())?
        }
        SpaceFormIsometry::Hyperbolic(b) => {
            eps.view_mut((1, 1), (4, 4)).copy_from(b);
            change_basis_matrix(&eps, Metric::conformal(), Metric::moebius())?
        }
        SpaceFormIsometry::Euclidean(m) => {
            // rotations fix ε₀ and ε₄, hence δ₀ and δ₄
            let mut rot = Mat::identity(5, 5);
            rot.view_mut((1, 1), (3, 3)).copy_from(&m.view((1, 1), (3, 3)));
            let y = m.view((1, 0), (3, 1)).column(0).into_owned();
            moebius_translation(&y) * rot
        }
    };
    GroupElement::new(m, Metric::moebius())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pt(form: SpaceForm, c: &[f64]) -> SpaceFormPoint {
        SpaceFormPoint::new(form, c).unwrap()
    }

    #[test]
    fn stereo_examples() {
        let o = stereo(&pt(SpaceForm::Sphere, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(o.coords().as_slice(), &[0.0, 0.0, 0.0]);
        let e1 = stereo(&pt(SpaceForm::Sphere, &[0.0, 1.0, 0.0, 0.0])).unwrap();
        assert_eq!(e1.coords().as_slice(), &[1.0, 0.0, 0.0]);
        let back = stereo_inv(&pt(SpaceForm::Euclidean, &[0.0, 0.0, 0.0])).unwrap();
        assert_eq!(back.coords().as_slice(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(stereo(&pt(SpaceForm::Sphere, &[-1.0, 0.0, 0.0, 0.0])), Err(Error::Pole));
    }

    #[test]
    fn hyp_stereo_examples() {
        let o = hyp_stereo(&pt(SpaceForm::Hyperbolic, &[0.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(o.coords().as_slice(), &[0.0, 0.0, 0.0]);
        let tau: f64 = 1.3;
        let y = hyp_stereo(&pt(SpaceForm::Hyperbolic, &[tau.sinh(), 0.0, 0.0, tau.cosh()])).unwrap();
        assert_abs_diff_eq!(y.coords()[0], (tau / 2.0).tanh(), epsilon = 1e-15);
        let b = hyp_stereo_inv(&pt(SpaceForm::Euclidean, &[0.0, 0.0, 0.0])).unwrap();
        assert_eq!(b.coords().as_slice(), &[0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(hyp_stereo_inv(&pt(SpaceForm::Euclidean, &[1.0, 0.0, 0.0])), Err(Error::Domain(_))));
    }

    #[test]
    fn poincare_examples() {
        assert_eq!(poincare_factor(&pt(SpaceForm::Euclidean, &[0.0, 0.0, 0.0])).unwrap(), 2.0);
        assert_abs_diff_eq!(poincare_factor(&pt(SpaceForm::Euclidean, &[0.0, 0.5, 0.0])).unwrap(), 8.0 / 3.0, epsilon = 1e-15);
        assert!(poincare_factor(&pt(SpaceForm::Euclidean, &[0.0, 0.9999, 0.0])).unwrap() > 1e4);
        assert!(poincare_factor(&pt(SpaceForm::Euclidean, &[0.0, 1.0, 0.0])).is_err());
    }

    #[test]
    fn embedding_examples() {
        let delta0 = ProjectivePoint::from_coords(Coords::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0]), Metric::moebius()).unwrap();
        assert_eq!(embed_moebius(&pt(SpaceForm::Sphere, &[1.0, 0.0, 0.0, 0.0])).unwrap(), delta0);
        assert_eq!(embed_moebius(&pt(SpaceForm::Euclidean, &[0.0, 0.0, 0.0])).unwrap(), delta0);
        let x = pt(SpaceForm::Hyperbolic, &[0.3, -0.2, 0.5, (1.0f64 + 0.09 + 0.04 + 0.25).sqrt()]);
        let direct = ProjectivePoint::from_coords(moebius_lift(SpaceForm::Hyperbolic, x.coords()), Metric::conformal()).unwrap();
        assert!(embed_moebius(&x).unwrap().approx_eq(&direct, 1e-14));
    }

    #[test]
    fn translation_in_delta_basis() {
        let y = Coords::from_vec(vec![0.4, -1.0, 2.0]);
        let mut e = Mat::identity(4, 4);
        e.view_mut((1, 0), (3, 1)).copy_from(&y);
        let f = group_embed(&SpaceFormIsometry::Euclidean(e)).unwrap();
        let m = f.mat();
        assert_abs_diff_eq!(m[(4, 0)], y.norm_squared(), epsilon = 1e-15);
        assert_abs_diff_eq!(m[(2, 0)], -SQRT_2, epsilon = 1e-15);
        assert_eq!(m[(0, 4)], 0.0);
        assert!(f.residual() < 1e-13);
    }

    #[test]
    fn identity_embeds_to_identity() {
        for g in [
            SpaceFormIsometry::Sphere(Mat::identity(4, 4)),
            SpaceFormIsometry::Euclidean(Mat::identity(4, 4)),
            SpaceFormIsometry::Hyperbolic(Mat::identity(4, 4)),
        ] {
            assert_abs_diff_eq!(group_embed(&g).unwrap().into_mat(), Mat::identity(5, 5), epsilon = 1e-15);
        }
    }

    #[test]
    fn bad_isometry_is_rejected() {
        let mut a = Mat::identity(4, 4);
        a[(0, 1)] = 0.5;
        assert!(matches!(group_embed(&SpaceFormIsometry::Sphere(a)), Err(Error::NotInGroup { .. })));
    }

    #[test]
    fn chart_inverses_undo_the_lifts() {
        let x = Coords::from_vec(vec![0.5, 0.5, 0.5, 0.5]);
        assert_abs_diff_eq!(chart_inverse(SpaceForm::Sphere, &(moebius_lift(SpaceForm::Sphere, &x) * 3.0)).unwrap(), x, epsilon = 1e-15);
        let y = Coords::from_vec(vec![1.0, -2.0, 0.25]);
        assert_abs_diff_eq!(chart_inverse(SpaceForm::Euclidean, &(moebius_lift(SpaceForm::Euclidean, &y) * -2.0)).unwrap(), y, epsilon = 1e-14);
        let h = hyp_stereo_inv_coords(&Coords::from_vec(vec![0.1, 0.2, -0.3])).unwrap();
        assert_abs_diff_eq!(chart_inverse(SpaceForm::Hyperbolic, &moebius_lift(SpaceForm::Hyperbolic, &h)).unwrap(), h, epsilon = 1e-15);
        let mut other_sheet = moebius_lift(SpaceForm::Hyperbolic, &h);
        other_sheet[0] = -1.0;
        assert!(chart_inverse(SpaceForm::Hyperbolic, &other_sheet).is_err());
    }
}
