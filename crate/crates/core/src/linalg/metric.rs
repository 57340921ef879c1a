//! Signature spaces, their bases, and vectors carrying a metric.
//!
//! Coordinates are always ordered by the `ε` index range of the space:
//!
//! | space     | ε indices | signature |
//! |-----------|-----------|-----------|
//! | `R3`      | 1..=3     | `+++`     |
//! | `R4`      | 0..=3     | `++++`    |
//! | `R31`     | 1..=4     | `+++-`    |
//! | `R41`     | 0..=4     | `++++-`   |
//! | `R42`     | 0..=5     | `++++--`  |
//!
//! `R41` additionally carries the null basis `δ` and `R42` the null basis `λ`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;
pub type Coords = DVector<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    R3,
    R4,
    R31,
    R41,
    R42,
}

impl Space {
    pub fn dimension(self) -> usize {
        match self {
            Space::R3 => 3,
            Space::R4 | Space::R31 => 4,
            Space::R41 => 5,
            Space::R42 => 6,
        }
    }

    /// The paper-style index of the first `ε` coordinate.
    pub fn first_index(self) -> usize {
        match self {
            Space::R3 | Space::R31 => 1,
            _ => 0,
        }
    }

    /// Slot of `ε_index` in the coordinate vector.
    pub fn slot(self, index: usize) -> Result<usize> {
        let lo = self.first_index();
        if index < lo || index >= lo + self.dimension() {
            return Err(Error::OutOfRange(format!("ε_{index} is not a basis vector of {self}")));
        }
        Ok(index - lo)
    }

    pub fn signs(self) -> Vec<f64> {
        match self {
            Space::R3 => vec![1.0; 3],
            Space::R4 => vec![1.0; 4],
            Space::R31 => vec![1.0, 1.0, 1.0, -1.0],
            Space::R41 => vec![1.0, 1.0, 1.0, 1.0, -1.0],
            Space::R42 => vec![1.0, 1.0, 1.0, 1.0, -1.0, -1.0],
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Space::R3 => "R^3",
            Space::R4 => "R^4",
            Space::R31 => "R^{3,1}",
            Space::R41 => "R^{4,1}",
            Space::R42 => "R^{4,2}",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisTag {
    Epsilon,
    Delta,
    Lambda,
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisTag::Epsilon => "epsilon",
            BasisTag::Delta => "delta",
            BasisTag::Lambda => "lambda",
        })
    }
}

/// A nondegenerate symmetric bilinear form on one of the signature spaces,
/// expressed in one of its bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Metric {
    space: Space,
    basis: BasisTag,
}

impl Metric {
    pub fn new(space: Space, basis: BasisTag) -> Result<Self> {
        let ok = match basis {
            BasisTag::Epsilon => true,
            BasisTag::Delta => space == Space::R41,
            BasisTag::Lambda => space == Space::R42,
        };
        if !ok {
            return Err(Error::UndefinedBasis { tag: basis.to_string(), space: space.to_string() });
        }
        Ok(Self { space, basis })
    }

    pub const fn euclidean3() -> Self {
        Self { space: Space::R3, basis: BasisTag::Epsilon }
    }

    pub const fn euclidean4() -> Self {
        Self { space: Space::R4, basis: BasisTag::Epsilon }
    }

    pub const fn minkowski() -> Self {
        Self { space: Space::R31, basis: BasisTag::Epsilon }
    }

    /// `R^{4,1}` in the `ε` basis.
    pub const fn conformal() -> Self {
        Self { space: Space::R41, basis: BasisTag::Epsilon }
    }

    /// `R^{4,1}` in the Möbius frame basis `δ`, gram `g`.
    pub const fn moebius() -> Self {
        Self { space: Space::R41, basis: BasisTag::Delta }
    }

    /// `R^{4,2}` in the `ε` basis.
    pub const fn lie_eps() -> Self {
        Self { space: Space::R42, basis: BasisTag::Epsilon }
    }

    /// `R^{4,2}` in the Lie frame basis `λ`, gram `ĝ`.
    pub const fn lie() -> Self {
        Self { space: Space::R42, basis: BasisTag::Lambda }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn basis_tag(&self) -> BasisTag {
        self.basis
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension()
    }

    pub fn with_basis(&self, basis: BasisTag) -> Result<Self> {
        Metric::new(self.space, basis)
    }

    /// Columns are the basis vectors of `self.basis` in `ε` coordinates.
    pub fn change_matrix(&self) -> Mat {
        let n = self.dimension();
        let r = FRAC_1_SQRT_2;
        match self.basis {
            BasisTag::Epsilon => Mat::identity(n, n),
            BasisTag::Delta => {
                // δ0 = (ε4 + ε0)/√2, δi = εi, δ4 = (ε4 − ε0)/√2
                let mut p = Mat::zeros(5, 5);
                p[(0, 0)] = r;
                p[(4, 0)] = r;
                for i in 1..4 {
                    p[(i, i)] = 1.0;
                }
                p[(0, 4)] = -r;
                p[(4, 4)] = r;
                p
            }
            BasisTag::Lambda => {
                // λ0 = (ε5+ε0)/√2, λ1 = (ε4+ε1)/√2, λ2 = ε2, λ3 = ε3,
                // λ4 = (ε4−ε1)/√2, λ5 = (ε5−ε0)/√2
                let mut p = Mat::zeros(6, 6);
                p[(0, 0)] = r;
                p[(5, 0)] = r;
                p[(1, 1)] = r;
                p[(4, 1)] = r;
                p[(2, 2)] = 1.0;
                p[(3, 3)] = 1.0;
                p[(1, 4)] = -r;
                p[(4, 4)] = r;
                p[(0, 5)] = -r;
                p[(5, 5)] = r;
                p
            }
        }
    }

    pub fn gram(&self) -> Mat {
        let eps = Mat::from_diagonal(&Coords::from_vec(self.space.signs()));
        let p = self.change_matrix();
        let mut g = p.transpose() * eps * &p;
        // the change matrices have entries 0, 1, 1/√2: snap the products back to exact values
        g.iter_mut().for_each(|x| *x = x.round());
        g
    }

    /// Number of positive and negative directions.
    pub fn signature(&self) -> (usize, usize) {
        let s = self.space.signs();
        let neg = s.iter().filter(|&&x| x < 0.0).count();
        (s.len() - neg, neg)
    }

    pub fn inner_coords(&self, u: &Coords, v: &Coords) -> f64 {
        (u.transpose() * self.gram() * v)[(0, 0)]
    }
}

/// Coordinates of a vector together with the metric/basis they refer to.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    coords: Coords,
    metric: Metric,
}

impl Vector {
    pub fn new(coords: Coords, metric: Metric) -> Result<Self> {
        if coords.len() != metric.dimension() {
            return Err(Error::DimensionMismatch { expected: metric.dimension(), got: coords.len() });
        }
        Ok(Self { coords, metric })
    }

    pub fn from_slice(values: &[f64], metric: Metric) -> Result<Self> {
        Self::new(Coords::from_column_slice(values), metric)
    }

    /// The basis vector `ε_index` of `space`, in `ε` coordinates.
    pub fn eps(space: Space, index: usize) -> Result<Self> {
        let slot = space.slot(index)?;
        let mut c = Coords::zeros(space.dimension());
        c[slot] = 1.0;
        Ok(Self { coords: c, metric: Metric::new(space, BasisTag::Epsilon)? })
    }

    pub fn coords(&self) -> &Coords {
        &self.coords
    }

    pub fn into_coords(self) -> Coords {
        self.coords
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn inner(&self, other: &Vector) -> Result<f64> {
        inner(self, other, &self.metric)
    }

    pub fn norm2(&self) -> f64 {
        self.metric.inner_coords(&self.coords, &self.coords)
    }

    pub fn to_basis(&self, tag: BasisTag) -> Result<Vector> {
        let target = self.metric.with_basis(tag)?;
        let coords = change_basis_coords(&self.coords, self.metric, target)?;
        Ok(Vector { coords, metric: target })
    }

    pub fn to_eps(&self) -> Vector {
        self.to_basis(BasisTag::Epsilon).expect("epsilon basis always exists")
    }

    pub fn scaled(&self, s: f64) -> Vector {
        Vector { coords: &self.coords * s, metric: self.metric }
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        if self.metric != other.metric {
            return Err(Error::MetricMismatch);
        }
        Ok(Vector { coords: &self.coords + &other.coords, metric: self.metric })
    }
}

/// `uᵀ·gram·v`.
pub fn inner(u: &Vector, v: &Vector, m: &Metric) -> Result<f64> {
    for w in [u, v] {
        if w.coords.len() != m.dimension() {
            return Err(Error::DimensionMismatch { expected: m.dimension(), got: w.coords.len() });
        }
        if w.metric != *m {
            return Err(Error::MetricMismatch);
        }
    }
    Ok(m.inner_coords(&u.coords, &v.coords))
}

fn check_same_space(from: Metric, to: Metric) -> Result<()> {
    if from.space() != to.space() {
        return Err(Error::MetricMismatch);
    }
    Ok(())
}

pub fn change_basis_coords(x: &Coords, from: Metric, to: Metric) -> Result<Coords> {
    check_same_space(from, to)?;
    if x.len() != from.dimension() {
        return Err(Error::DimensionMismatch { expected: from.dimension(), got: x.len() });
    }
    if from == to {
        return Ok(x.clone());
    }
    let eps = from.change_matrix() * x;
    // change matrices are orthogonal in the Euclidean sense, so the inverse is the transpose
    Ok(to.change_matrix().transpose() * eps)
}

/// Re-express a linear map given in the `from` basis in the `to` basis.
pub fn change_basis_matrix(m: &Mat, from: Metric, to: Metric) -> Result<Mat> {
    check_same_space(from, to)?;
    let n = from.dimension();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.nrows() });
    }
    if from == to {
        return Ok(m.clone());
    }
    let a = from.change_matrix();
    let b = to.change_matrix();
    // x_to = Bᵀ A x_from
    let t = b.transpose() * a;
    Ok(&t * m * t.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grams_have_the_declared_blocks() {
        let g = Metric::moebius().gram();
        assert_eq!(g[(0, 4)], -1.0);
        assert_eq!(g[(0, 0)], 0.0);
        assert_eq!(g[(2, 2)], 1.0);
        let gh = Metric::lie().gram();
        assert_eq!(gh[(0, 5)], -1.0);
        assert_eq!(gh[(1, 4)], -1.0);
        assert_eq!(gh[(5, 0)], -1.0);
        assert_eq!(gh[(3, 3)], 1.0);
        assert_eq!(gh[(0, 0)], 0.0);
        assert_eq!(Metric::lie().signature(), (4, 2));
        assert_eq!(Metric::minkowski().signature(), (3, 1));
    }

    #[test]
    fn basis_vector_inner_products() {
        let e0 = Vector::eps(Space::R42, 0).unwrap();
        let e5 = Vector::eps(Space::R42, 5).unwrap();
        assert_eq!(e0.inner(&e0).unwrap(), 1.0);
        assert_eq!(e5.inner(&e5).unwrap(), -1.0);
        let r = FRAC_1_SQRT_2;
        let l0 = e5.add(&e0).unwrap().scaled(r);
        let l5 = e5.add(&e0.scaled(-1.0)).unwrap().scaled(r);
        assert_abs_diff_eq!(l0.inner(&l5).unwrap(), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let a = Vector::eps(Space::R41, 0).unwrap();
        let b = Vector::eps(Space::R42, 0).unwrap();
        assert!(inner(&a, &b, &Metric::conformal()).is_err());
        assert!(Vector::from_slice(&[1.0, 2.0], Metric::conformal()).is_err());
    }

    #[test]
    fn delta_and_lambda_coordinates() {
        let v = Vector::from_slice(&[1.0, 0.0, 0.0, 0.0, 1.0], Metric::conformal()).unwrap();
        let d = v.to_basis(BasisTag::Delta).unwrap();
        assert_abs_diff_eq!(d.coords()[0], 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(d.coords().rows(1, 4).norm(), 0.0, epsilon = 1e-15);

        let w = Vector::from_slice(&[1.0, 0.0, 0.0, 0.0, 0.0, 1.0], Metric::lie_eps()).unwrap();
        let l = w.to_basis(BasisTag::Lambda).unwrap();
        assert_abs_diff_eq!(l.coords()[0], 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(l.coords().rows(1, 5).norm(), 0.0, epsilon = 1e-15);

        assert_eq!(v.to_basis(BasisTag::Epsilon).unwrap(), v);
        assert!(v.to_basis(BasisTag::Lambda).is_err());
    }

    #[test]
    fn change_of_basis_matrices_preserve_the_form() {
        let g_eps = Metric::lie_eps().gram();
        let g_lam = change_basis_matrix(&g_eps, Metric::lie_eps(), Metric::lie()).unwrap();
        // a bilinear form transforms as Pᵀ G P, a map as P⁻¹ M P; P is orthogonal
        let p = Metric::lie().change_matrix();
        assert_abs_diff_eq!(p.transpose() * g_eps * &p, Metric::lie().gram(), epsilon = 1e-15);
        assert_eq!(g_lam.nrows(), 6);
    }
}
