//! Membership in the isometry group of a metric and in its Lie algebra.

use crate::error::{Error, Result};
use crate::linalg::expm::expm;
use crate::linalg::metric::{Mat, Metric};
use crate::tolerances::MEMBERSHIP;

fn check_square(t: &Mat, m: &Metric) -> Result<()> {
    let n = m.dimension();
    if t.nrows() != n || t.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: t.nrows().max(t.ncols()) });
    }
    Ok(())
}

/// max |Tᵀ G T − G|
pub fn group_residual(t: &Mat, m: &Metric) -> f64 {
    let g = m.gram();
    (t.transpose() * &g * t - g).amax()
}

/// max |Xᵀ G + G X|
pub fn algebra_residual(x: &Mat, m: &Metric) -> f64 {
    let g = m.gram();
    (x.transpose() * &g + &g * x).amax()
}

/// Nearest algebra element in the sense `X ↦ (X − G⁻¹XᵀG)/2`.
pub fn project_to_algebra(x: &Mat, m: &Metric) -> Mat {
    let g = m.gram();
    // every gram used here is its own inverse
    let adj = &g * x.transpose() * &g;
    (x - adj) * 0.5
}

/// `G⁻¹TᵀG`, the inverse of a group element.
pub fn group_inverse(t: &Mat, m: &Metric) -> Mat {
    let g = m.gram();
    &g * t.transpose() * &g
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    mat: Mat,
    metric: Metric,
    residual: f64,
}

impl GroupElement {
    pub fn new(mat: Mat, metric: Metric) -> Result<Self> {
        Self::with_tolerance(mat, metric, MEMBERSHIP)
    }

    pub fn with_tolerance(mat: Mat, metric: Metric, tol: f64) -> Result<Self> {
        check_square(&mat, &metric)?;
        let residual = group_residual(&mat, &metric);
        if !(residual <= tol) {
            return Err(Error::NotInGroup { residual });
        }
        Ok(Self { mat, metric, residual })
    }

    pub fn identity(metric: Metric) -> Self {
        let n = metric.dimension();
        Self { mat: Mat::identity(n, n), metric, residual: 0.0 }
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn into_mat(self) -> Mat {
        self.mat
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn inverse(&self) -> Self {
        let mat = group_inverse(&self.mat, &self.metric);
        let residual = group_residual(&mat, &self.metric);
        Self { mat, metric: self.metric, residual }
    }

    pub fn compose(&self, other: &GroupElement) -> Result<Self> {
        if self.metric != other.metric {
            return Err(Error::MetricMismatch);
        }
        let mat = &self.mat * &other.mat;
        let residual = group_residual(&mat, &self.metric);
        Ok(Self { mat, metric: self.metric, residual })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    mat: Mat,
    metric: Metric,
    residual: f64,
}

impl AlgebraElement {
    pub fn new(mat: Mat, metric: Metric) -> Result<Self> {
        check_square(&mat, &metric)?;
        let residual = algebra_residual(&mat, &metric);
        if !(residual <= MEMBERSHIP * (1.0 + mat.amax())) {
            return Err(Error::Invalid(format!("not in the Lie algebra (residual {residual:.3e})")));
        }
        Ok(Self { mat, metric, residual })
    }

    pub fn zero(metric: Metric) -> Self {
        let n = metric.dimension();
        Self { mat: Mat::zeros(n, n), metric, residual: 0.0 }
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { mat: &self.mat * s, metric: self.metric, residual: self.residual * s.abs() }
    }

    pub fn bracket(&self, other: &AlgebraElement) -> Mat {
        &self.mat * &other.mat - &other.mat * &self.mat
    }
}

pub fn mat_exp(x: &AlgebraElement) -> GroupElement {
    let mat = expm(x.mat());
    let residual = group_residual(&mat, &x.metric());
    GroupElement { mat, metric: x.metric(), residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn residual_examples() {
        let m = Metric::lie();
        assert_eq!(group_residual(&Mat::identity(6, 6), &m), 0.0);
        let t = 0.8;
        let mut d = Mat::identity(6, 6);
        d[(0, 0)] = f64::exp(t);
        d[(5, 5)] = f64::exp(-t);
        assert!(group_residual(&d, &m) < 1e-15);
        let mut d2 = Mat::identity(6, 6);
        d2[(0, 0)] = 2.0;
        assert_abs_diff_eq!(group_residual(&d2, &m), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn algebra_residual_examples() {
        let m = Metric::euclidean3();
        assert_eq!(algebra_residual(&Mat::zeros(3, 3), &m), 0.0);
        let skew = Mat::from_row_slice(3, 3, &[0.0, 1.0, -2.0, -1.0, 0.0, 3.0, 2.0, -3.0, 0.0]);
        assert_eq!(algebra_residual(&skew, &m), 0.0);
        let sym = Mat::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 2.0, 0.5, 0.0, 0.0, 0.0, -1.5]);
        assert_abs_diff_eq!(algebra_residual(&sym, &m), 2.0 * sym.amax(), epsilon = 1e-15);
    }

    #[test]
    fn projection_lands_in_the_algebra() {
        let m = Metric::moebius();
        let x = Mat::from_fn(5, 5, |i, j| (i as f64 + 1.0) * 0.3 - j as f64 * 0.7 + (i * j) as f64 * 0.1);
        let p = project_to_algebra(&x, &m);
        assert!(algebra_residual(&p, &m) < 1e-14);
        let again = project_to_algebra(&p, &m);
        assert_abs_diff_eq!(again, p, epsilon = 1e-14);
    }

    #[test]
    fn inverse_and_exp() {
        let m = Metric::lie();
        let x = project_to_algebra(&Mat::from_fn(6, 6, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0), &m);
        let e = mat_exp(&AlgebraElement::new(x, m).unwrap());
        assert!(e.residual() < 1e-10);
        let prod = e.compose(&e.inverse()).unwrap();
        assert_abs_diff_eq!(prod.mat().clone(), Mat::identity(6, 6), epsilon = 1e-9);
    }

    #[test]
    fn non_members_are_rejected() {
        let mut d = Mat::identity(5, 5);
        d[(1, 1)] = 2.0;
        assert!(matches!(GroupElement::new(d, Metric::moebius()), Err(Error::NotInGroup { .. })));
        assert!(GroupElement::new(Mat::identity(4, 4), Metric::moebius()).is_err());
    }
}
