//! Points of projective space over one of the signature spaces.

use crate::error::{Error, Result};
use crate::linalg::metric::{BasisTag, Coords, Metric, Vector};

/// A line through the origin, stored by a representative whose
/// largest-magnitude coordinate is `+1` (ties go to the lowest index).
#[derive(Clone, Debug)]
pub struct ProjectivePoint {
    rep: Vector,
}

fn normalize(c: &Coords) -> Option<Coords> {
    let mut best = 0;
    for i in 1..c.len() {
        if c[i].abs() > c[best].abs() {
            best = i;
        }
    }
    let m = c[best];
    if m == 0.0 || !m.is_finite() {
        return None;
    }
    Some(c / m)
}

impl ProjectivePoint {
    pub fn new(v: Vector) -> Result<Self> {
        let c = normalize(v.coords()).ok_or_else(|| Error::Invalid("zero vector has no projective class".into()))?;
        Ok(Self { rep: Vector::new(c, v.metric())? })
    }

    pub fn from_coords(c: Coords, metric: Metric) -> Result<Self> {
        Self::new(Vector::new(c, metric)?)
    }

    pub fn rep(&self) -> &Vector {
        &self.rep
    }

    pub fn coords(&self) -> &Coords {
        self.rep.coords()
    }

    pub fn metric(&self) -> Metric {
        self.rep.metric()
    }

    /// Null-cone residual of the normalized representative.
    pub fn null_residual(&self) -> f64 {
        self.rep.norm2().abs()
    }

    pub fn to_basis(&self, tag: BasisTag) -> Result<Self> {
        Self::new(self.rep.to_basis(tag)?)
    }

    /// Max-abs distance between normalized representatives, compared in the
    /// `ε` basis.
    pub fn distance(&self, other: &ProjectivePoint) -> Result<f64> {
        if self.metric().space() != other.metric().space() {
            return Err(Error::MetricMismatch);
        }
        let a = normalize(self.rep.to_eps().coords()).expect("nonzero");
        let b = normalize(other.rep.to_eps().coords()).expect("nonzero");
        Ok((a - b).amax())
    }

    pub fn approx_eq(&self, other: &ProjectivePoint, tol: f64) -> bool {
        self.distance(other).map(|d| d <= tol).unwrap_or(false)
    }
}

impl PartialEq for ProjectivePoint {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, 1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::metric::Metric;

    #[test]
    fn proportional_vectors_are_equal() {
        let m = Metric::conformal();
        let a = ProjectivePoint::from_coords(Coords::from_vec(vec![1.0, 2.0, 0.0, 0.0, -3.0]), m).unwrap();
        let b = ProjectivePoint::from_coords(Coords::from_vec(vec![-2.0, -4.0, 0.0, 0.0, 6.0]), m).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.coords()[4], 1.0);
    }

    #[test]
    fn ties_pick_the_lowest_index() {
        let p = ProjectivePoint::from_coords(Coords::from_vec(vec![-2.0, 2.0, 0.0, 0.0, 0.0]), Metric::conformal()).unwrap();
        assert_eq!(p.coords()[0], 1.0);
        assert_eq!(p.coords()[1], -1.0);
    }

    #[test]
    fn zero_is_rejected() {
        assert!(ProjectivePoint::from_coords(Coords::zeros(5), Metric::conformal()).is_err());
    }

    #[test]
    fn comparison_across_bases() {
        let e = ProjectivePoint::from_coords(Coords::from_vec(vec![1.0, 0.0, 0.0, 0.0, 1.0]), Metric::conformal()).unwrap();
        let d = ProjectivePoint::from_coords(Coords::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0]), Metric::moebius()).unwrap();
        assert_eq!(e, d);
        assert!(e.null_residual() < 1e-15);
    }
}
