//! Rectangular parameter grids and finite differences on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamDomain {
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
    pub nu: usize,
    pub nv: usize,
    pub periodic_u: bool,
    pub periodic_v: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    U,
    V,
}

impl ParamDomain {
    pub fn new(u_range: (f64, f64), v_range: (f64, f64), nu: usize, nv: usize, periodic_u: bool, periodic_v: bool) -> Result<Self> {
        if nu < 3 || nv < 3 {
            return Err(Error::Invalid(format!("grid {nu}x{nv} is too small (need at least 3x3)")));
        }
        let ok = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.1 > r.0;
        if !ok(u_range) || !ok(v_range) {
            return Err(Error::Invalid("parameter ranges must be finite and nondegenerate".into()));
        }
        Ok(Self { u_range, v_range, nu, nv, periodic_u, periodic_v })
    }

    /// Both directions periodic over `[0, 2π)`.
    pub fn torus(nu: usize, nv: usize) -> Result<Self> {
        let tau = std::f64::consts::TAU;
        Self::new((0.0, tau), (0.0, tau), nu, nv, true, true)
    }

    /// A small closed patch `[u0−r, u0+r] × [v0−r, v0+r]`.
    pub fn patch(center: (f64, f64), half_width: f64, n: usize) -> Result<Self> {
        Self::new(
            (center.0 - half_width, center.0 + half_width),
            (center.1 - half_width, center.1 + half_width),
            n,
            n,
            false,
            false,
        )
    }

    pub fn with_resolution(&self, nu: usize, nv: usize) -> Result<Self> {
        Self::new(self.u_range, self.v_range, nu, nv, self.periodic_u, self.periodic_v)
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn step_u(&self) -> f64 {
        let l = self.u_range.1 - self.u_range.0;
        if self.periodic_u {
            l / self.nu as f64
        } else {
            l / (self.nu - 1) as f64
        }
    }

    pub fn step_v(&self) -> f64 {
        let l = self.v_range.1 - self.v_range.0;
        if self.periodic_v {
            l / self.nv as f64
        } else {
            l / (self.nv - 1) as f64
        }
    }

    pub fn u(&self, i: usize) -> f64 {
        self.u_range.0 + i as f64 * self.step_u()
    }

    pub fn v(&self, j: usize) -> f64 {
        self.v_range.0 + j as f64 * self.step_v()
    }

    /// Row-major index: `u` is the slow index.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k / self.nv, k % self.nv)
    }

    pub fn point(&self, k: usize) -> (f64, f64) {
        let (i, j) = self.ij(k);
        (self.u(i), self.v(j))
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        (0..self.nu).flat_map(move |i| (0..self.nv).map(move |j| (i, j, self.u(i), self.v(j))))
    }

    /// Points at least two steps from any non-periodic edge.
    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        let ok_u = self.periodic_u || (i >= 2 && i + 2 < self.nu);
        let ok_v = self.periodic_v || (j >= 2 && j + 2 < self.nv);
        ok_u && ok_v
    }

    /// Partial derivative of gridded data along one axis.
    ///
    /// Fourth-order central differences where the stencil fits (wrapping on
    /// periodic axes), second-order central next to edges and second-order
    /// one-sided on the edges themselves.
    pub fn diff<T: Linear>(&self, data: &[T], axis: Axis) -> Vec<T> {
        assert_eq!(data.len(), self.len(), "data does not match the grid");
        let (n, h, periodic) = match axis {
            Axis::U => (self.nu, self.step_u(), self.periodic_u),
            Axis::V => (self.nv, self.step_v(), self.periodic_v),
        };
        let at = |i: usize, j: usize, k: isize| -> &T {
            let (ii, jj) = match axis {
                Axis::U => (wrap(i as isize + k, n, periodic), j),
                Axis::V => (i, wrap(j as isize + k, n, periodic)),
            };
            &data[self.index(ii, jj)]
        };
        let mut out = Vec::with_capacity(data.len());
        for i in 0..self.nu {
            for j in 0..self.nv {
                let p = match axis {
                    Axis::U => i,
                    Axis::V => j,
                };
                let d = if n >= 5 && (periodic || (p >= 2 && p + 2 < n)) {
                    T::lin(&[
                        (-1.0 / (12.0 * h), at(i, j, 2)),
                        (8.0 / (12.0 * h), at(i, j, 1)),
                        (-8.0 / (12.0 * h), at(i, j, -1)),
                        (1.0 / (12.0 * h), at(i, j, -2)),
                    ])
                } else if periodic || (p >= 1 && p + 1 < n) {
                    T::lin(&[(0.5 / h, at(i, j, 1)), (-0.5 / h, at(i, j, -1))])
                } else if p == 0 {
                    T::lin(&[(-1.5 / h, at(i, j, 0)), (2.0 / h, at(i, j, 1)), (-0.5 / h, at(i, j, 2))])
                } else {
                    T::lin(&[(1.5 / h, at(i, j, 0)), (-2.0 / h, at(i, j, -1)), (0.5 / h, at(i, j, -2))])
                };
                out.push(d);
            }
        }
        out
    }
}

fn wrap(k: isize, n: usize, periodic: bool) -> usize {
    if periodic {
        k.rem_euclid(n as isize) as usize
    } else {
        k.clamp(0, n as isize - 1) as usize
    }
}

/// Values that can be combined linearly by the difference stencils.
pub trait Linear: Sized {
    fn lin(terms: &[(f64, &Self)]) -> Self;
}

impl Linear for f64 {
    fn lin(terms: &[(f64, &Self)]) -> Self {
        terms.iter().map(|(k, x)| k * **x).sum()
    }
}

impl Linear for Mat {
    fn lin(terms: &[(f64, &Self)]) -> Self {
        let mut out = Mat::zeros(terms[0].1.nrows(), terms[0].1.ncols());
        for (k, x) in terms {
            out += *x * *k;
        }
        out
    }
}

impl Linear for crate::linalg::Coords {
    fn lin(terms: &[(f64, &Self)]) -> Self {
        let mut out = crate::linalg::Coords::zeros(terms[0].1.len());
        for (k, x) in terms {
            out += *x * *k;
        }
        out
    }
}
