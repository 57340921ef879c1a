//! Matrix Lie algebras of the metric groups and subalgebras cut out by
//! linear conditions on Maurer–Cartan entries.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::linalg::group::{algebra_residual, AlgebraElement};
use crate::linalg::metric::{Mat, Metric};

/// `Σ coef · X[row, col]`. Entry `(a, b)` is the form written `ω^a_b`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearFunctional {
    pub terms: Vec<(usize, usize, f64)>,
}

impl LinearFunctional {
    pub fn entry(row: usize, col: usize) -> Self {
        Self { terms: vec![(row, col, 1.0)] }
    }

    /// `ω^r1_c1 − k·ω^r2_c2`
    pub fn relation(r1: usize, c1: usize, k: f64, r2: usize, c2: usize) -> Self {
        Self { terms: vec![(r1, c1, 1.0), (r2, c2, -k)] }
    }

    pub fn eval(&self, x: &Mat) -> f64 {
        self.terms.iter().map(|&(r, c, k)| k * x[(r, c)]).sum()
    }
}

/// The Lie algebra of the isometry group of `metric`, with a fixed basis
/// `G·(E_ij − E_ji)` and a list of entries that serve as coordinates.
#[derive(Clone, Debug)]
pub struct MatrixAlgebra {
    metric: Metric,
    basis: Vec<Mat>,
    coordinates: Vec<(usize, usize)>,
}

impl MatrixAlgebra {
    pub fn new(metric: Metric) -> Self {
        let n = metric.dimension();
        let g = metric.gram();
        let mut basis = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let mut a = Mat::zeros(n, n);
                a[(i, j)] = 1.0;
                a[(j, i)] = -1.0;
                basis.push(&g * a);
            }
        }
        // greedy choice of independent entries, scanned row-major
        let mut coordinates = Vec::new();
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for r in 0..n {
            for c in 0..n {
                let row: Vec<f64> = basis.iter().map(|b| b[(r, c)]).collect();
                let mut trial = rows.clone();
                trial.push(row.clone());
                if rank(&trial, basis.len()) == trial.len() {
                    rows = trial;
                    coordinates.push((r, c));
                }
            }
        }
        Self { metric, basis, coordinates }
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Mat] {
        &self.basis
    }

    /// Entries `(row, col)` that determine an algebra element uniquely.
    pub fn coordinate_entries(&self) -> &[(usize, usize)] {
        &self.coordinates
    }

    /// Coordinates of `x` in the chosen entry list.
    pub fn coordinates_of(&self, x: &Mat) -> Vec<f64> {
        self.coordinates.iter().map(|&(r, c)| x[(r, c)]).collect()
    }
}

fn rank(rows: &[Vec<f64>], ncols: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let smax = sv.max();
    sv.iter().filter(|&&s| s > 1e-10 * smax.max(1.0)).count()
}

/// Orthonormal basis of the null space of `a` (columns of the result).
pub fn null_space(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let d = a.ncols();
    if a.nrows() == 0 {
        return DMatrix::identity(d, d);
    }
    let rows = a.nrows().max(d);
    let mut padded = DMatrix::zeros(rows, d);
    padded.view_mut((0, 0), (a.nrows(), d)).copy_from(a);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let smax = svd.singular_values.max();
    let cut = rel_tol * smax.max(1.0);
    let idx: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] <= cut).collect();
    let mut out = DMatrix::zeros(d, idx.len());
    for (k, &i) in idx.iter().enumerate() {
        out.set_column(k, &vt.row(i).transpose());
    }
    out
}

#[derive(Clone, Debug)]
pub struct SubalgebraBasis {
    pub elements: Vec<AlgebraElement>,
    pub constraints: Vec<LinearFunctional>,
    pub closure_residual: f64,
}

impl SubalgebraBasis {
    pub fn dimension(&self) -> usize {
        self.elements.len()
    }

    /// Least-squares coefficients of `x` in the span, and the residual.
    pub fn decompose(&self, x: &Mat) -> (Vec<f64>, f64) {
        decompose(&self.elements.iter().map(|e| e.mat().clone()).collect::<Vec<_>>(), x)
    }

    /// Largest value of any constraint on any basis element.
    pub fn constraint_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for e in &self.elements {
            for f in &self.constraints {
                worst = worst.max(f.eval(e.mat()).abs());
            }
        }
        worst
    }
}

fn decompose(span: &[Mat], x: &Mat) -> (Vec<f64>, f64) {
    if span.is_empty() {
        return (vec![], x.amax());
    }
    let n2 = x.len();
    let a = DMatrix::from_fn(n2, span.len(), |i, j| span[j].as_slice()[i]);
    let b = nalgebra::DVector::from_column_slice(x.as_slice());
    let (c, r) = lstsq(&a, &b);
    (c.iter().copied().collect(), r)
}

/// Least-squares solution of `a x = b` for full column rank `a` (Householder
/// QR), and the max-abs residual.
pub fn lstsq(a: &DMatrix<f64>, b: &nalgebra::DVector<f64>) -> (nalgebra::DVector<f64>, f64) {
    let qr = a.clone().qr();
    let rhs = qr.q().transpose() * b;
    let x = qr.r().solve_upper_triangular(&rhs).unwrap_or_else(|| nalgebra::DVector::from_element(a.ncols(), f64::NAN));
    let r = (a * &x - b).amax();
    (x, r)
}

/// Max over pairs of the distance from `[X, Y]` to the span.
pub fn closure_residual(span: &[Mat]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..span.len() {
        for j in (i + 1)..span.len() {
            let br = &span[i] * &span[j] - &span[j] * &span[i];
            worst = worst.max(decompose(span, &br).1);
        }
    }
    worst
}

pub fn subalgebra_from_constraints(constraints: &[LinearFunctional], metric: Metric) -> SubalgebraBasis {
    let alg = MatrixAlgebra::new(metric);
    let basis = alg.basis();
    let a = DMatrix::from_fn(constraints.len(), basis.len(), |k, b| constraints[k].eval(&basis[b]));
    let ns = null_space(&a, 1e-10);
    let mut mats = Vec::new();
    for k in 0..ns.ncols() {
        let mut x = Mat::zeros(metric.dimension(), metric.dimension());
        for (b, xb) in basis.iter().enumerate() {
            x += xb * ns[(b, k)];
        }
        // clean rounding noise so exact zeros stay exact
        x.iter_mut().for_each(|v| {
            if v.abs() < 1e-15 {
                *v = 0.0
            }
        });
        mats.push(x);
    }
    let closure = closure_residual(&mats);
    let elements = mats
        .into_iter()
        .map(|m| {
            debug_assert!(algebra_residual(&m, &metric) < 1e-12);
            AlgebraElement::new(m, metric).expect("constructed inside the algebra")
        })
        .collect();
    SubalgebraBasis { elements, constraints: constraints.to_vec(), closure_residual: closure }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_dimensions_and_coordinates() {
        for (m, d) in [(Metric::euclidean3(), 3), (Metric::moebius(), 10), (Metric::lie(), 15)] {
            let alg = MatrixAlgebra::new(m);
            assert_eq!(alg.dimension(), d);
            assert_eq!(alg.coordinate_entries().len(), d);
            for b in alg.basis() {
                assert_eq!(algebra_residual(b, &m), 0.0);
            }
        }
    }

    #[test]
    fn unconstrained_so3() {
        let s = subalgebra_from_constraints(&[], Metric::euclidean3());
        assert_eq!(s.dimension(), 3);
        assert!(s.closure_residual < 1e-12);
    }

    #[test]
    fn full_rank_constraints_give_empty_basis() {
        let c: Vec<_> = [(0, 1), (0, 2), (1, 2)].iter().map(|&(r, c)| LinearFunctional::entry(r, c)).collect();
        let s = subalgebra_from_constraints(&c, Metric::euclidean3());
        assert_eq!(s.dimension(), 0);
    }

    #[test]
    fn rotations_about_one_axis() {
        let s = subalgebra_from_constraints(&[LinearFunctional::entry(0, 2), LinearFunctional::entry(1, 2)], Metric::euclidean3());
        assert_eq!(s.dimension(), 1);
        assert!(s.constraint_residual() < 1e-15);
    }
}
