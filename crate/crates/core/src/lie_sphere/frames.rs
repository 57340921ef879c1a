//! Lie frames, the subalgebra `𝔥`, boosts, coset orbits `A H o`, the
//! Figure-7 pipeline and the best Lie frame conditions.

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::{pullback_mc, FrameField, GroupKind, MCForm};
use crate::lie_sphere::lines::{example_s0, example_s1, make_line, LegendreMap};
use crate::linalg::{change_basis_matrix, expm, lstsq, subalgebra_from_constraints, Coords, LinearFunctional, Mat, Metric, SubalgebraBasis};
use crate::space_forms::{chart_inverse, stereo_coords, SpaceForm};
use crate::surface::domain::{Axis, ParamDomain};
use crate::tolerances::{FRAME_ORDER, RANK};

pub fn lie_group() -> GroupKind {
    GroupKind::Metric(Metric::lie())
}

/// The nine forms whose common kernel is `𝔥`.
pub const H_ANNIHILATOR: [(usize, usize); 9] = [(2, 0), (3, 1), (1, 0), (0, 1), (2, 3), (0, 2), (1, 3), (0, 4), (4, 0)];

pub fn h_basis() -> SubalgebraBasis {
    let c: Vec<LinearFunctional> = H_ANNIHILATOR.iter().map(|&(r, c)| LinearFunctional::entry(r, c)).collect();
    subalgebra_from_constraints(&c, Metric::lie())
}

fn e(i: usize, j: usize) -> Mat {
    let mut m = Mat::zeros(6, 6);
    m[(i, j)] = 1.0;
    m
}

/// Elements of `𝔥` dual to `θ³ = ω³₀` and `θ² = ω²₁` generating compact
/// one-parameter subgroups.
pub fn compact_generators() -> (Mat, Mat) {
    let u = e(3, 0) - e(0, 3) * 0.5 + e(5, 3) - e(3, 5) * 0.5;
    let v = e(2, 1) - e(1, 2) * 0.5 + e(4, 2) - e(2, 4) * 0.5;
    (u, v)
}

/// Minimum-norm elements of `𝔥` with `(θ², θ³) = (1, 0)` and `(0, 1)`.
pub fn min_norm_generators() -> (Mat, Mat) {
    let h = h_basis();
    let mats: Vec<Mat> = h.elements.iter().map(|x| x.mat().clone()).collect();
    let a = DMatrix::from_fn(2, mats.len(), |r, k| if r == 0 { mats[k][(2, 1)] } else { mats[k][(3, 0)] });
    let gram = DMatrix::from_fn(mats.len(), mats.len(), |i, j| mats[i].dot(&mats[j]));
    let gi = gram.try_inverse().expect("basis is independent");
    let pick = |t: [f64; 2]| {
        let m = &a * &gi * a.transpose();
        let lam = m.try_inverse().expect("theta functionals are independent on h") * DVector::from_column_slice(&t);
        let c = &gi * a.transpose() * lam;
        mats.iter().enumerate().fold(Mat::zeros(6, 6), |acc, (k, x)| acc + x * c[k])
    };
    (pick([0.0, 1.0]), pick([1.0, 0.0]))
}

/// The boost mixing `ε₀` and `ε₅`, in the `λ` basis: `diag(eᵗ, 1, 1, 1, 1, e⁻ᵗ)`.
pub fn boost(t: f64) -> Mat {
    let mut b = Mat::identity(6, 6);
    let (c, s) = (t.cosh(), t.sinh());
    b[(0, 0)] = c;
    b[(5, 5)] = c;
    b[(0, 5)] = s;
    b[(5, 0)] = s;
    change_basis_matrix(&b, Metric::lie_eps(), Metric::lie()).expect("same space")
}

fn to_lambda(eps_cols: &[Coords]) -> Mat {
    let p = Metric::lie().change_matrix();
    p.transpose() * Mat::from_columns(eps_cols)
}

/// The Lie frame along the Example immersion, columns in `ε` coordinates:
/// `T₀ = S₀(u)`, `T₁ = S₁(v)`, `T₂ = S₁'(v)`, `T₃ = S₀'(u)`,
/// `T₄ = ε₅ − T₁/2`, `T₅ = ε₄ − T₀/2`. Returned in the `λ` basis.
pub fn example_frame(u: f64, v: f64) -> Mat {
    let t0 = example_s0(u);
    let t1 = example_s1(v);
    let t2 = Coords::from_vec(vec![0.0, -v.sin(), v.cos(), 0.0, 0.0, 0.0]);
    let t3 = Coords::from_vec(vec![-u.sin(), 0.0, 0.0, u.cos(), 0.0, 0.0]);
    let mut e5 = Coords::zeros(6);
    e5[5] = 1.0;
    let mut e4 = Coords::zeros(6);
    e4[4] = 1.0;
    let t4 = e5 - &t1 * 0.5;
    let t5 = e4 - &t0 * 0.5;
    to_lambda(&[t0, t1, t2, t3, t4, t5])
}

pub fn example_frame_field(domain: &ParamDomain) -> Result<FrameField> {
    FrameField::from_fn(*domain, lie_group(), example_frame)
}

/// Complete `T₀, T₁` (null, orthogonal, `ε` coordinates) to a Lie frame.
/// `hint2`, `hint3` steer `T₂`, `T₃`; the complement of the line is built from
/// `ε₄, ε₅`. Returned in the `λ` basis.
pub fn complete_lie_frame(t0: &Coords, t1: &Coords, hint2: &Coords, hint3: &Coords) -> Result<Mat> {
    let m = Metric::lie_eps();
    let ip = |a: &Coords, b: &Coords| m.inner_coords(a, b);
    let mut a = Coords::zeros(6);
    a[4] = 1.0;
    let mut b = Coords::zeros(6);
    b[5] = 1.0;
    // (T₅, T₄) = (a, b) M⁻¹ (−I): ⟨T₀, T₅⟩ = ⟨T₁, T₄⟩ = −1, ⟨T₀, T₄⟩ = ⟨T₁, T₅⟩ = 0
    let mm = Matrix2::new(ip(t0, &a), ip(t0, &b), ip(t1, &a), ip(t1, &b));
    let mi = mm.try_inverse().ok_or(Error::DegenerateLine)?;
    let col = |k: usize| -(&a * mi[(0, k)] + &b * mi[(1, k)]);
    let mut t5 = col(0);
    let mut t4 = col(1);
    let n5 = ip(&t5, &t5);
    t5 += t0 * (n5 / 2.0);
    let c45 = ip(&t4, &t5);
    let n4 = ip(&t4, &t4);
    t4 += t0 * c45 + t1 * (n4 / 2.0);
    let strip = |z: &Coords| z + t0 * ip(z, &t5) + t1 * ip(z, &t4) + &t5 * ip(z, t0) + &t4 * ip(z, t1);
    let mut t2 = strip(hint2);
    let n2 = ip(&t2, &t2);
    if !(n2 > 1e-12) {
        return Err(Error::Dependent);
    }
    t2 /= n2.sqrt();
    let mut t3 = strip(hint3);
    t3 -= &t2 * ip(&t3, &t2);
    let n3 = ip(&t3, &t3);
    if !(n3 > 1e-12) {
        return Err(Error::Dependent);
    }
    t3 /= n3.sqrt();
    let t = to_lambda(&[t0.clone(), t1.clone(), t2, t3, t4, t5]);
    let r = crate::linalg::group_residual(&t, &Metric::lie());
    if !(r <= 1e-9) {
        return Err(Error::NotInGroup { residual: r });
    }
    Ok(t)
}

/// Choice of two-parameter slice of `H` used to sample orbits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Slice {
    /// `exp(sU + tV)` with the compact generators; closes up with period `2π`.
    Compact,
    /// `exp(sX) exp(tY)` with minimum-norm generators.
    MinNorm,
}

impl std::str::FromStr for Slice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "compact" => Ok(Slice::Compact),
            "min_norm" | "minnorm" => Ok(Slice::MinNorm),
            other => Err(Error::Invalid(format!("unknown slice '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CosetOrbit {
    pub slice: Slice,
    pub frames: FrameField,
    pub map: LegendreMap,
    /// Smallest `|θ² ∧ θ³|` of the slice over the grid.
    pub min_immersion: f64,
}

/// `A T_ref exp(·) o` over the grid, with `T_ref` the Example frame at the
/// origin, so that `A = I` reproduces the Example immersion.
pub fn coset_orbit(a: &Mat, domain: &ParamDomain, slice: Slice) -> Result<CosetOrbit> {
    let r = crate::linalg::group_residual(a, &Metric::lie());
    if !(r <= 1e-9) {
        return Err(Error::NotInGroup { residual: r });
    }
    let (x, y) = match slice {
        Slice::Compact => compact_generators(),
        Slice::MinNorm => min_norm_generators(),
    };
    let base = a * example_frame(0.0, 0.0);
    let frames = FrameField::from_fn(*domain, lie_group(), |s, t| match slice {
        Slice::Compact => &base * expm(&(&x * s + &y * t)),
        Slice::MinNorm => &base * expm(&(&x * s)) * expm(&(&y * t)),
    })?;
    // θ² = ω²₁, θ³ = ω³₀ of exp-slices, evaluated exactly
    let mut min_imm = f64::INFINITY;
    for (_, _, s, t) in domain.points() {
        let (ws, wt) = match slice {
            Slice::Compact => (x.clone(), y.clone()),
            Slice::MinNorm => {
                let g = expm(&(&y * t));
                (crate::linalg::group_inverse(&g, &Metric::lie()) * &x * &g, y.clone())
            }
        };
        let _ = s;
        min_imm = min_imm.min((ws[(2, 1)] * wt[(3, 0)] - wt[(2, 1)] * ws[(3, 0)]).abs());
    }
    if !(min_imm > RANK) {
        return Err(Error::Invalid("the slice does not immerse on this grid; try the other slice".into()));
    }
    let p = Metric::lie().change_matrix();
    let mut lines = Vec::with_capacity(domain.len());
    for m in frames.mats() {
        let eps = &p * m;
        lines.push(make_line(eps.column(0).into_owned(), eps.column(1).into_owned())?);
    }
    let map = LegendreMap::new(*domain, lines, None)?;
    Ok(CosetOrbit { slice, frames, map, min_immersion: min_imm })
}

#[derive(Clone, Debug, Serialize)]
pub struct Fig7 {
    pub t: f64,
    pub domain: ParamDomain,
    /// Points in `R³`; `None` at the stereographic pole.
    #[serde(skip)]
    pub points: Vec<Option<Coords>>,
    /// Grid indices flagged singular (first fundamental form determinant
    /// below tolerance relative to the squared mean metric size) or at the pole.
    pub singular: Vec<usize>,
    pub pole: Vec<usize>,
    /// Whether the whole image is degenerate (rank ≤ 1 everywhere).
    pub degenerate: bool,
    pub max_rank_ratio: f64,
}

/// Default Figure-7 grid: `[−π, π)²`, periodic.
pub fn fig7_domain(n: usize, m: usize) -> Result<ParamDomain> {
    use std::f64::consts::PI;
    ParamDomain::new((-PI, PI), (-PI, PI), n, m, true, true)
}

/// `𝒮 ∘ f₊⁻¹ ∘ σ` of `boost(t) H o`.
pub fn fig7_pipeline(t: f64, domain: &ParamDomain) -> Result<Fig7> {
    fig7_pipeline_with(t, domain, RANK)
}

/// [`fig7_pipeline`] with an explicit relative rank threshold.
pub fn fig7_pipeline_with(t: f64, domain: &ParamDomain, rank_tol: f64) -> Result<Fig7> {
    let orbit = coset_orbit(&boost(t), domain, Slice::Compact)?;
    let sigma = orbit.map.spherical_projection()?;
    let mut points = Vec::with_capacity(domain.len());
    let mut pole = Vec::new();
    for (k, p) in sigma.iter().enumerate() {
        let x = chart_inverse(SpaceForm::Sphere, p.coords())?;
        match stereo_coords(&x) {
            Ok(y) => points.push(Some(y)),
            Err(_) => {
                points.push(None);
                pole.push(k);
            }
        }
    }
    let filled: Vec<Coords> = points.iter().map(|p| p.clone().unwrap_or_else(|| Coords::zeros(3))).collect();
    let du = domain.diff(&filled, Axis::U);
    let dv = domain.diff(&filled, Axis::V);
    let dets: Vec<f64> = du
        .iter()
        .zip(&dv)
        .map(|(a, b)| {
            let (ee, ff, gg) = (a.dot(a), a.dot(b), b.dot(b));
            (ee * gg - ff * ff).max(0.0)
        })
        .collect();
    // typical size of the metric away from the pole
    let mut size = 0.0;
    let mut count = 0usize;
    for k in 0..domain.len() {
        if !pole.contains(&k) && !pole_neighbor(domain, &pole, k) {
            size += (du[k].norm_squared() + dv[k].norm_squared()) / 2.0;
            count += 1;
        }
    }
    let size = if count > 0 { size / count as f64 } else { 0.0 };
    let scale = size * size;
    let mut singular = Vec::new();
    let mut max_ratio: f64 = 0.0;
    for (k, det) in dets.iter().enumerate() {
        if pole.contains(&k) || pole_neighbor(domain, &pole, k) {
            continue;
        }
        let ratio = if scale > 0.0 { det / scale } else { 0.0 };
        max_ratio = max_ratio.max(ratio);
        if ratio < rank_tol {
            singular.push(k);
        }
    }
    let degenerate = max_ratio < rank_tol;
    singular.extend(pole.iter().copied());
    singular.sort_unstable();
    singular.dedup();
    Ok(Fig7 { t, domain: *domain, points, singular, pole, degenerate, max_rank_ratio: max_ratio })
}

/// Finite differences near the pole are meaningless.
fn pole_neighbor(d: &ParamDomain, pole: &[usize], k: usize) -> bool {
    let (i, j) = d.ij(k);
    pole.iter().any(|&p| {
        let (pi, pj) = d.ij(p);
        let di = (pi as isize - i as isize).rem_euclid(d.nu as isize).min((i as isize - pi as isize).rem_euclid(d.nu as isize));
        let dj = (pj as isize - j as isize).rem_euclid(d.nv as isize).min((j as isize - pj as isize).rem_euclid(d.nv as isize));
        di <= 2 && dj <= 2
    })
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct LieOrderResiduals {
    pub first: f64,
    pub second: f64,
    pub third: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LieCoefficients {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    pub c2: Vec<f64>,
    pub c3: Vec<f64>,
    pub d2: Vec<f64>,
    pub d3: Vec<f64>,
    /// `(θ², θ³)` as `(du, dv)` coefficient pairs.
    #[serde(skip)]
    pub theta: Vec<[(f64, f64); 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LieFrameCheck {
    pub orders: LieOrderResiduals,
    pub coefficients: LieCoefficients,
    /// Largest disagreement between the `q`, `p` read off `ω⁰₀`, `ω¹₁` and
    /// the ones from `dθ²`, `dθ³`, plus fit residuals.
    pub fit_residual: f64,
    /// The two exterior-derivative relations.
    pub relations: [f64; 2],
    pub min_immersion: f64,
}

fn coframe(binv: &Matrix2<f64>, f: (f64, f64)) -> (f64, f64) {
    (f.0 * binv[(0, 0)] + f.1 * binv[(1, 0)], f.0 * binv[(0, 1)] + f.1 * binv[(1, 1)])
}

pub fn best_lie_frame_check(t: &FrameField) -> Result<LieFrameCheck> {
    if t.group() != lie_group() {
        return Err(Error::MetricMismatch);
    }
    check_lie_form(&pullback_mc(t)?, FRAME_ORDER)
}

pub fn check_lie_form(w: &MCForm, tol: f64) -> Result<LieFrameCheck> {
    let d = w.domain;
    let n = d.len();
    let interior: Vec<usize> = d.points().filter(|&(i, j, _, _)| d.is_interior(i, j)).map(|(i, j, _, _)| d.index(i, j)).collect();
    let mut o = LieOrderResiduals::default();
    for &k in &interior {
        for m in [&w.wu[k], &w.wv[k]] {
            o.first = o.first.max(m[(2, 0)].abs()).max(m[(3, 1)].abs());
            for (r, c) in [(1, 0), (0, 1), (2, 3), (3, 2)] {
                o.second = o.second.max(m[(r, c)].abs());
            }
            for (r, c) in [(0, 2), (1, 3), (0, 4)] {
                o.third = o.third.max(m[(r, c)].abs());
            }
        }
    }
    if !(o.first <= tol) {
        return Err(Error::FrameOrder { order: "first", residual: o.first });
    }
    let mut theta = Vec::with_capacity(n);
    let mut binv = Vec::with_capacity(n);
    let mut min_imm = f64::INFINITY;
    for k in 0..n {
        let (t2, t3) = (w.entry(k, 2, 1), w.entry(k, 3, 0));
        theta.push([t2, t3]);
        let b = Matrix2::new(t2.0, t2.1, t3.0, t3.1);
        min_imm = min_imm.min(b.determinant().abs());
        binv.push(b.try_inverse().ok_or(Error::NotImmersive(b.determinant()))?);
    }
    // dθ = (∂_u θ_v − ∂_v θ_u) du∧dv, θ²∧θ³ = det B du∧dv
    let comp = |a: usize, c: usize| -> Vec<f64> { (0..n).map(|k| if c == 0 { theta[k][a].0 } else { theta[k][a].1 }).collect() };
    let curl = |a: usize| -> Vec<f64> {
        let tv_u = d.diff(&comp(a, 1), Axis::U);
        let tu_v = d.diff(&comp(a, 0), Axis::V);
        (0..n).map(|k| (tv_u[k] - tu_v[k]) / binv[k].determinant().recip()).collect()
    };
    let p = curl(0);
    let q = curl(1);
    let fit2 = |k: usize, r: usize, c: usize| -> ((f64, f64), f64) {
        let th = theta[k];
        let a = DMatrix::from_row_slice(2, 2, &[th[0].0, th[1].0, th[0].1, th[1].1]);
        let (x, res) = lstsq(&a, &DVector::from_vec(vec![w.wu[k][(r, c)], w.wv[k][(r, c)]]));
        ((x[0], x[1]), res)
    };
    let (mut tt, mut uu, mut c2, mut c3, mut d2, mut d3) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut fit: f64 = 0.0;
    for k in 0..n {
        let ((qq, t_), r1) = fit2(k, 0, 0);
        let ((u_, mp), r2) = fit2(k, 1, 1);
        let ((a2, a3), r3) = fit2(k, 0, 3);
        let ((b2, b3), r4) = fit2(k, 1, 2);
        tt[k] = t_;
        uu[k] = u_;
        c2[k] = a2;
        c3[k] = a3;
        d2[k] = b2;
        d3[k] = b3;
        let (i, j) = d.ij(k);
        if d.is_interior(i, j) {
            fit = fit.max(r1).max(r2).max(r3).max(r4).max((qq - q[k]).abs()).max((mp + p[k]).abs());
        }
    }
    let grad = |f: &[f64]| (d.diff(f, Axis::U), d.diff(f, Axis::V));
    let (qg, tg, ug, pg) = (grad(&q), grad(&tt), grad(&uu), grad(&p));
    let mut rel = [0.0_f64; 2];
    for &k in &interior {
        let cf = |g: &(Vec<f64>, Vec<f64>)| coframe(&binv[k], (g.0[k], g.1[k]));
        let (qd, td, ud, pd) = (cf(&qg), cf(&tg), cf(&ug), cf(&pg));
        // df∧θ² = −f₃ θ²∧θ³, df∧θ³ = f₂ θ²∧θ³
        let lhs1 = -qd.1 + td.0;
        let rhs1 = -(c2[k] + q[k] * (p[k] + tt[k]));
        let lhs2 = -ud.1 - pd.0;
        let rhs2 = d3[k] + p[k] * (q[k] - uu[k]);
        rel[0] = rel[0].max((lhs1 - rhs1).abs());
        rel[1] = rel[1].max((lhs2 - rhs2).abs());
    }
    Ok(LieFrameCheck {
        orders: o,
        coefficients: LieCoefficients { p, q, t: tt, u: uu, c2, c3, d2, d3, theta },
        fit_residual: fit,
        relations: rel,
        min_immersion: min_imm,
    })
}
