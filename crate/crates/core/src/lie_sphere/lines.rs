//! The Lie quadric, its lines, spherical projection and Legendre maps.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, SVD};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{lstsq, BasisTag, Coords, Metric, ProjectivePoint};
use crate::moebius::SphereVec;
use crate::surface::domain::{Axis, ParamDomain};
use crate::tolerances::{CONTACT, MEMBERSHIP};

const N: usize = 6;

fn lie_inner(a: &Coords, b: &Coords) -> f64 {
    Metric::lie_eps().inner_coords(a, b)
}

fn need6(c: &Coords) -> Result<()> {
    if c.len() != N {
        return Err(Error::DimensionMismatch { expected: N, got: c.len() });
    }
    Ok(())
}

/// `⟨q, q⟩` for the unit representative of `q`.
fn null_residual(q: &Coords) -> f64 {
    let n = q.norm();
    if n == 0.0 {
        return f64::INFINITY;
    }
    (lie_inner(q, q) / (n * n)).abs()
}

/// A point of the Lie quadric `Q ⊂ P(R^{4,2})` (`ε` coordinates).
#[derive(Clone, Debug)]
pub struct QuadricPoint(ProjectivePoint);

impl QuadricPoint {
    pub fn new(q: Coords) -> Result<Self> {
        need6(&q)?;
        let r = null_residual(&q);
        if !(r <= 1e-12) {
            return Err(Error::OffQuadric(r));
        }
        Ok(Self(ProjectivePoint::from_coords(q, Metric::lie_eps())?))
    }

    pub fn point(&self) -> &ProjectivePoint {
        &self.0
    }

    pub fn coords(&self) -> &Coords {
        self.0.coords()
    }

    /// Whether this is a point sphere: `⟨q, ε₅⟩ = 0`.
    pub fn is_point_sphere(&self, tol: f64) -> bool {
        self.coords()[5].abs() <= tol
    }
}

/// `S ↦ [S + ε₅]`.
pub fn include_sphere(s: &SphereVec) -> QuadricPoint {
    let mut q = Coords::zeros(N);
    q.rows_mut(0, 5).copy_from(s.coords());
    q[5] = 1.0;
    QuadricPoint::new(q).expect("unit spacelike vectors lift to the quadric")
}

/// `R^{4,1} ⊂ R^{4,2}` on a null point of Möbius space.
pub fn include_point(p: &ProjectivePoint) -> Result<QuadricPoint> {
    if p.metric().space() != crate::linalg::Space::R41 {
        return Err(Error::MetricMismatch);
    }
    let e = p.to_basis(BasisTag::Epsilon)?;
    let mut q = Coords::zeros(N);
    q.rows_mut(0, 5).copy_from(e.coords());
    QuadricPoint::new(q)
}

/// A line `[S₀, S₁]` in `Q`: a pencil of oriented spheres in oriented contact.
#[derive(Clone, Debug)]
pub struct PencilLine {
    pub s0: Coords,
    pub s1: Coords,
    /// `|⟨S₀,S₀⟩|`, `|⟨S₁,S₁⟩|`, `|⟨S₀,S₁⟩|` on unit representatives.
    pub residuals: [f64; 3],
}

pub fn make_line(s0: Coords, s1: Coords) -> Result<PencilLine> {
    make_line_with(s0, s1, MEMBERSHIP)
}

pub fn make_line_with(s0: Coords, s1: Coords, tol: f64) -> Result<PencilLine> {
    need6(&s0)?;
    need6(&s1)?;
    let (n0, n1) = (s0.norm(), s1.norm());
    if n0 == 0.0 || n1 == 0.0 {
        return Err(Error::Dependent);
    }
    let sv = SVD::new(DMatrix::from_columns(&[&s0 / n0, &s1 / n1]), false, false).singular_values;
    if sv.min() < 1e-10 {
        return Err(Error::Dependent);
    }
    let r0 = null_residual(&s0);
    let r1 = null_residual(&s1);
    if !(r0 <= tol) {
        return Err(Error::OffQuadric(r0));
    }
    if !(r1 <= tol) {
        return Err(Error::OffQuadric(r1));
    }
    let r01 = (lie_inner(&s0, &s1) / (n0 * n1)).abs();
    if !(r01 <= tol) {
        return Err(Error::NonOrthogonal(r01));
    }
    Ok(PencilLine { s0, s1, residuals: [r0, r1, r01] })
}

impl PencilLine {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// The unit representatives' pairing coefficients `(α, β)` with
/// `⟨αS₀ + βS₁, ε₅⟩ = 0`.
fn sigma_coeffs(l: &PencilLine) -> Result<(f64, f64)> {
    let a = -l.s0[5];
    let b = -l.s1[5];
    let scale = l.s0.norm().max(l.s1.norm());
    if a.abs().max(b.abs()) <= 1e-14 * scale {
        return Err(Error::DegenerateLine);
    }
    Ok((b, -a))
}

/// `σ(λ) = λ ∩ M`, as a point of `R^{4,1}` (`ε` coordinates).
pub fn spherical_projection(l: &PencilLine) -> Result<ProjectivePoint> {
    let (al, be) = sigma_coeffs(l)?;
    let p = &l.s0 * al + &l.s1 * be;
    ProjectivePoint::from_coords(p.rows(0, 5).into_owned(), Metric::conformal())
}

/// A map from a grid into the space of lines `Λ`.
#[derive(Clone, Debug)]
pub struct LegendreMap {
    pub domain: ParamDomain,
    pub lines: Vec<PencilLine>,
    /// Exact partials `(∂_u S₀, ∂_v S₀)` when known; finite differences otherwise.
    pub s0_partials: Option<Vec<(Coords, Coords)>>,
}

impl LegendreMap {
    pub fn new(domain: ParamDomain, lines: Vec<PencilLine>, s0_partials: Option<Vec<(Coords, Coords)>>) -> Result<Self> {
        if lines.len() != domain.len() || s0_partials.as_ref().is_some_and(|p| p.len() != domain.len()) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { domain, lines, s0_partials })
    }

    fn fd(&self, which: usize) -> (Vec<Coords>, Vec<Coords>) {
        let data: Vec<Coords> = self.lines.iter().map(|l| if which == 0 { l.s0.clone() } else { l.s1.clone() }).collect();
        (self.domain.diff(&data, Axis::U), self.domain.diff(&data, Axis::V))
    }

    fn s0_derivatives(&self) -> (Vec<Coords>, Vec<Coords>) {
        match &self.s0_partials {
            Some(p) => (p.iter().map(|x| x.0.clone()).collect(), p.iter().map(|x| x.1.clone()).collect()),
            None => self.fd(0),
        }
    }

    /// Spherical projection at every grid point.
    pub fn spherical_projection(&self) -> Result<Vec<ProjectivePoint>> {
        self.lines.iter().map(spherical_projection).collect()
    }
}

/// `max |⟨∂S₀, S₁⟩| / (|S₀| |S₁|)` over the grid: the contact form
/// `ω⁴₀ = −⟨dT₀, T₁⟩` on unit representatives.
pub fn contact_residual(l: &LegendreMap) -> f64 {
    let (du, dv) = l.s0_derivatives();
    let mut worst: f64 = 0.0;
    for (i, j, _, _) in l.domain.points() {
        if l.s0_partials.is_none() && !l.domain.is_interior(i, j) {
            continue;
        }
        let k = l.domain.index(i, j);
        let line = &l.lines[k];
        let scale = line.s0.norm() * line.s1.norm();
        worst = worst.max((lie_inner(&du[k], &line.s1) / scale).abs()).max((lie_inner(&dv[k], &line.s1) / scale).abs());
    }
    worst
}

/// Second singular value of the differential of `σ ∘ λ` (unit representatives)
/// at every grid point; entries off the interior use lower-order differences.
pub fn sigma_rank(l: &LegendreMap) -> Result<Vec<f64>> {
    let pts: Vec<Coords> = l
        .lines
        .iter()
        .map(|x| {
            let (al, be) = sigma_coeffs(x)?;
            let p = &x.s0 * al + &x.s1 * be;
            // orient consistently so the unit representative is smooth
            let p = p.rows(0, 5).into_owned();
            Ok(&p / p.norm())
        })
        .collect::<Result<_>>()?;
    let pts = orient_like_first(pts);
    let du = l.domain.diff(&pts, Axis::U);
    let dv = l.domain.diff(&pts, Axis::V);
    Ok(du
        .iter()
        .zip(&dv)
        .map(|(a, b)| SVD::new(DMatrix::from_columns(&[a.clone(), b.clone()]), false, false).singular_values.min())
        .collect())
}

/// Flip signs of projective representatives so neighbours agree in sign.
fn orient_like_first(mut pts: Vec<Coords>) -> Vec<Coords> {
    for k in 1..pts.len() {
        if pts[k].dot(&pts[k - 1]) < 0.0 {
            pts[k] = -&pts[k];
        }
    }
    pts
}

/// `λ = [F, S + ε₅]` from a lift `F` of an immersion into Möbius space (`ε`
/// coordinates of `R^{4,1}`), its partials, and a tangent sphere map `S`.
pub fn legendre_lift(domain: &ParamDomain, f: &[Coords], df: &[(Coords, Coords)], s: &[SphereVec]) -> Result<LegendreMap> {
    if f.len() != domain.len() || df.len() != domain.len() || s.len() != domain.len() {
        return Err(Error::GridMismatch);
    }
    let m = Metric::conformal();
    let lift6 = |x: &Coords, e5: f64| {
        let mut q = Coords::zeros(N);
        q.rows_mut(0, 5).copy_from(x);
        q[5] = e5;
        q
    };
    let mut lines = Vec::with_capacity(domain.len());
    let mut partials = Vec::with_capacity(domain.len());
    for k in 0..domain.len() {
        let sc = s[k].coords();
        let scale = f[k].norm();
        let tangency = (m.inner_coords(&f[k], sc) / scale)
            .abs()
            .max((m.inner_coords(&df[k].0, sc) / scale).abs())
            .max((m.inner_coords(&df[k].1, sc) / scale).abs());
        if !(tangency <= CONTACT) {
            return Err(Error::NotTangent(tangency));
        }
        lines.push(make_line(lift6(&f[k], 0.0), lift6(sc, 1.0))?);
        partials.push((lift6(&df[k].0, 0.0), lift6(&df[k].1, 0.0)));
    }
    LegendreMap::new(*domain, lines, Some(partials))
}

/// `S₀(u) = cos u ε₀ + sin u ε₃ + ε₄`.
pub fn example_s0(u: f64) -> Coords {
    Coords::from_vec(vec![u.cos(), 0.0, 0.0, u.sin(), 1.0, 0.0])
}

/// `S₁(v) = cos v ε₁ + sin v ε₂ + ε₅`.
pub fn example_s1(v: f64) -> Coords {
    Coords::from_vec(vec![0.0, v.cos(), v.sin(), 0.0, 0.0, 1.0])
}

/// The Legendre immersion `λ(u, v) = [S₀(u), S₁(v)]` on a grid.
pub fn example_lambda(domain: &ParamDomain) -> Result<LegendreMap> {
    let mut lines = Vec::with_capacity(domain.len());
    let mut partials = Vec::with_capacity(domain.len());
    for (_, _, u, v) in domain.points() {
        lines.push(make_line(example_s0(u), example_s1(v))?);
        partials.push((Coords::from_vec(vec![-u.sin(), 0.0, 0.0, u.cos(), 0.0, 0.0]), Coords::zeros(N)));
    }
    LegendreMap::new(*domain, lines, Some(partials))
}

#[derive(Clone, Debug, Serialize)]
pub struct LegendreDupin {
    pub dupin: bool,
    /// Per grid point, the two curvature spheres as angles `φ` of
    /// `cos φ S₀ + sin φ S₁` in `[0, π)`; empty where the pencil degenerates.
    pub curvature_sphere_fields: Vec<Vec<f64>>,
    /// Largest derivative of a curvature sphere along its own principal direction.
    pub max_measure: f64,
    /// Grid indices where the pencil is identically degenerate or has a double root.
    pub flagged: Vec<usize>,
    pub tolerance: f64,
}

/// Orthonormal basis of `ℓ^⊥ / ℓ` for a null line `ℓ = [S₀, S₁]`, represented
/// by two spacelike vectors orthogonal to `ℓ`.
fn normal_space(l: &PencilLine) -> Result<[Coords; 2]> {
    let g = Metric::lie_eps().gram();
    // ℓ^⊥ is the kernel of the 2×6 system ⟨S_i, ·⟩ = 0
    let a = DMatrix::from_rows(&[(l.s0.transpose() * &g), (l.s1.transpose() * &g)]);
    let ns = crate::linalg::null_space(&a, 1e-12);
    if ns.ncols() != 4 {
        return Err(Error::DegenerateLine);
    }
    let mut out: Vec<Coords> = Vec::new();
    let lmat = DMatrix::from_columns(&[l.s0.clone(), l.s1.clone()]);
    for k in 0..4 {
        let mut w = ns.column(k).into_owned();
        // strip the ℓ part in the Euclidean sense, then Gram–Schmidt in the Lie metric
        let (c, _) = lstsq(&lmat, &w);
        w -= &lmat * c;
        for b in &out {
            w -= b * lie_inner(&w, b);
        }
        let n2 = lie_inner(&w, &w);
        // the kernel columns are unit vectors, so a tiny remainder lies in ℓ
        if w.norm() > 1e-8 && n2 > 1e-8 * w.norm_squared() {
            out.push(w / n2.sqrt());
        }
        if out.len() == 2 {
            return Ok([out[0].clone(), out[1].clone()]);
        }
    }
    Err(Error::DegenerateLine)
}

/// Curvature spheres of a Legendre map and the Dupin condition: at each
/// point solve `det(μA + νB) = 0`, where `A`, `B` are `dS₀`, `dS₁` modulo the
/// line, then require `[μS₀ + νS₁]` to be constant along the kernel direction.
pub fn legendre_dupin_test(l: &LegendreMap, tol: f64) -> Result<LegendreDupin> {
    let d = l.domain;
    let (s0u, s0v) = l.fd(0);
    let (s1u, s1v) = l.fd(1);
    let n = d.len();
    let mut roots: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut kernels: Vec<Vec<[f64; 2]>> = vec![Vec::new(); n];
    let mut flagged = Vec::new();
    for k in 0..n {
        let w = normal_space(&l.lines[k])?;
        let proj = |x: &Coords| [lie_inner(x, &w[0]), lie_inner(x, &w[1])];
        let (au, av, bu, bv) = (proj(&s0u[k]), proj(&s0v[k]), proj(&s1u[k]), proj(&s1v[k]));
        // det [[μ au0 + ν bu0, μ av0 + ν bv0], [μ au1 + ν bu1, μ av1 + ν bv1]] = c2 μ² + c1 μν + c0 ν²
        let c2 = au[0] * av[1] - av[0] * au[1];
        let c0 = bu[0] * bv[1] - bv[0] * bu[1];
        let c1 = au[0] * bv[1] + bu[0] * av[1] - av[0] * bu[1] - bv[0] * au[1];
        let scale = c2.abs().max(c1.abs()).max(c0.abs());
        if scale < 1e-14 {
            flagged.push(k);
            continue;
        }
        let phis = homogeneous_roots(c2 / scale, c1 / scale, c0 / scale);
        if phis.len() < 2 {
            flagged.push(k);
        }
        for phi in phis {
            let (mu, nu) = (phi.cos(), phi.sin());
            let m = [[mu * au[0] + nu * bu[0], mu * av[0] + nu * bv[0]], [mu * au[1] + nu * bu[1], mu * av[1] + nu * bv[1]]];
            // kernel of the 2×2 (rank one) matrix, from its larger row
            let r = if m[0][0].hypot(m[0][1]) >= m[1][0].hypot(m[1][1]) { m[0] } else { m[1] };
            let x = if r[0].hypot(r[1]) < 1e-14 { [1.0, 0.0] } else { let h = r[0].hypot(r[1]); [-r[1] / h, r[0] / h] };
            roots[k].push(phi);
            kernels[k].push(x);
        }
    }
    let mut worst: f64 = 0.0;
    for (i, j, _, _) in d.points() {
        let k = d.index(i, j);
        if !d.is_interior(i, j) || roots[k].len() < 2 {
            continue;
        }
        for (r, &phi) in roots[k].iter().enumerate() {
            let x = kernels[k][r];
            let (pu, pv) = match (angle_derivative(&d, &roots, i, j, phi, Axis::U), angle_derivative(&d, &roots, i, j, phi, Axis::V)) {
                (Some(a), Some(b)) => (a, b),
                _ => continue,
            };
            let (mu, nu) = (phi.cos(), phi.sin());
            let dk = (&s0u[k] * mu + &s1u[k] * nu) * x[0] + (&s0v[k] * mu + &s1v[k] * nu) * x[1];
            let lmat = DMatrix::from_columns(&[l.lines[k].s0.clone(), l.lines[k].s1.clone()]);
            let (ab, _) = lstsq(&lmat, &dk);
            let measure = (mu * ab[1] - nu * ab[0] + pu * x[0] + pv * x[1]).abs();
            worst = worst.max(measure);
        }
    }
    Ok(LegendreDupin { dupin: worst < tol && flagged.is_empty(), curvature_sphere_fields: roots, max_measure: worst, flagged, tolerance: tol })
}

/// Angles `φ ∈ [0, π)` with `c₂ cos²φ + c₁ cos φ sin φ + c₀ sin²φ = 0`.
fn homogeneous_roots(c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    use std::f64::consts::PI;
    let wrap = |a: f64| a.rem_euclid(PI);
    // in terms of ψ = 2φ: (c2 + c0)/2 + (c2 − c0)/2 cos ψ + c1/2 sin ψ = 0
    let m = (c2 + c0) / 2.0;
    let (a, b) = ((c2 - c0) / 2.0, c1 / 2.0);
    let r = a.hypot(b);
    if r < 1e-14 || m.abs() > r * (1.0 + 1e-12) {
        return vec![];
    }
    let base = b.atan2(a);
    let delta = (-m / r).clamp(-1.0, 1.0).acos();
    let mut out = vec![wrap((base + delta) / 2.0), wrap((base - delta) / 2.0)];
    out.sort_by(f64::total_cmp);
    if (out[1] - out[0]).abs() < 1e-9 || (out[0] + PI - out[1]).abs() < 1e-9 {
        out.truncate(1);
    }
    out
}

/// Fourth-order derivative of the root field through `(i, j)` with value `phi`,
/// matching neighbours to the nearest root modulo `π`.
fn angle_derivative(d: &ParamDomain, roots: &[Vec<f64>], i: usize, j: usize, phi: f64, axis: Axis) -> Option<f64> {
    use std::f64::consts::PI;
    let (n, h, periodic) = match axis {
        Axis::U => (d.nu, d.step_u(), d.periodic_u),
        Axis::V => (d.nv, d.step_v(), d.periodic_v),
    };
    let at = |o: isize| -> Option<f64> {
        let (ii, jj) = match axis {
            Axis::U => (shift(i, o, n, periodic)?, j),
            Axis::V => (i, shift(j, o, n, periodic)?),
        };
        let rs = &roots[d.index(ii, jj)];
        let mut best: Option<f64> = None;
        for &r in rs {
            let diff = (r - phi + PI / 2.0).rem_euclid(PI) - PI / 2.0;
            if best.is_none_or(|b| diff.abs() < b.abs()) {
                best = Some(diff);
            }
        }
        best
    };
    let (m2, m1, p1, p2) = (at(-2)?, at(-1)?, at(1)?, at(2)?);
    Some((m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h))
}

fn shift(i: usize, o: isize, n: usize, periodic: bool) -> Option<usize> {
    let k = i as isize + o;
    if periodic {
        Some(k.rem_euclid(n as isize) as usize)
    } else if k >= 0 && (k as usize) < n {
        Some(k as usize)
    } else {
        None
    }
}

/// `λ₀` and `λ₁` in `ε` coordinates: the origin line `o = [λ₀, λ₁]`.
pub fn origin_line() -> PencilLine {
    let r = FRAC_1_SQRT_2;
    let l0 = Coords::from_vec(vec![r, 0.0, 0.0, 0.0, 0.0, r]);
    let l1 = Coords::from_vec(vec![0.0, r, 0.0, 0.0, r, 0.0]);
    make_line(l0, l1).expect("the origin is a line")
}

/// Which tangent sphere to lift a surface with.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SphereBranch {
    /// Curvature sphere of the principal curvature `a`.
    A,
    /// Curvature sphere of the principal curvature `c`.
    C,
    /// Tangent sphere with this curvature (`cot r` in the sphere).
    Fixed(f64),
}

/// Legendre lift of a space-form surface: `F` is the point `Y₀` of its
/// first-order Möbius frame and `S = Y₃ + τY₀` the chosen tangent sphere.
pub fn surface_legendre_lift(s: &crate::surface::ParametricSurface, domain: &ParamDomain, branch: SphereBranch) -> Result<LegendreMap> {
    use crate::moebius::{first_order_frame, frame_curvature_scale};
    use crate::space_forms::SpaceForm;
    use crate::surface::principal_frame;
    let form = s.form();
    let scale = frame_curvature_scale(form);
    let p = Metric::moebius().change_matrix();
    let mut f = Vec::with_capacity(domain.len());
    let mut df = Vec::with_capacity(domain.len());
    let mut spheres = Vec::with_capacity(domain.len());
    for (_, _, u, v) in domain.points() {
        let pf = principal_frame(s, u, v)?;
        let y = &p * first_order_frame(form, &pf)?;
        let tau = scale
            * match branch {
                SphereBranch::A => pf.a,
                SphereBranch::C => pf.c,
                SphereBranch::Fixed(k) => k,
            };
        let j = s.jet(u, v);
        let d = |xd: &Coords, x: &Coords| -> Coords {
            let mut out = Coords::zeros(5);
            match form {
                SpaceForm::Sphere => out.rows_mut(0, 4).copy_from(&(xd * FRAC_1_SQRT_2)),
                SpaceForm::Hyperbolic => out.rows_mut(1, 4).copy_from(&(xd * FRAC_1_SQRT_2)),
                SpaceForm::Euclidean => {
                    let mut dd = Coords::zeros(5);
                    dd.rows_mut(1, 3).copy_from(&(xd * std::f64::consts::SQRT_2));
                    dd[4] = 2.0 * x.dot(xd);
                    out = &p * dd;
                }
            }
            out
        };
        f.push(y.column(0).into_owned());
        df.push((d(&j.xu, &j.x), d(&j.xv, &j.x)));
        spheres.push(SphereVec::new(y.column(3) + y.column(0) * tau)?);
    }
    legendre_lift(domain, &f, &df, &spheres)
}
