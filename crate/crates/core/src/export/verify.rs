//! Verification suites: the properties each module is expected to satisfy,
//! evaluated at the configured grid sizes and tolerances.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, PI};
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::export::config::Config;
use crate::export::report::{Check, Report};
use crate::frames::{congruence_test, cylinder_distribution, integrate_mc, pullback_mc, structure_residual, FrameField, GroupKind, MCForm};
use crate::lie_sphere::{
    best_lie_frame_check, boost, contact_residual, coset_orbit, example_frame_field, example_lambda, fig7_domain, fig7_pipeline_with, h_basis,
    legendre_dupin_test, sigma_rank, surface_legendre_lift, Slice, SphereBranch,
};
use crate::linalg::{Coords, Mat, Metric};
use crate::moebius::{
    fit_cylinder, frame_order_check_with, hc_basis, hc_orbit, moebius_best_frame, sphere_map_dupin_test, sphere_to_vec, vec_to_sphere, OrientedSphere,
    SphereVec,
};
use crate::space_forms::{hyp_stereo_coords, hyp_stereo_inv_coords, moebius_lift, stereo_coords, stereo_inv_coords, SpaceForm};
use crate::surface::catalog::{cylinder, default_domain, hyperboloid, pushforward, torus, warped_torus, Projection};
use crate::surface::classify::{classify, ClassifyOptions};
use crate::surface::domain::ParamDomain;
use crate::surface::euclidean_best_frame;

/// Seed of the random samples drawn by the suites.
pub const SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Spaceforms,
    Surfaces,
    Moebius,
    Liesphere,
    Framecalc,
    All,
}

impl Suite {
    pub const MODULES: [Suite; 5] = [Suite::Spaceforms, Suite::Surfaces, Suite::Moebius, Suite::Liesphere, Suite::Framecalc];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Spaceforms => "spaceforms",
            Suite::Surfaces => "surfaces",
            Suite::Moebius => "moebius",
            Suite::Liesphere => "liesphere",
            Suite::Framecalc => "framecalc",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::MODULES
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown suite '{s}' (expected spaceforms, surfaces, moebius, liesphere, framecalc or all)")))
    }
}

/// Run a suite. Failures inside a computation become failed checks, so the
/// report always covers the whole suite.
pub fn verify(suite: Suite, cfg: &Config) -> Report {
    let mut r = Report::new("verify");
    r.param("suite", suite.name()).param("grid", cfg.grid.to_string()).param("fine_grid", cfg.fine_grid.to_string()).param("seed", SEED);
    let run = |s: Suite| match s {
        Suite::Spaceforms => spaceforms(cfg),
        Suite::Surfaces => surfaces(cfg),
        Suite::Moebius => moebius(cfg),
        Suite::Liesphere => liesphere(cfg),
        Suite::Framecalc => framecalc(cfg),
        Suite::All => unreachable!(),
    };
    match suite {
        Suite::All => {
            for s in Suite::MODULES {
                r.absorb(s.name(), run(s));
            }
        }
        s => {
            r.absorb(s.name(), run(s));
        }
    }
    r
}

/// Record the checks produced by `f`, or one failed check named `name`.
fn attempt(r: &mut Report, name: &str, f: impl FnOnce(&mut Report) -> Result<()>) {
    let mut inner = Report::new(name);
    match f(&mut inner) {
        Ok(()) => {
            for c in inner.checks {
                r.check(c);
            }
            r.warnings.extend(inner.warnings);
            r.details.extend(inner.details);
        }
        Err(e) => {
            r.check(Check::failed(name, e));
        }
    }
}

fn unit(rng: &mut StdRng, n: usize) -> Coords {
    loop {
        let v = Coords::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let l = v.norm();
        if l > 0.1 && l <= 1.0 {
            return v / l;
        }
    }
}

fn spaceforms(cfg: &Config) -> Report {
    let mut r = Report::new("spaceforms");
    let mut rng = StdRng::seed_from_u64(SEED);
    attempt(&mut r, "sphere_round_trip", |r| {
        let (mut worst, mut cot) = (0.0f64, 0.0f64);
        for _ in 0..1000 {
            let m = unit(&mut rng, 4);
            let rad = rng.random_range(0.01..PI - 0.01);
            let s = OrientedSphere::new(m.as_slice(), rad)?;
            let v = sphere_to_vec(&s);
            let back = vec_to_sphere(&v);
            worst = worst.max((back.center() - s.center()).amax()).max((back.radius() - rad).abs());
            cot = cot.max((v.coords()[4] - rad.cos() / rad.sin()).abs());
        }
        r.check(Check::below("sphere_round_trip", worst, cfg.tol_round_trip));
        r.check(Check::below("cot_r_equals_s4", cot, cfg.tol_round_trip));
        Ok(())
    });
    attempt(&mut r, "stereo_round_trip", |r| {
        let (mut s, mut h, mut null) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..200 {
            let x = unit(&mut rng, 4);
            if x[0] < -0.9 {
                continue;
            }
            s = s.max((stereo_inv_coords(&stereo_coords(&x)?) - &x).amax());
            let y = unit(&mut rng, 3) * rng.random_range(0.0..0.9);
            h = h.max((hyp_stereo_coords(&hyp_stereo_inv_coords(&y)?) - &y).amax());
            null = null.max(Metric::conformal().inner_coords(&moebius_lift(SpaceForm::Sphere, &x), &moebius_lift(SpaceForm::Sphere, &x)).abs());
        }
        r.check(Check::below("stereo_round_trip", s, 1e-12));
        r.check(Check::below("hyp_stereo_round_trip", h, 1e-12));
        r.check(Check::below("lift_on_null_cone", null, 1e-12));
        Ok(())
    });
    r
}

/// Max of `f(a, c)` over a small sample grid of `s`.
fn over_samples(s: &crate::surface::ParametricSurface, f: impl Fn(f64, f64) -> f64) -> Result<f64> {
    let d = default_domain(s, 8, 8)?;
    let mut worst: f64 = 0.0;
    for (_, _, u, v) in d.points() {
        let k = s.curvature(u, v)?;
        worst = worst.max(f(k.a, k.c));
    }
    Ok(worst)
}

fn surfaces(cfg: &Config) -> Report {
    let mut r = Report::new("surfaces");
    attempt(&mut r, "torus_ac_plus_1", |r| {
        let mut w: f64 = 0.0;
        for k in 1..=20 {
            w = w.max(over_samples(&torus(k as f64 * FRAC_PI_4 / 20.0)?, |a, c| (a * c + 1.0).abs())?);
        }
        r.check(Check::below("torus_ac_plus_1", w, cfg.tol_curvature));
        Ok(())
    });
    attempt(&mut r, "hyperboloid_ac_minus_1", |r| {
        let mut w: f64 = 0.0;
        for k in 1..=20 {
            w = w.max(over_samples(&hyperboloid(k as f64 / 21.0)?, |a, c| (a * c - 1.0).abs())?);
        }
        r.check(Check::below("hyperboloid_ac_minus_1", w, cfg.tol_curvature));
        Ok(())
    });
    attempt(&mut r, "cylinder_ac", |r| {
        let (mut w, mut wc): (f64, f64) = (0.0, 0.0);
        for rad in [0.5, 1.0, 2.0, 3.5] {
            let s = cylinder(rad)?;
            w = w.max(over_samples(&s, |a, c| (a * c).abs())?);
            wc = wc.max(over_samples(&s, |_, c| (c - 1.0 / rad).abs())?);
        }
        r.check(Check::below("cylinder_ac", w, cfg.tol_curvature_exact));
        r.check(Check::below("cylinder_c_inv_radius", wc, cfg.tol_curvature));
        Ok(())
    });
    attempt(&mut r, "torus_pi6_values", |r| {
        let k = torus(FRAC_PI_6)?.curvature(0.7, -1.3)?;
        r.check(Check::near("torus_pi6_a", k.a, -FRAC_PI_6.tan(), cfg.tol_curvature_value));
        r.check(Check::near("torus_pi6_c", k.c, 1.0 / FRAC_PI_6.tan(), cfg.tol_curvature_value));
        Ok(())
    });
    attempt(&mut r, "figure1", |r| {
        let s = pushforward(&torus(FRAC_PI_4)?, Projection::Stereo)?;
        let d = default_domain(&s, cfg.fine_grid.nu, cfg.fine_grid.nv)?;
        let c = classify(&s, &d, &ClassifyOptions { iso_tol: cfg.tol_iso_fd, dupin_tol: cfg.tol_dupin_fd, arc_step: 1e-3 })?;
        r.check(Check::holds("figure1_not_isoparametric", !c.isoparametric));
        r.check(Check::below("figure1_curvature_line_derivative", c.max_da.max(c.max_dc), cfg.tol_dupin_fd));
        r.check(Check::holds("figure1_dupin", c.dupin == Some(true)));
        Ok(())
    });
    attempt(&mut r, "warped_torus", |r| {
        let s = warped_torus(2.0, 1.0, 0.1)?;
        let d = default_domain(&s, cfg.grid.nu, cfg.grid.nv)?;
        let c = classify(&s, &d, &ClassifyOptions::for_surface(&s))?;
        r.check(Check::holds("warped_torus_not_dupin", c.dupin == Some(false)));
        Ok(())
    });
    r
}

fn moebius(cfg: &Config) -> Report {
    let mut r = Report::new("moebius");
    let cases: [(&str, crate::surface::ParametricSurface, (f64, f64), f64); 4] = [
        ("torus_pi4", torus(FRAC_PI_4).expect("valid"), (0.3, 1.1), 0.0),
        ("torus_pi6", torus(FRAC_PI_6).expect("valid"), (0.3, 1.1), 0.5),
        ("cylinder_1", cylinder(1.0).expect("valid"), (0.3, 0.2), 1.0),
        ("hyperboloid_half", hyperboloid(0.5).expect("valid"), (0.3, 0.2), 5.0 / 3.0),
    ];
    for (name, s, center, want) in cases {
        attempt(&mut r, &format!("invariant_{name}"), |r| {
            let d = ParamDomain::patch(center, 4e-3, 9)?;
            let c = frame_order_check_with(&moebius_best_frame(&s, &d)?, cfg.tol_frame_order)?;
            r.check(Check::near(format!("C_{name}"), c.coefficients.c, want, cfg.tol_frame_order));
            r.check(Check::below(format!("q_{name}"), c.max_q, cfg.tol_frame_order));
            r.check(Check::below(format!("p2_{name}"), c.max_p2, cfg.tol_frame_order));
            r.check(Check::below(format!("p1_p3_plus_1_{name}"), c.trace_residual, cfg.tol_frame_order));
            Ok(())
        });
    }
    for c in [0.0, 0.5, 1.0, 5.0 / 3.0] {
        let b = hc_basis(c);
        r.check(Check::near(format!("hC_dimension_C{c:.4}"), b.dimension() as f64, 2.0, 0.5));
        r.check(Check::below(format!("hC_closure_C{c:.4}"), b.closure_residual, cfg.tol_membership));
    }
    attempt(&mut r, "cylinder_orbit", |r| {
        let d = ParamDomain::new((-1.0, 1.0), (-2.0, 2.0), 9, 9, false, false)?;
        let o = hc_orbit(1.0, &d)?;
        let pts: Vec<Coords> = o.chart_points.iter().flatten().cloned().collect();
        r.check(Check::below("cylinder_orbit_axis_distance", fit_cylinder(&pts)?.max_unit_deviation, cfg.tol_cylinder));
        Ok(())
    });
    attempt(&mut r, "curvature_sphere_maps", |r| {
        let m = Metric::moebius();
        let d = ParamDomain::new((0.0, 1.0), (0.0, 1.0), 33, 33, false, false)?;
        let mut ok = true;
        for c in [0.0, 0.5, 1.0, 5.0 / 3.0] {
            let o = hc_orbit(c, &d)?;
            for sign in [1.0, -1.0] {
                let maps = o.frames.iter().map(|f| SphereVec::new(m.change_matrix() * (f.column(3) + f.column(0) * sign))).collect::<Result<Vec<_>>>()?;
                let t = sphere_map_dupin_test(&d, &maps, None, cfg.tol_sphere_rank)?;
                ok &= t.dupin && !t.degenerate;
            }
        }
        r.check(Check::holds("orbit_curvature_sphere_maps_dupin", ok));
        Ok(())
    });
    r
}

fn liesphere(cfg: &Config) -> Report {
    let mut r = Report::new("liesphere");
    let grid = ParamDomain::torus(cfg.grid.nu, cfg.grid.nv);
    attempt(&mut r, "example", |r| {
        let d = grid.clone()?;
        let l = example_lambda(&d)?;
        r.check(Check::below("example_contact", contact_residual(&l), cfg.tol_lie_exact));
        let q = l.lines.iter().map(|x| x.max_residual()).fold(0.0, f64::max);
        r.check(Check::below("example_quadric", q, cfg.tol_quadric));
        let sig = sigma_rank(&l)?.into_iter().fold(0.0, f64::max);
        r.check(Check::below("example_sigma_rank", sig, cfg.tol_lie_exact));
        let t = legendre_dupin_test(&l, cfg.tol_dupin_fd)?;
        r.check(Check::holds("example_dupin", t.dupin));
        Ok(())
    });
    let h = h_basis();
    r.check(Check::near("h_dimension", h.dimension() as f64, 6.0, 0.5));
    r.check(Check::below("h_closure", h.closure_residual, cfg.tol_membership));
    attempt(&mut r, "example_best_frame", |r| {
        let d = ParamDomain::patch((0.4, 1.3), 1e-2, 9)?;
        let c = best_lie_frame_check(&example_frame_field(&d)?)?;
        let worst = c.orders.first.max(c.orders.second).max(c.orders.third);
        r.check(Check::below("example_best_frame_orders", worst, cfg.tol_frame_field));
        Ok(())
    });
    let b = boost(0.7);
    let mut want = Mat::identity(6, 6);
    want[(0, 0)] = 0.7f64.exp();
    want[(5, 5)] = (-0.7f64).exp();
    r.check(Check::below("boost_diagonal", (b - want).amax(), 1e-12));
    attempt(&mut r, "identity_coset", |r| {
        let d = grid.clone()?;
        let o = coset_orbit(&Mat::identity(6, 6), &d, Slice::Compact)?;
        r.check(Check::below("identity_coset_contact", contact_residual(&o.map), cfg.tol_contact));
        let sig = sigma_rank(&o.map)?.into_iter().fold(0.0, f64::max);
        r.check(Check::below("identity_coset_sigma_rank", sig, cfg.tol_sphere_rank));
        Ok(())
    });
    attempt(&mut r, "fig7", |r| {
        let d = fig7_domain(cfg.grid.nu, cfg.grid.nv)?;
        let f1 = fig7_pipeline_with(1.0, &d, cfg.tol_rank)?;
        r.check(Check::above("fig7_t1_singular_count", f1.singular.len() as f64, 0.0));
        r.check(Check::below("fig7_t1_singular_finite", f1.singular.len() as f64, d.len() as f64));
        let f0 = fig7_pipeline_with(0.0, &d, cfg.tol_rank)?;
        r.check(Check::holds("fig7_t0_degenerate", f0.degenerate));
        Ok(())
    });
    attempt(&mut r, "lifts", |r| {
        let fig1 = pushforward(&torus(FRAC_PI_4)?, Projection::Stereo)?;
        let d = default_domain(&fig1, cfg.grid.nu, cfg.grid.nv)?;
        let l = surface_legendre_lift(&fig1, &d, SphereBranch::A)?;
        r.check(Check::below("figure1_lift_contact", contact_residual(&l), cfg.tol_contact));
        r.check(Check::holds("figure1_lift_dupin", legendre_dupin_test(&l, cfg.tol_dupin_fd)?.dupin));
        let w = warped_torus(2.0, 1.0, 0.1)?;
        let d = default_domain(&w, cfg.grid.nu, cfg.grid.nv)?;
        let l = surface_legendre_lift(&w, &d, SphereBranch::A)?;
        r.check(Check::holds("warped_lift_not_dupin", !legendre_dupin_test(&l, cfg.tol_dupin_fd)?.dupin));
        Ok(())
    });
    r
}

/// Structure residual of the Euclidean best frame of the Figure-1 surface.
pub fn figure1_structure_residual(nu: usize, nv: usize) -> Result<f64> {
    let s = pushforward(&torus(FRAC_PI_4)?, Projection::Stereo)?;
    let d = default_domain(&s, nu, nv)?;
    Ok(structure_residual(&pullback_mc(&euclidean_best_frame(&s, &d)?.field)?))
}

/// Integrate the cylinder distribution (`a = 1`) and return the worst
/// `|x² + (z − 1)² − 1|` over the frame origins.
pub fn cylinder_distribution_residual(nu: usize, nv: usize) -> Result<f64> {
    let (x, y) = cylinder_distribution(1.0);
    let d = ParamDomain::new((0.0, 2.0 * PI), (-1.0, 1.0), nu, nv, false, false)?;
    let e = integrate_mc(&MCForm::constant(d, GroupKind::Euclidean3, &x, &y), &Mat::identity(4, 4))?;
    Ok(e.field.mats().iter().map(|m| (m[(1, 0)].powi(2) + (m[(3, 0)] - 1.0).powi(2) - 1.0).abs()).fold(0.0, f64::max))
}

/// `exp` of the `E(3)` algebra element with rotation vector `w` and translation part `t`.
fn motion(w: [f64; 3], t: [f64; 3]) -> Mat {
    let mut x = Mat::zeros(4, 4);
    for i in 0..3 {
        x[(i + 1, 0)] = t[i];
    }
    x[(2, 3)] = -w[0];
    x[(3, 2)] = w[0];
    x[(3, 1)] = -w[1];
    x[(1, 3)] = w[1];
    x[(1, 2)] = -w[2];
    x[(2, 1)] = w[2];
    crate::linalg::expm(&x)
}

/// Integrate the pulled-back form of a frame field from two base elements
/// and return the congruence deviation.
pub fn double_integration_deviation(nu: usize, nv: usize, tol: f64) -> Result<(bool, f64)> {
    let s = cylinder(1.0)?;
    let d = default_domain(&s, nu, nv)?;
    let w = pullback_mc(&euclidean_best_frame(&s, &d)?.field)?;
    let a = integrate_mc(&w, &Mat::identity(4, 4))?;
    let g0 = motion([0.3, -0.2, 1.1], [0.5, -1.0, 2.0]);
    let b = integrate_mc(&w, &g0)?;
    let c = congruence_test(&a.field, &b.field, tol)?;
    Ok((c.congruent, c.deviation))
}

fn framecalc(cfg: &Config) -> Report {
    let mut r = Report::new("framecalc");
    attempt(&mut r, "structure", |r| {
        let coarse = figure1_structure_residual(cfg.grid.nu, cfg.grid.nv)?;
        let fine = figure1_structure_residual(cfg.fine_grid.nu, cfg.fine_grid.nv)?;
        r.check(Check::below("figure1_structure_residual", coarse, cfg.tol_structure));
        r.check(Check::above("figure1_structure_refinement_ratio", coarse / fine, cfg.tol_structure_ratio));
        Ok(())
    });
    attempt(&mut r, "cylinder_distribution", |r| {
        r.check(Check::below("cylinder_distribution_circle", cylinder_distribution_residual(cfg.grid.nu, 9)?, cfg.tol_cylinder));
        Ok(())
    });
    attempt(&mut r, "congruence", |r| {
        let (ok, dev) = double_integration_deviation(cfg.grid.nu, 9, cfg.tol_congruence)?;
        r.check(Check::below("double_integration_deviation", dev, cfg.tol_congruence));
        r.check(Check::holds("double_integration_congruent", ok));
        Ok(())
    });
    attempt(&mut r, "left_invariance", |r| {
        let s = cylinder(1.0)?;
        let d = default_domain(&s, 24, 9)?;
        let e = euclidean_best_frame(&s, &d)?.field;
        let g0 = motion([1.0, 0.4, -0.7], [3.0, 0.0, -1.0]);
        let moved = FrameField::new(d, GroupKind::Euclidean3, e.mats().iter().map(|m| &g0 * m).collect())?;
        let dist = pullback_mc(&moved)?.distance(&pullback_mc(&e)?, false);
        r.check(Check::below("left_invariance", dist, 1e-9));
        Ok(())
    });
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names() {
        for s in Suite::MODULES {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn spaceforms_suite_passes() {
        let r = verify(Suite::Spaceforms, &Config::default());
        assert!(r.passed, "{}", r.to_json());
        assert!(r.get("spaceforms.sphere_round_trip").is_some());
    }
}
