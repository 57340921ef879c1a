//! The `gen`, `orbit` and `fig7` pipelines: a mesh plus a report.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::export::config::{Config, Grid};
use crate::export::mesh::Mesh;
use crate::export::report::{Check, Report};
use crate::lie_sphere::{fig7_domain, fig7_pipeline_with};
use crate::linalg::Coords;
use crate::moebius::{fit_cylinder, frame_order_check_with, hc_default_domain, hc_orbit, Regime};
use crate::space_forms::{hyp_stereo_coords, stereo_coords, SpaceForm};
use crate::surface::catalog::{cylinder, default_domain, hyperboloid, pushforward, torus, Projection};
use crate::surface::classify::{classify, ClassifyOptions};
use crate::surface::domain::ParamDomain;
use crate::surface::ParametricSurface;

/// The three surfaces `gen` knows.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "surface", rename_all = "snake_case")]
pub enum SurfaceSpec {
    Torus { alpha: f64 },
    Hyperboloid { a: f64 },
    Cylinder { radius: f64 },
}

impl SurfaceSpec {
    pub fn build(&self) -> Result<ParametricSurface> {
        match *self {
            SurfaceSpec::Torus { alpha } => torus(alpha),
            SurfaceSpec::Hyperboloid { a } => hyperboloid(a),
            SurfaceSpec::Cylinder { radius } => cylinder(radius),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SurfaceSpec::Torus { .. } => "torus",
            SurfaceSpec::Hyperboloid { .. } => "hyperboloid",
            SurfaceSpec::Cylinder { .. } => "cylinder",
        }
    }

    /// The projection that lands the surface in `R³`.
    pub fn natural_projection(&self) -> Projection {
        match self {
            SurfaceSpec::Torus { .. } => Projection::Stereo,
            SurfaceSpec::Hyperboloid { .. } => Projection::HypStereo,
            SurfaceSpec::Cylinder { .. } => Projection::None,
        }
    }
}

/// Output of a command: the mesh to write and its report.
#[derive(Clone, Debug)]
pub struct Artifact {
    pub name: String,
    pub mesh: Mesh,
    pub report: Report,
}

fn domain_for(s: &ParametricSurface, grid: Grid) -> Result<ParamDomain> {
    default_domain(s, grid.nu, grid.nv)
}

/// Sample a catalog surface, push it to `R³` and check the curvature
/// identity of its space form together with its Dupin classification.
pub fn cmd_gen(spec: SurfaceSpec, projection: Projection, grid: Grid, cfg: &Config) -> Result<Artifact> {
    let src = spec.build()?;
    if projection == Projection::None && src.form() != SpaceForm::Euclidean {
        return Err(Error::Invalid(format!("{} lives in {:?}; use --project {}", spec.name(), src.form(), match src.form() {
            SpaceForm::Sphere => "stereo",
            _ => "hyp_stereo",
        })));
    }
    let out = pushforward(&src, projection)?;
    let d = domain_for(&src, grid)?;
    let mut points = Vec::with_capacity(d.len());
    let mut scalars = Vec::with_capacity(d.len());
    let mut worst_identity: f64 = 0.0;
    let mut worst_c: f64 = 0.0;
    for (_, _, u, v) in d.points() {
        let x = out.position(u, v);
        points.push(x.iter().all(|c| c.is_finite()).then_some(x));
        let k = src.curvature(u, v)?;
        scalars.push([k.a, k.c]);
        let ac = k.a * k.c;
        match spec {
            SurfaceSpec::Torus { .. } => worst_identity = worst_identity.max((ac + 1.0).abs()),
            SurfaceSpec::Hyperboloid { .. } => worst_identity = worst_identity.max((ac - 1.0).abs()),
            SurfaceSpec::Cylinder { radius } => {
                worst_identity = worst_identity.max(ac.abs());
                worst_c = worst_c.max((k.c - 1.0 / radius).abs());
            }
        }
    }
    let mesh = Mesh::from_grid(&d, &points, &[])?.with_grid_scalars(&scalars)?;
    let mut r = Report::new("gen");
    r.param("surface", spec).param("projection", projection).param("grid", grid.to_string());
    match spec {
        SurfaceSpec::Torus { .. } => r.check(Check::below("max_abs_ac_plus_1", worst_identity, cfg.tol_curvature)),
        SurfaceSpec::Hyperboloid { .. } => r.check(Check::below("max_abs_ac_minus_1", worst_identity, cfg.tol_curvature)),
        SurfaceSpec::Cylinder { .. } => {
            r.check(Check::below("max_abs_ac", worst_identity, cfg.tol_curvature_exact));
            r.check(Check::below("max_abs_c_minus_inv_radius", worst_c, cfg.tol_curvature))
        }
    };
    let opts = ClassifyOptions { iso_tol: cfg.tol_iso_analytic, dupin_tol: cfg.tol_dupin_analytic, arc_step: 1e-3 };
    let cls = classify(&out, &d, &opts)?;
    r.check(Check::holds("dupin", cls.dupin == Some(true)).with_note(format!("max curvature-line derivative {:.3e}", cls.max_da.max(cls.max_dc))));
    r.detail("classification", &cls);
    r.detail("vertices", mesh.vertices.len()).detail("faces", mesh.faces.len()).detail("flagged", &mesh.flagged);
    Ok(Artifact { name: format!("{}_{}", spec.name(), projection_name(projection)), mesh, report: r })
}

fn projection_name(p: Projection) -> &'static str {
    match p {
        Projection::None => "none",
        Projection::Stereo => "stereo",
        Projection::HypStereo => "hyp_stereo",
    }
}

/// To `R³` from the regime's space form.
fn to_r3(form: SpaceForm, x: &Coords) -> Option<Coords> {
    match form {
        SpaceForm::Euclidean => Some(x.clone()),
        SpaceForm::Sphere => stereo_coords(x).ok(),
        SpaceForm::Hyperbolic => Some(hyp_stereo_coords(x)),
    }
}

/// The orbit `H_C[δ₀]` pulled back to its space form and projected to `R³`.
pub fn cmd_orbit(c: f64, grid: Grid, cfg: &Config) -> Result<Artifact> {
    if !c.is_finite() {
        return Err(Error::Invalid(format!("C must be finite, got {c}")));
    }
    let d = hc_default_domain(c, grid.nu, grid.nv)?;
    let o = hc_orbit(c, &d)?;
    let form = o.regime.chart();
    let points: Vec<Option<Coords>> = o.chart_points.iter().map(|p| p.as_ref().and_then(|x| to_r3(form, x))).collect();
    let mesh = Mesh::from_grid(&d, &points, &o.flagged)?;
    let mut r = Report::new("orbit");
    r.param("C", c).param("grid", grid.to_string());
    r.detail("regime", o.regime).detail("chart", form).detail("closed", (d.periodic_u, d.periodic_v));
    // C recovered from the best frame on a small patch
    let (s0, t0) = d.point(d.index(d.nu / 3, d.nv / 3));
    let patch = ParamDomain::patch((s0, t0), 4e-3, 9)?;
    match hc_orbit(c, &patch).and_then(|p| p.frame_field()).and_then(|f| frame_order_check_with(&f, cfg.tol_frame_order)) {
        Ok(chk) => {
            r.check(Check::near("invariant_C", chk.coefficients.c, c, cfg.tol_frame_order));
            r.check(Check::holds("dupin", chk.dupin));
        }
        Err(e) => {
            r.check(Check::failed("invariant_C", e));
        }
    }
    if o.regime == Regime::Cylinder {
        let pts: Vec<Coords> = o.chart_points.iter().flatten().cloned().collect();
        let fit = fit_cylinder(&pts)?;
        r.check(Check::below("cylinder_unit_radius", fit.max_unit_deviation, cfg.tol_cylinder));
        r.detail("cylinder_fit", &fit);
    }
    if !o.flagged.is_empty() {
        r.warn(format!("{} grid points leave the chart and are omitted", o.flagged.len()));
    }
    r.detail("vertices", mesh.vertices.len()).detail("faces", mesh.faces.len()).detail("flagged", &mesh.flagged);
    Ok(Artifact { name: format!("orbit_C{c}"), mesh, report: r })
}

/// The Figure-7 surface: spherical projection of `boost(t) H o` followed by
/// stereographic projection, singular points flagged.
pub fn cmd_fig7(t: f64, grid: Grid, cfg: &Config) -> Result<Artifact> {
    if !t.is_finite() {
        return Err(Error::Invalid(format!("t must be finite, got {t}")));
    }
    let d = fig7_domain(grid.nu, grid.nv)?;
    let f = fig7_pipeline_with(t, &d, cfg.tol_rank)?;
    let mesh = Mesh::from_grid(&d, &f.points, &f.singular)?;
    let mut r = Report::new("fig7");
    r.param("t", t).param("grid", grid.to_string());
    let cells: Vec<(usize, usize)> = f.singular.iter().map(|&k| d.ij(k)).collect();
    r.detail("slice", crate::lie_sphere::Slice::Compact).detail("singular_points", &cells).detail("pole", &f.pole).detail("degenerate", f.degenerate).detail("max_rank_ratio", f.max_rank_ratio);
    if f.degenerate {
        r.warn("degenerate: the spherical projection has rank at most 1 everywhere (a great circle)");
        r.check(Check::holds("degenerate_image", true));
    } else {
        r.check(Check::above("singular_count", f.singular.len() as f64, 0.0));
        r.check(Check::below("singular_count_finite", f.singular.len() as f64, d.len() as f64));
    }
    r.detail("vertices", mesh.vertices.len()).detail("faces", mesh.faces.len());
    Ok(Artifact { name: format!("fig7_t{t}"), mesh, report: r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn g(n: usize) -> Grid {
        Grid { nu: n, nv: n }
    }

    #[test]
    fn gen_figures() {
        let cfg = Config::default();
        let a = cmd_gen(SurfaceSpec::Torus { alpha: FRAC_PI_4 }, Projection::Stereo, g(24), &cfg).unwrap();
        assert!(a.report.passed, "{}", a.report.to_json());
        assert_eq!(a.mesh.vertices.len(), 24 * 24);
        let b = cmd_gen(SurfaceSpec::Hyperboloid { a: 0.5 }, Projection::HypStereo, g(24), &cfg).unwrap();
        assert!(b.report.passed, "{}", b.report.to_json());
        let c = cmd_gen(SurfaceSpec::Cylinder { radius: 1.0 }, Projection::None, g(16), &cfg).unwrap();
        assert!(c.report.passed);
        assert!(cmd_gen(SurfaceSpec::Torus { alpha: FRAC_PI_4 }, Projection::None, g(16), &cfg).is_err());
        assert!(cmd_gen(SurfaceSpec::Torus { alpha: 2.0 }, Projection::Stereo, g(16), &cfg).is_err());
    }

    #[test]
    fn orbit_regimes() {
        let cfg = Config::default();
        for (c, want) in [(0.0, Regime::Torus), (1.0, Regime::Cylinder), (1.6667, Regime::Hyperboloid)] {
            let a = cmd_orbit(c, g(16), &cfg).unwrap();
            assert_eq!(a.report.details["regime"], serde_json::to_value(want).unwrap());
            assert!(a.report.passed, "{}", a.report.to_json());
        }
    }

    #[test]
    fn fig7_flags() {
        let cfg = Config::default();
        let a = cmd_fig7(1.0, g(32), &cfg).unwrap();
        let n = a.report.details["singular_points"].as_array().unwrap().len();
        assert!(n > 0 && a.report.passed);
        assert_eq!(a.mesh.vertices.len(), 32 * 32 - n);
        let b = cmd_fig7(0.0, g(32), &cfg).unwrap();
        assert_eq!(b.report.details["degenerate"], true);
        assert!(!b.report.warnings.is_empty());
    }
}
