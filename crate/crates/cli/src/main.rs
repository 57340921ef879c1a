//! `dupin`: generate Dupin surface meshes, orbit surfaces and the boosted
//! coset surface, and run the verification suites.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dupin_core::export::{cmd_fig7, cmd_gen, cmd_orbit, verify, write_atomic, Artifact, Config, Grid, Report, Suite, SurfaceSpec};
use dupin_core::surface::catalog::Projection;

/// Environment variable that overrides the default output directory.
const OUT_ENV: &str = "DUPIN_OUT_DIR";
const DEFAULT_OUT: &str = "dupin-out";

#[derive(Parser, Debug)]
#[command(name = "dupin", version, about = "Dupin surfaces: meshes, orbit surfaces and verification reports")]
struct Cli {
    /// Config file (key = value) with grid sizes and tolerances.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: $DUPIN_OUT_DIR or ./dupin-out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(flatten)]
    tol: TolArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Mesh of a catalog surface.
    Gen(GenArgs),
    /// The orbit surface of the Moebius invariant C.
    Orbit(OrbitArgs),
    /// The surface of the boosted Lie sphere coset.
    Fig7(Fig7Args),
    /// Run a verification suite; exit status 0 iff every check passes.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SurfaceKind {
    Torus,
    Hyperboloid,
    Cylinder,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProjectionArg {
    None,
    Stereo,
    #[value(alias = "hyp_stereo")]
    HypStereo,
}

impl From<ProjectionArg> for Projection {
    fn from(p: ProjectionArg) -> Self {
        match p {
            ProjectionArg::None => Projection::None,
            ProjectionArg::Stereo => Projection::Stereo,
            ProjectionArg::HypStereo => Projection::HypStereo,
        }
    }
}

#[derive(Args, Debug)]
struct GenArgs {
    surface: SurfaceKind,
    /// Torus angle in radians, 0 < alpha <= pi/4.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Hyperboloid parameter, 0 < a < 1.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Cylinder radius.
    #[arg(long, allow_hyphen_values = true)]
    radius: Option<f64>,
    /// Map to R^3 [default: stereo for the torus, hyp-stereo for the hyperboloid, none for the cylinder].
    #[arg(long, value_enum)]
    project: Option<ProjectionArg>,
    /// Parameter grid "NxM" [default: grid from the config].
    #[arg(long)]
    grid: Option<Grid>,
}

#[derive(Args, Debug)]
struct OrbitArgs {
    /// The invariant C.
    #[arg(long = "C", visible_alias = "c", allow_hyphen_values = true)]
    c: f64,
    /// Parameter grid "NxM" [default: grid from the config].
    #[arg(long)]
    grid: Option<Grid>,
}

#[derive(Args, Debug)]
struct Fig7Args {
    /// Boost parameter.
    #[arg(long, allow_hyphen_values = true)]
    t: f64,
    /// Parameter grid "NxM" [default: grid from the config].
    #[arg(long)]
    grid: Option<Grid>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// spaceforms, surfaces, moebius, liesphere, framecalc or all.
    suite: Suite,
}

macro_rules! tol_args {
    ($($field:ident = $flag:literal),* $(,)?) => {
        /// Tolerance overrides; defaults come from the config file.
        #[derive(Args, Debug, Default)]
        struct TolArgs {
            $(
                #[arg(long = $flag, global = true, value_name = "X", help_heading = "Tolerance overrides (defaults in the config file)")]
                $field: Option<f64>,
            )*
        }

        impl TolArgs {
            fn apply(&self, cfg: &mut Config) -> dupin_core::Result<()> {
                $(
                    if let Some(x) = self.$field {
                        cfg.set_tolerance(stringify!($field), x)?;
                    }
                )*
                Ok(())
            }

            #[cfg(test)]
            fn names() -> Vec<&'static str> {
                vec![$(stringify!($field)),*]
            }
        }
    };
}

tol_args! {
    membership = "tol-membership",
    frame_field = "tol-frame-field",
    curvature = "tol-curvature",
    curvature_exact = "tol-curvature-exact",
    curvature_value = "tol-curvature-value",
    iso_analytic = "tol-iso-analytic",
    dupin_analytic = "tol-dupin-analytic",
    iso_fd = "tol-iso-fd",
    dupin_fd = "tol-dupin-fd",
    round_trip = "tol-round-trip",
    rank = "tol-rank",
    frame_order = "tol-frame-order",
    sphere_rank = "tol-sphere-rank",
    contact = "tol-contact",
    lie_exact = "tol-lie-exact",
    quadric = "tol-quadric",
    structure = "tol-structure",
    structure_ratio = "tol-structure-ratio",
    congruence = "tol-congruence",
    cylinder = "tol-cylinder",
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn write_report(dir: &Path, name: &str, report: &Report) -> Result<PathBuf> {
    let path = dir.join(format!("{name}.json"));
    write_atomic(&path, report.to_json().as_bytes()).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn write_artifact(dir: &Path, a: &Artifact) -> Result<()> {
    let obj = dir.join(format!("{}.obj", a.name));
    write_atomic(&obj, a.mesh.to_obj(&a.name).as_bytes()).with_context(|| format!("writing {}", obj.display()))?;
    let json = write_report(dir, &a.name, &a.report)?;
    println!("mesh    {} ({} vertices, {} faces, {} flagged)", obj.display(), a.mesh.vertices.len(), a.mesh.faces.len(), a.mesh.flagged.len());
    println!("report  {}", json.display());
    Ok(())
}

fn summarize(report: &Report) {
    for c in &report.checks {
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        match c.expected {
            Some(e) => println!("{verdict} {} = {:.9} (expected {e:.9}, tol {:.1e})", c.name, c.value, c.tolerance),
            None => println!("{verdict} {} = {:.3e} (tol {:.1e})", c.name, c.value, c.tolerance),
        }
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
}

fn gen_spec(g: &GenArgs) -> Result<SurfaceSpec> {
    let need = |v: Option<f64>, flag: &str| v.with_context(|| format!("--{flag} is required for this surface"));
    Ok(match g.surface {
        SurfaceKind::Torus => SurfaceSpec::Torus { alpha: need(g.alpha, "alpha")? },
        SurfaceKind::Hyperboloid => SurfaceSpec::Hyperboloid { a: need(g.a, "a")? },
        SurfaceKind::Cylinder => SurfaceSpec::Cylinder { radius: g.radius.unwrap_or(1.0) },
    })
}

fn run(cli: Cli) -> Result<bool> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p).with_context(|| format!("reading config {}", p.display()))?,
        None => Config::default(),
    };
    cli.tol.apply(&mut cfg)?;
    let dir = out_dir(cli.out);
    let artifact = match cli.cmd {
        Cmd::Gen(g) => {
            let spec = gen_spec(&g)?;
            let proj = g.project.map(Projection::from).unwrap_or_else(|| spec.natural_projection());
            cmd_gen(spec, proj, g.grid.unwrap_or(cfg.grid), &cfg)?
        }
        Cmd::Orbit(o) => cmd_orbit(o.c, o.grid.unwrap_or(cfg.grid), &cfg)?,
        Cmd::Fig7(f) => cmd_fig7(f.t, f.grid.unwrap_or(cfg.grid), &cfg)?,
        Cmd::Verify(v) => {
            let report = verify(v.suite, &cfg);
            summarize(&report);
            let path = write_report(&dir, &format!("verify_{}", v.suite.name()), &report)?;
            println!("report  {}", path.display());
            println!("{}", if report.passed { "all checks passed" } else { "some checks FAILED" });
            return Ok(report.passed);
        }
    };
    summarize(&artifact.report);
    write_artifact(&dir, &artifact)?;
    Ok(artifact.report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn every_config_tolerance_has_a_flag() {
        let mut have: Vec<String> = TolArgs::names().into_iter().map(String::from).collect();
        let mut want = Config::tolerance_names();
        have.sort();
        want.sort();
        assert_eq!(have, want);
    }

    #[test]
    fn parse_examples() {
        let c = Cli::try_parse_from(["dupin", "orbit", "--C", "-0.5", "--grid", "16x16"]).unwrap();
        assert!(matches!(c.cmd, Cmd::Orbit(OrbitArgs { c, .. }) if c == -0.5));
        let c = Cli::try_parse_from(["dupin", "gen", "torus", "--alpha", "0.7853981634", "--project", "stereo", "--tol-rank", "1e-6"]).unwrap();
        assert_eq!(c.tol.rank, Some(1e-6));
        assert!(Cli::try_parse_from(["dupin", "verify", "nothing"]).is_err());
        assert!(Cli::try_parse_from(["dupin", "fig7", "--t", "1", "--grid", "12"]).is_err());
    }
}
