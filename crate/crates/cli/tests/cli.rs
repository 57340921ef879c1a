//! End-to-end runs of the `dupin` binary.

use std::path::Path;
use std::process::{Command, Output};

fn dupin(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dupin")).args(args).arg("--out").arg(out).env_remove("DUPIN_OUT_DIR").output().expect("binary runs")
}

fn load_obj(path: &Path) -> (usize, usize) {
    let (models, _) = tobj::load_obj(path, &tobj::LoadOptions { triangulate: false, single_index: true, ..Default::default() }).expect("tobj parses the mesh");
    let m = &models[0].mesh;
    let faces = if m.face_arities.is_empty() { m.indices.len() / 3 } else { m.face_arities.len() };
    (m.positions.len() / 3, faces)
}

fn report(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gen_figure_meshes_round_trip_through_tobj() {
    let dir = tempfile::tempdir().unwrap();
    let o = dupin(dir.path(), &["gen", "torus", "--alpha", "0.7853981634", "--project", "stereo", "--grid", "24x20"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let (v, f) = load_obj(&dir.path().join("torus_stereo.obj"));
    assert_eq!((v, f), (24 * 20, 24 * 20));
    let r = report(&dir.path().join("torus_stereo.json"));
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["passed"], true);

    let o = dupin(dir.path(), &["gen", "hyperboloid", "--a", "0.5", "--project", "hyp-stereo", "--grid", "16x16"]);
    assert!(o.status.success());
    // open in v: 16 × 15 cells
    assert_eq!(load_obj(&dir.path().join("hyperboloid_hyp_stereo.obj")), (256, 16 * 15));

    let o = dupin(dir.path(), &["gen", "cylinder", "--radius", "1", "--grid", "8x8"]);
    assert!(o.status.success());
    assert_eq!(load_obj(&dir.path().join("cylinder_none.obj")).0, 64);
}

#[test]
fn bad_parameters_fail_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let o = dupin(dir.path(), &["gen", "torus", "--alpha", "3.0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let o = dupin(dir.path(), &["gen", "torus"]);
    assert_eq!(o.status.code(), Some(2));
    let o = dupin(dir.path(), &["orbit", "--C", "0", "--grid", "2x2"]);
    assert!(!o.status.success());
}

#[test]
fn orbit_regimes_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    for (c, name, regime) in [("0", "orbit_C0", "torus"), ("1", "orbit_C1", "cylinder"), ("1.6667", "orbit_C1.6667", "hyperboloid"), ("-0.5", "orbit_C-0.5", "torus")] {
        let o = dupin(dir.path(), &["orbit", "--C", c, "--grid", "16x16"]);
        assert!(o.status.success(), "C = {c}: {}", String::from_utf8_lossy(&o.stdout));
        let r = report(&dir.path().join(format!("{name}.json")));
        assert_eq!(r["details"]["regime"], regime);
        let (v, _) = load_obj(&dir.path().join(format!("{name}.obj")));
        assert!(v > 0);
    }
}

#[test]
fn fig7_vertex_count_excludes_flagged_points() {
    let dir = tempfile::tempdir().unwrap();
    let o = dupin(dir.path(), &["fig7", "--t", "1", "--grid", "32x32"]);
    assert!(o.status.success());
    let r = report(&dir.path().join("fig7_t1.json"));
    let n = r["details"]["singular_points"].as_array().unwrap().len();
    assert!(n > 0 && n < 32 * 32);
    assert_eq!(load_obj(&dir.path().join("fig7_t1.obj")).0, 32 * 32 - n);
}

#[test]
fn output_directory_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_dupin"))
        .args(["gen", "cylinder", "--grid", "6x6"])
        .env("DUPIN_OUT_DIR", dir.path())
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("cylinder_none.obj").exists());
    // --out wins over the environment
    let other = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_dupin"))
        .args(["gen", "cylinder", "--grid", "6x6", "--out"])
        .arg(other.path())
        .env("DUPIN_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(other.path().join("cylinder_none.obj").exists());
}

#[test]
fn config_file_and_tolerance_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("dupin.toml");
    std::fs::write(&cfg, "grid = \"12x10\"\n").unwrap();
    let o = dupin(dir.path(), &["gen", "cylinder", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(load_obj(&dir.path().join("cylinder_none.obj")).0, 120);
    // an impossible tolerance makes the run fail with status 1
    let o = dupin(dir.path(), &["gen", "cylinder", "--grid", "8x8", "--tol-curvature-exact", "1e-300"]);
    assert!(o.status.success(), "exact zero still passes");
    let o = dupin(dir.path(), &["orbit", "--C", "0.5", "--grid", "8x8", "--tol-frame-order", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::write(&cfg, "tol_unknown = 1.0\n").unwrap();
    let o = dupin(dir.path(), &["gen", "cylinder", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn identical_runs_give_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        assert!(dupin(d.path(), &["fig7", "--t", "1", "--grid", "24x24"]).status.success());
        assert!(dupin(d.path(), &["gen", "torus", "--alpha", "0.5", "--grid", "16x16"]).status.success());
    }
    for f in ["fig7_t1.obj", "fig7_t1.json", "torus_stereo.obj", "torus_stereo.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}
