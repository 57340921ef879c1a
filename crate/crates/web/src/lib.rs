//! WebAssembly entry points for the browser demo in `www/`.
//!
//! Each call returns a JSON document with the mesh and the report of the
//! matching CLI command:
//! `{"name", "vertices": [[x,y,z]..], "faces": [[i,j,k,l]..], "flagged", "report"}`.

use dupin_core::export::{cmd_fig7, cmd_gen, cmd_orbit, Artifact, Config, Grid, SurfaceSpec};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest grid side accepted from the page.
pub const MAX_GRID: usize = 96;

fn grid(n: usize) -> Result<Grid, String> {
    if !(5..=MAX_GRID).contains(&n) {
        return Err(format!("grid size must be between 5 and {MAX_GRID}, got {n}"));
    }
    Ok(Grid { nu: n, nv: n })
}

fn encode(a: dupin_core::Result<Artifact>) -> Result<String, String> {
    let a = a.map_err(|e| e.to_string())?;
    Ok(json!({
        "name": a.name,
        "vertices": a.mesh.vertices,
        "faces": a.mesh.faces,
        "flagged": a.mesh.flagged.len(),
        "report": a.report,
    })
    .to_string())
}

/// `kind` is `torus` (parameter alpha), `hyperboloid` (a) or `cylinder`
/// (radius); each is shown through its natural projection to R³.
pub fn surface_json(kind: &str, param: f64, n: usize) -> Result<String, String> {
    let spec = match kind {
        "torus" => SurfaceSpec::Torus { alpha: param },
        "hyperboloid" => SurfaceSpec::Hyperboloid { a: param },
        "cylinder" => SurfaceSpec::Cylinder { radius: param },
        other => return Err(format!("unknown surface '{other}'")),
    };
    let proj = spec.natural_projection();
    encode(cmd_gen(spec, proj, grid(n)?, &Config::default()))
}

pub fn orbit_json(c: f64, n: usize) -> Result<String, String> {
    encode(cmd_orbit(c, grid(n)?, &Config::default()))
}

pub fn fig7_json(t: f64, n: usize) -> Result<String, String> {
    encode(cmd_fig7(t, grid(n)?, &Config::default()))
}

#[wasm_bindgen]
pub fn surface_mesh(kind: &str, param: f64, n: usize) -> Result<String, JsError> {
    surface_json(kind, param, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn orbit_mesh(c: f64, n: usize) -> Result<String, JsError> {
    orbit_json(c, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn fig7_mesh(t: f64, n: usize) -> Result<String, JsError> {
    fig7_json(t, n).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: Result<String, String>) -> Value {
        serde_json::from_str(&s.unwrap()).unwrap()
    }

    #[test]
    fn surface_payload() {
        let v = parse(surface_json("torus", std::f64::consts::FRAC_PI_4, 16));
        assert_eq!(v["name"], "torus_stereo");
        assert_eq!(v["vertices"].as_array().unwrap().len() + v["flagged"].as_u64().unwrap() as usize, 256);
        assert!(v["report"]["passed"].as_bool().unwrap());
        assert!(v["faces"][0].as_array().unwrap().len() == 4);
    }

    #[test]
    fn orbit_and_fig7_payloads() {
        let v = parse(orbit_json(0.5, 16));
        assert_eq!(v["report"]["details"]["regime"], "torus");
        let v = parse(fig7_json(1.0, 32));
        assert!(v["flagged"].as_u64().unwrap() > 0);
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(surface_json("klein", 1.0, 16).is_err());
        assert!(orbit_json(0.5, 4).is_err());
        assert!(fig7_json(1.0, MAX_GRID + 1).is_err());
        assert!(surface_json("torus", 2.0, 16).is_err());
    }
}
