//! `key = value` configuration: default grid sizes and tolerances.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The checked-in defaults.
pub const DEFAULTS: &str = include_str!("../../config/defaults.toml");

/// A grid size written `NxM`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Grid {
    pub nu: usize,
    pub nv: usize,
}

impl FromStr for Grid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("grid '{s}' is not of the form NxM"));
        let (a, b) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        let nu: usize = a.trim().parse().map_err(|_| bad())?;
        let nv: usize = b.trim().parse().map_err(|_| bad())?;
        if nu < 5 || nv < 5 {
            return Err(Error::Invalid(format!("grid {nu}x{nv} is too small (need at least 5x5)")));
        }
        Ok(Grid { nu, nv })
    }
}

impl TryFrom<String> for Grid {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Grid> for String {
    fn from(g: Grid) -> String {
        g.to_string()
    }
}

impl std::fmt::Display for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.nu, self.nv)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub grid: Grid,
    pub fine_grid: Grid,
    pub tol_membership: f64,
    pub tol_frame_field: f64,
    pub tol_curvature: f64,
    pub tol_curvature_exact: f64,
    pub tol_curvature_value: f64,
    pub tol_iso_analytic: f64,
    pub tol_dupin_analytic: f64,
    pub tol_iso_fd: f64,
    pub tol_dupin_fd: f64,
    pub tol_round_trip: f64,
    pub tol_rank: f64,
    pub tol_frame_order: f64,
    pub tol_sphere_rank: f64,
    pub tol_contact: f64,
    pub tol_lie_exact: f64,
    pub tol_quadric: f64,
    pub tol_structure: f64,
    pub tol_structure_ratio: f64,
    pub tol_congruence: f64,
    pub tol_cylinder: f64,
}

impl Default for Config {
    fn default() -> Self {
        toml::from_str(DEFAULTS).expect("checked-in defaults parse")
    }
}

impl Config {
    /// Parse a config text on top of the defaults: keys missing from `text`
    /// keep their default values, unknown keys are an error.
    pub fn parse(text: &str) -> Result<Self> {
        let mut base: toml::Table = toml::from_str(DEFAULTS).expect("checked-in defaults parse");
        let over: toml::Table = toml::from_str(text).map_err(|e| Error::Invalid(format!("config: {e}")))?;
        for (k, v) in over {
            base.insert(k, v);
        }
        let cfg: Config = base.try_into().map_err(|e: toml::de::Error| Error::Invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Names of the tolerance keys without the `tol_` prefix.
    pub fn tolerance_names() -> Vec<String> {
        let t: toml::Table = toml::from_str(DEFAULTS).expect("checked-in defaults parse");
        t.keys().filter_map(|k| k.strip_prefix("tol_").map(str::to_string)).collect()
    }

    /// Override one tolerance by its short name (`frame_order` or `frame-order`).
    pub fn set_tolerance(&mut self, name: &str, value: f64) -> Result<()> {
        let key = format!("tol_{}", name.replace('-', "_"));
        let mut t = toml::Table::try_from(&*self).expect("config serializes");
        if !t.contains_key(&key) {
            return Err(Error::Invalid(format!("unknown tolerance '{name}'")));
        }
        t.insert(key, toml::Value::Float(value));
        let cfg: Config = t.try_into().map_err(|e: toml::de::Error| Error::Invalid(e.to_string()))?;
        cfg.validate()?;
        *self = cfg;
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let t = toml::Table::try_from(self).expect("config serializes");
        for (k, v) in &t {
            if let Some(x) = v.as_float() {
                if !(x.is_finite() && x > 0.0) {
                    return Err(Error::Invalid(format!("{k} must be positive and finite, got {x}")));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerances;

    #[test]
    fn defaults_match_the_library_constants() {
        let c = Config::default();
        assert_eq!(c.grid, Grid { nu: 64, nv: 64 });
        assert_eq!(c.tol_frame_order, tolerances::FRAME_ORDER);
        assert_eq!(c.tol_rank, tolerances::RANK);
        assert_eq!(c.tol_contact, tolerances::CONTACT);
        assert_eq!(c.tol_dupin_fd, tolerances::DUPIN_FD);
        assert_eq!(c.tol_congruence, tolerances::CONGRUENCE);
        assert_eq!(c.tol_sphere_rank, tolerances::SPHERE_RANK);
        assert!(Config::tolerance_names().contains(&"frame_order".to_string()));
    }

    #[test]
    fn partial_files_and_overrides() {
        let c = Config::parse("grid = \"32x16\"\ntol_contact = 1e-7\n").unwrap();
        assert_eq!((c.grid.nu, c.grid.nv), (32, 16));
        assert_eq!(c.tol_contact, 1e-7);
        assert_eq!(c.tol_rank, 1e-8);
        assert!(Config::parse("tol_nonsense = 1.0").is_err());
        assert!(Config::parse("tol_rank = -1.0").is_err());
        assert!(Config::parse("grid = \"64\"").is_err());
        let mut c = Config::default();
        c.set_tolerance("frame-order", 1e-4).unwrap();
        assert_eq!(c.tol_frame_order, 1e-4);
        assert!(c.set_tolerance("bogus", 1.0).is_err());
    }

    #[test]
    fn grid_spec() {
        assert_eq!("32x48".parse::<Grid>().unwrap(), Grid { nu: 32, nv: 48 });
        assert!("3x3".parse::<Grid>().is_err());
        assert!("ax3".parse::<Grid>().is_err());
    }
}
