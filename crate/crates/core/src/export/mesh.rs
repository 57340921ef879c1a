//! Grid meshes and their OBJ encoding.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Coords;
use crate::surface::domain::ParamDomain;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    /// Quads as vertex indices (0-based).
    pub faces: Vec<[usize; 4]>,
    /// Grid index of each vertex.
    pub grid_index: Vec<usize>,
    /// Grid indices left out of the mesh (singular, pole, non-finite).
    pub flagged: Vec<usize>,
    /// Optional per-vertex scalars, e.g. principal curvatures `(a, c)`.
    pub scalars: Option<Vec<[f64; 2]>>,
}

impl Mesh {
    /// One vertex per unflagged grid point with a finite position, and a quad
    /// for every grid cell whose four corners are vertices. Periodic
    /// directions wrap around.
    pub fn from_grid(domain: &ParamDomain, points: &[Option<Coords>], flags: &[usize]) -> Result<Self> {
        if points.len() != domain.len() {
            return Err(Error::GridMismatch);
        }
        let mut skip = vec![false; domain.len()];
        for &k in flags {
            if k >= domain.len() {
                return Err(Error::OutOfRange(format!("flag index {k}")));
            }
            skip[k] = true;
        }
        let mut slot = vec![usize::MAX; domain.len()];
        let mut vertices = Vec::new();
        let mut grid_index = Vec::new();
        let mut flagged = Vec::new();
        for (k, p) in points.iter().enumerate() {
            match p {
                Some(x) if !skip[k] && x.len() == 3 && x.iter().all(|c| c.is_finite()) => {
                    slot[k] = vertices.len();
                    vertices.push([x[0], x[1], x[2]]);
                    grid_index.push(k);
                }
                _ => flagged.push(k),
            }
        }
        let (nu, nv) = (domain.nu, domain.nv);
        let cu = if domain.periodic_u { nu } else { nu - 1 };
        let cv = if domain.periodic_v { nv } else { nv - 1 };
        let mut faces = Vec::new();
        for i in 0..cu {
            for j in 0..cv {
                let (i1, j1) = ((i + 1) % nu, (j + 1) % nv);
                let q = [domain.index(i, j), domain.index(i1, j), domain.index(i1, j1), domain.index(i, j1)].map(|k| slot[k]);
                if q.iter().all(|&s| s != usize::MAX) {
                    faces.push(q);
                }
            }
        }
        Ok(Self { vertices, faces, grid_index, flagged, scalars: None })
    }

    /// Attach per-grid-point scalars; entries of flagged points are dropped.
    pub fn with_grid_scalars(mut self, values: &[[f64; 2]]) -> Result<Self> {
        let mut out = Vec::with_capacity(self.vertices.len());
        for &k in &self.grid_index {
            out.push(*values.get(k).ok_or(Error::GridMismatch)?);
        }
        self.scalars = Some(out);
        Ok(self)
    }

    /// ASCII OBJ: `v` and `f` records (1-based), scalars as `# s` comments.
    pub fn to_obj(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {name}");
        let _ = writeln!(s, "# vertices {} faces {} flagged {}", self.vertices.len(), self.faces.len(), self.flagged.len());
        let _ = writeln!(s, "o {name}");
        for (k, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "v {:.12} {:.12} {:.12}", v[0], v[1], v[2]);
            if let Some(sc) = &self.scalars {
                let _ = writeln!(s, "# s {:.12} {:.12}", sc[k][0], sc[k][1]);
            }
        }
        for f in &self.faces {
            let _ = writeln!(s, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1);
        }
        s
    }

    pub fn max_face_index(&self) -> Option<usize> {
        self.faces.iter().flat_map(|f| f.iter().copied()).max()
    }
}

/// Write through a temporary file in the target directory and rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let file = path.file_name().ok_or_else(|| Error::Invalid(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", file.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(d: &ParamDomain) -> Vec<Option<Coords>> {
        d.points().map(|(_, _, u, v)| Some(Coords::from_vec(vec![u, v, 0.0]))).collect()
    }

    #[test]
    fn open_and_periodic_grids() {
        let d = ParamDomain::new((0.0, 1.0), (0.0, 1.0), 4, 5, false, false).unwrap();
        let m = Mesh::from_grid(&d, &grid(&d), &[]).unwrap();
        assert_eq!((m.vertices.len(), m.faces.len()), (20, 12));
        let d = ParamDomain::torus(4, 5).unwrap();
        let m = Mesh::from_grid(&d, &grid(&d), &[]).unwrap();
        assert_eq!(m.faces.len(), 20);
    }

    #[test]
    fn flagged_points_leave_the_faces() {
        let d = ParamDomain::torus(6, 6).unwrap();
        let m = Mesh::from_grid(&d, &grid(&d), &[7]).unwrap();
        assert_eq!(m.vertices.len(), 35);
        assert_eq!(m.faces.len(), 32);
        assert!(m.max_face_index().unwrap() < m.vertices.len());
        assert_eq!(m.flagged, vec![7]);
        let mut pts = grid(&d);
        pts[3] = None;
        assert_eq!(Mesh::from_grid(&d, &pts, &[7]).unwrap().flagged, vec![3, 7]);
    }

    #[test]
    fn obj_text() {
        let d = ParamDomain::new((0.0, 1.0), (0.0, 1.0), 3, 3, false, false).unwrap();
        let m = Mesh::from_grid(&d, &grid(&d), &[]).unwrap().with_grid_scalars(&[[1.0, 2.0]; 9]).unwrap();
        let obj = m.to_obj("t");
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 9);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 4);
        assert!(obj.contains("f 1 4 5 2"));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
