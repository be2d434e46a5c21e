//! Plain-text triangle lists: a `V T` header, `V` lines `x y b` (`b = 1` on
//! the boundary), then `T` lines `i j k` with 0-based vertex indices.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ltrb_core::Mesh;

use crate::error::{CliError, Context, Result};

pub fn read_mesh(path: &Path) -> Result<Mesh> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let err = |line: usize, msg: String| CliError::Format { path: path.to_path_buf(), line, msg };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut fields = |expect: usize, what: &str| -> Result<(usize, Vec<String>)> {
        let (line, l) = lines.next().ok_or_else(|| err(0, format!("unexpected end of file, expected {what}")))?;
        let f: Vec<String> = l.split_whitespace().map(String::from).collect();
        if f.len() != expect {
            return Err(err(line, format!("expected {expect} fields for {what}, found {}", f.len())));
        }
        Ok((line, f))
    };
    let (line, header) = fields(2, "the `V T` header")?;
    let nv: usize = header[0].parse().map_err(|_| err(line, "bad vertex count".into()))?;
    let nt: usize = header[1].parse().map_err(|_| err(line, "bad triangle count".into()))?;
    let mut vertices = Vec::with_capacity(nv);
    let mut boundary = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, f) = fields(3, "a vertex `x y b`")?;
        let x: f64 = f[0].parse().map_err(|_| err(line, format!("bad coordinate `{}`", f[0])))?;
        let y: f64 = f[1].parse().map_err(|_| err(line, format!("bad coordinate `{}`", f[1])))?;
        let b = match f[2].as_str() {
            "0" => false,
            "1" => true,
            other => return Err(err(line, format!("boundary flag must be 0 or 1, got `{other}`"))),
        };
        vertices.push([x, y]);
        boundary.push(b);
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (line, f) = fields(3, "a triangle `i j k`")?;
        let mut t = [0usize; 3];
        for (k, s) in f.iter().enumerate() {
            t[k] = s.parse().map_err(|_| err(line, format!("bad vertex index `{s}`")))?;
            if t[k] >= nv {
                return Err(err(line, format!("vertex index {} out of range", t[k])));
            }
        }
        triangles.push(t);
    }
    if let Some((line, _)) = lines.next() {
        return Err(err(line, "trailing data after the declared triangles".into()));
    }
    Mesh::from_parts(vertices, triangles, boundary).context(format!("mesh file {}", path.display()))
}

pub fn write_mesh(path: &Path, mesh: &Mesh) -> Result<()> {
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", mesh.n_vertices(), mesh.n_triangles());
    for (p, &b) in mesh.vertices().iter().zip(mesh.boundary_mask()) {
        let _ = writeln!(s, "{:e} {:e} {}", p[0], p[1], b as u8);
    }
    for t in mesh.triangles() {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    fs::write(path, s).map_err(CliError::io(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ltrb_core::{build_structured_mesh, Rect};

    #[test]
    fn round_trip_preserves_hash() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.txt");
        let mesh = build_structured_mesh(5, Rect::default()).unwrap();
        write_mesh(&p, &mesh).unwrap();
        let back = read_mesh(&p).unwrap();
        assert_eq!(back.hash(), mesh.hash());
        assert_eq!(back.n_dofs(), 16);
    }

    #[test]
    fn bad_flag_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.txt");
        fs::write(&p, "3 1\n0 0 1\n1 0 1\n0 1 2\n0 1 2\n").unwrap();
        assert!(matches!(read_mesh(&p), Err(CliError::Format { line: 4, .. })));
    }
}
