//! Conforming triangulations of a rectangle with Dirichlet boundary labeling.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::hash::Hasher;

use crate::error::{Error, Result};

/// Axis-aligned rectangle `(x_min, x_max) × (y_min, y_max)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub const fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Self { x_min, x_max, y_min, y_max }
    }

    /// `(−½, ½)²`
    pub const fn centered_unit_square() -> Self {
        Self::new(-0.5, 0.5, -0.5, 0.5)
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }

    fn validate(&self) -> Result<()> {
        let ok = [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite())
            && self.x_max > self.x_min
            && self.y_max > self.y_min;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("degenerate rectangle {self:?}")))
        }
    }
}

impl Default for Rect {
    fn default() -> Self {
        Self::centered_unit_square()
    }
}

/// Triangulation with interior vertices numbered as degrees of freedom.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    /// `dof_of_vertex[v]` is `Some(dof)` for interior vertices.
    dof_of_vertex: Vec<Option<usize>>,
    /// Vertex id of each dof.
    dof_vertices: Vec<usize>,
    h: f64,
    domain: Rect,
}

impl Mesh {
    /// Validates and builds a mesh from raw arrays.
    ///
    /// Clockwise triangles are reoriented. The domain is the bounding box of
    /// the vertices. Every vertex on an edge owned by a single triangle must
    /// be flagged as boundary.
    pub fn from_parts(vertices: Vec<[f64; 2]>, mut triangles: Vec<[usize; 3]>, boundary: Vec<bool>) -> Result<Self> {
        if vertices.is_empty() || triangles.is_empty() {
            return Err(Error::InvalidMesh("mesh needs at least one triangle".into()));
        }
        Error::check_len(vertices.len(), boundary.len())?;
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
        }
        for (k, t) in triangles.iter_mut().enumerate() {
            if t.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidMesh(format!("triangle {k} references a missing vertex")));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::InvalidMesh(format!("triangle {k} repeats a vertex")));
            }
            let area = signed_area(&vertices, *t);
            if area == 0.0 {
                return Err(Error::InvalidMesh(format!("triangle {k} has zero area")));
            }
            if area < 0.0 {
                t.swap(1, 2);
            }
        }

        let mut edge_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for t in &triangles {
            for (a, b) in edges_of(*t) {
                *edge_count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        for (&(a, b), &count) in &edge_count {
            if count > 2 {
                return Err(Error::InvalidMesh(format!("edge ({a}, {b}) shared by {count} triangles")));
            }
            if count == 1 && !(boundary[a] && boundary[b]) {
                return Err(Error::InvalidMesh(format!("boundary edge ({a}, {b}) has an unflagged vertex")));
            }
        }

        let (mut x_min, mut x_max, mut y_min, mut y_max) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &[x, y] in &vertices {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
        let domain = Rect::new(x_min, x_max, y_min, y_max);
        Ok(Self::assemble(vertices, triangles, boundary, domain))
    }

    fn assemble(vertices: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>, boundary: Vec<bool>, domain: Rect) -> Self {
        let mut dof_of_vertex = vec![None; vertices.len()];
        let mut dof_vertices = Vec::new();
        for (v, &b) in boundary.iter().enumerate() {
            if !b {
                dof_of_vertex[v] = Some(dof_vertices.len());
                dof_vertices.push(v);
            }
        }
        let h = triangles.iter().map(|&t| triangle_geometry(&vertices, t).longest_edge).fold(0.0, f64::max);
        Self { vertices, triangles, boundary, dof_of_vertex, dof_vertices, h, domain }
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    /// Dof id of a vertex, `None` on the Dirichlet boundary.
    #[inline]
    pub fn dof(&self, vertex: usize) -> Option<usize> {
        self.dof_of_vertex[vertex]
    }

    /// Vertex ids of the interior dofs, in dof order.
    pub fn dof_vertices(&self) -> &[usize] {
        &self.dof_vertices
    }

    pub fn n_dofs(&self) -> usize {
        self.dof_vertices.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Largest edge length over all triangles.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    /// Number of distinct edges.
    pub fn n_edges(&self) -> usize {
        let mut edges: Vec<(usize, usize)> =
            self.triangles.iter().flat_map(|&t| edges_of(t).map(|(a, b)| (a.min(b), a.max(b)))).collect();
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    /// 64-bit FNV-1a digest of vertices, triangles and boundary flags.
    ///
    /// Binds persisted bases and snapshots to the discretization they came from.
    pub fn hash(&self) -> u64 {
        let mut h = fnv::FnvHasher::default();
        h.write_u64(self.vertices.len() as u64);
        for &[x, y] in &self.vertices {
            h.write_u64(x.to_bits());
            h.write_u64(y.to_bits());
        }
        h.write_u64(self.triangles.len() as u64);
        for t in &self.triangles {
            for &v in t {
                h.write_u64(v as u64);
            }
        }
        for &b in &self.boundary {
            h.write_u8(b as u8);
        }
        h.finish()
    }
}

/// Uniform `n × n` grid on `domain`, each cell split along its
/// lower-left to upper-right diagonal.
///
/// Gives `(n+1)²` vertices, `2n²` triangles and `(n−1)²` interior dofs.
pub fn build_structured_mesh(n: usize, domain: Rect) -> Result<Mesh> {
    if n < 2 {
        return Err(Error::invalid(format!("structured mesh needs n >= 2 cells per side, got {n}")));
    }
    domain.validate()?;
    let np = n + 1;
    let dx = (domain.x_max - domain.x_min) / n as f64;
    let dy = (domain.y_max - domain.y_min) / n as f64;
    let mut vertices = Vec::with_capacity(np * np);
    let mut boundary = Vec::with_capacity(np * np);
    for j in 0..np {
        for i in 0..np {
            // pin the far edge exactly to the domain bound
            let x = if i == n { domain.x_max } else { domain.x_min + i as f64 * dx };
            let y = if j == n { domain.y_max } else { domain.y_min + j as f64 * dy };
            vertices.push([x, y]);
            boundary.push(i == 0 || j == 0 || i == n || j == n);
        }
    }
    let idx = |i: usize, j: usize| j * np + i;
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v01, v11) = (idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1));
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    let mut mesh = Mesh::assemble(vertices, triangles, boundary, domain);
    // every triangle has the same diagonal; avoid rounding noise from pinned coordinates
    mesh.h = libm::hypot(dx, dy);
    Ok(mesh)
}

/// Shape-regularity and quasi-uniformity constants of a mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QualityReport {
    /// `max_K h_K / ρ_K` with `ρ_K` the inscribed-circle diameter.
    pub gamma: f64,
    /// `h / min_K h_K`
    pub c_qu: f64,
    pub h: f64,
    pub n_triangles: usize,
    pub n_dofs: usize,
}

pub fn mesh_quality(mesh: &Mesh) -> Result<QualityReport> {
    let mut gamma: f64 = 0.0;
    let mut h_min = f64::INFINITY;
    let mut h_max: f64 = 0.0;
    for (k, &t) in mesh.triangles.iter().enumerate() {
        let g = triangle_geometry(&mesh.vertices, t);
        if !(g.area > 0.0) {
            return Err(Error::InvalidMesh(format!("triangle {k} is degenerate")));
        }
        let rho = 2.0 * g.area / g.semiperimeter;
        gamma = gamma.max(g.longest_edge / rho);
        h_min = h_min.min(g.longest_edge);
        h_max = h_max.max(g.longest_edge);
    }
    Ok(QualityReport { gamma, c_qu: h_max / h_min, h: h_max, n_triangles: mesh.n_triangles(), n_dofs: mesh.n_dofs() })
}

pub(crate) struct TriangleGeometry {
    pub area: f64,
    pub longest_edge: f64,
    pub semiperimeter: f64,
}

pub(crate) fn signed_area(vertices: &[[f64; 2]], t: [usize; 3]) -> f64 {
    let [a, b, c] = t.map(|v| vertices[v]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

pub(crate) fn triangle_geometry(vertices: &[[f64; 2]], t: [usize; 3]) -> TriangleGeometry {
    let [a, b, c] = t.map(|v| vertices[v]);
    let len = |p: [f64; 2], q: [f64; 2]| libm::hypot(p[0] - q[0], p[1] - q[1]);
    let (e0, e1, e2) = (len(b, c), len(c, a), len(a, b));
    TriangleGeometry {
        area: libm::fabs(signed_area(vertices, t)),
        longest_edge: e0.max(e1).max(e2),
        semiperimeter: 0.5 * (e0 + e1 + e2),
    }
}

fn edges_of(t: [usize; 3]) -> [(usize, usize); 3] {
    [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::SQRT_2;

    #[test]
    fn two_by_two_mesh_counts() {
        let m = build_structured_mesh(2, Rect::centered_unit_square()).unwrap();
        assert_eq!(m.n_vertices(), 9);
        assert_eq!(m.n_triangles(), 8);
        assert_eq!(m.n_dofs(), 1);
        assert_eq!(m.vertices()[m.dof_vertices()[0]], [0.0, 0.0]);
        assert!((m.h() - SQRT_2 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn large_grid_has_14641_dofs() {
        let m = build_structured_mesh(122, Rect::centered_unit_square()).unwrap();
        assert_eq!(m.n_dofs(), 14641);
        assert_eq!(m.n_triangles(), 29768);
    }

    #[test]
    fn rejects_too_coarse_grid() {
        assert!(matches!(build_structured_mesh(1, Rect::default()), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn structured_quality_constants() {
        for n in [2, 5, 16] {
            let m = build_structured_mesh(n, Rect::default()).unwrap();
            let q = mesh_quality(&m).unwrap();
            assert!((q.gamma - (1.0 + SQRT_2)).abs() < 1e-12, "gamma = {}", q.gamma);
            assert!((q.c_qu - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn equilateral_triangle_quality() {
        let s3 = libm::sqrt(3.0);
        let m =
            Mesh::from_parts(vec![[0.0, 0.0], [1.0, 0.0], [0.5, s3 / 2.0]], vec![[0, 1, 2]], vec![true; 3]).unwrap();
        let q = mesh_quality(&m).unwrap();
        // inradius r = area / semiperimeter = (√3/4) / (3/2) = √3/6, so h/ρ = 1/(2r) = √3
        let area = s3 / 4.0;
        let rho = 2.0 * area / 1.5;
        assert!((q.gamma - 1.0 / rho).abs() < 1e-14);
        assert!((q.gamma - s3).abs() < 1e-14);
        assert_eq!(m.n_dofs(), 0);
    }

    #[test]
    fn from_parts_validation() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        // clockwise input is reoriented
        let m = Mesh::from_parts(v.clone(), vec![[0, 2, 1], [1, 2, 3]], vec![true; 4]).unwrap();
        assert!(m.triangles().iter().all(|&t| signed_area(m.vertices(), t) > 0.0));
        // collinear triangle
        let bad = Mesh::from_parts(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], vec![[0, 1, 2]], vec![true; 3]);
        assert!(matches!(bad, Err(Error::InvalidMesh(_))));
        // unflagged boundary vertex
        let bad = Mesh::from_parts(v, vec![[0, 1, 2], [1, 3, 2]], vec![true, true, false, true]);
        assert!(matches!(bad, Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn hash_distinguishes_meshes() {
        let a = build_structured_mesh(4, Rect::default()).unwrap();
        let b = build_structured_mesh(5, Rect::default()).unwrap();
        assert_eq!(a.hash(), build_structured_mesh(4, Rect::default()).unwrap().hash());
        assert_ne!(a.hash(), b.hash());
    }
}
