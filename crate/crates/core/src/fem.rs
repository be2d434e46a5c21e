//! P1 finite elements on interior degrees of freedom (homogeneous Dirichlet).
//!
//! The three operators share one sparsity pattern:
//!
//! - `mass`: `(φ_i, φ_j)_{L²}`
//! - `gram_h10`: `(∇φ_i, ∇φ_j)_{L²}`
//! - `stiffness`: `c² · gram_h10`, scaled entry by entry

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, LdlFactor, Ordering};
use crate::mesh::{signed_area, Mesh};

/// Coefficients of a finite-element function in the interior dof basis.
pub type NodalField = Vec<f64>;

/// Mass, stiffness and H¹₀ Gram matrices for one mesh and wave speed.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    pub mass: CsrMatrix,
    pub stiffness: CsrMatrix,
    pub gram_h10: CsrMatrix,
    pub c: f64,
    pub n_dofs: usize,
    /// [`Mesh::hash`] of the mesh the operators were assembled on.
    pub mesh_hash: u64,
}

/// Quadrature rules on a triangle, in barycentric coordinates with weights
/// summing to one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TriangleRule {
    /// Edge midpoints, exact for quadratics.
    #[default]
    EdgeMidpoints,
    /// Seven-point rule exact for polynomials of degree 5.
    Degree5,
}

impl TriangleRule {
    pub fn points(self) -> Vec<([f64; 3], f64)> {
        match self {
            TriangleRule::EdgeMidpoints => {
                let w = 1.0 / 3.0;
                vec![([0.5, 0.5, 0.0], w), ([0.0, 0.5, 0.5], w), ([0.5, 0.0, 0.5], w)]
            }
            TriangleRule::Degree5 => {
                let r15 = libm::sqrt(15.0);
                let (a1, b1) = ((6.0 - r15) / 21.0, (9.0 + 2.0 * r15) / 21.0);
                let (a2, b2) = ((6.0 + r15) / 21.0, (9.0 - 2.0 * r15) / 21.0);
                let (w1, w2) = ((155.0 - r15) / 1200.0, (155.0 + r15) / 1200.0);
                vec![
                    ([1.0 / 3.0; 3], 9.0 / 40.0),
                    ([a1, a1, b1], w1),
                    ([a1, b1, a1], w1),
                    ([b1, a1, a1], w1),
                    ([a2, a2, b2], w2),
                    ([a2, b2, a2], w2),
                    ([b2, a2, a2], w2),
                ]
            }
        }
    }
}

/// `exp(−‖x − x0‖² / ζ²)`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianField {
    pub x0: [f64; 2],
    pub zeta: f64,
}

impl GaussianField {
    #[inline]
    pub fn eval(&self, p: [f64; 2]) -> f64 {
        let dx = p[0] - self.x0[0];
        let dy = p[1] - self.x0[1];
        libm::exp(-(dx * dx + dy * dy) / (self.zeta * self.zeta))
    }
}

pub fn gaussian_field(x0: [f64; 2], zeta: f64) -> Result<GaussianField> {
    if !(zeta > 0.0) || !zeta.is_finite() {
        return Err(Error::invalid(format!("Gaussian width must be positive, got {zeta}")));
    }
    if !x0.iter().all(|v| v.is_finite()) {
        return Err(Error::invalid("Gaussian center must be finite"));
    }
    Ok(GaussianField { x0, zeta })
}

/// Gradients of the barycentric coordinates and the area of a triangle.
fn p1_gradients(mesh: &Mesh, k: usize) -> Result<([[f64; 2]; 3], f64)> {
    let t = mesh.triangles()[k];
    let area = signed_area(mesh.vertices(), t);
    if !(area > 0.0) {
        return Err(Error::InvalidMesh(format!("triangle {k} is degenerate or inverted")));
    }
    let p = t.map(|v| mesh.vertices()[v]);
    let two_area = 2.0 * area;
    let mut grads = [[0.0; 2]; 3];
    for i in 0..3 {
        let (b, c) = (p[(i + 1) % 3], p[(i + 2) % 3]);
        grads[i] = [(b[1] - c[1]) / two_area, (c[0] - b[0]) / two_area];
    }
    Ok((grads, area))
}

pub type LocalMatrix = [[f64; 3]; 3];

/// Local P1 stiffness (`c = 1`) and mass matrices.
pub fn local_matrices(mesh: &Mesh, k: usize) -> Result<(LocalMatrix, LocalMatrix)> {
    let (g, area) = p1_gradients(mesh, k)?;
    let mut stiff = [[0.0; 3]; 3];
    let mut mass = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            stiff[i][j] = area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
            mass[i][j] = area / 12.0 * if i == j { 2.0 } else { 1.0 };
        }
    }
    Ok((stiff, mass))
}

/// Assembles `M_h`, `B_h` and `A_h = c² B_h` on the interior dofs.
pub fn assemble_operators(mesh: &Mesh, c: f64) -> Result<OperatorSet> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::invalid(format!("wave speed must be positive, got {c}")));
    }
    let n = mesh.n_dofs();
    let mut mass_t = Vec::with_capacity(9 * mesh.n_triangles());
    let mut gram_t = Vec::with_capacity(9 * mesh.n_triangles());
    for (k, t) in mesh.triangles().iter().enumerate() {
        let (stiff, mass) = local_matrices(mesh, k)?;
        let dofs = t.map(|v| mesh.dof(v));
        for i in 0..3 {
            let Some(di) = dofs[i] else { continue };
            for j in 0..3 {
                let Some(dj) = dofs[j] else { continue };
                mass_t.push((di, dj, mass[i][j]));
                gram_t.push((di, dj, stiff[i][j]));
            }
        }
    }
    let mass = CsrMatrix::from_triplets(n, n, &mass_t)?;
    let gram_h10 = CsrMatrix::from_triplets(n, n, &gram_t)?;
    let c2 = c * c;
    let stiffness = gram_h10.map(|v| c2 * v);
    Ok(OperatorSet { mass, stiffness, gram_h10, c, n_dofs: n, mesh_hash: mesh.hash() })
}

/// Mass matrix over *all* vertices, before Dirichlet elimination.
pub fn assemble_full_mass(mesh: &Mesh) -> Result<CsrMatrix> {
    let n = mesh.n_vertices();
    let mut t = Vec::with_capacity(9 * mesh.n_triangles());
    for (k, tri) in mesh.triangles().iter().enumerate() {
        let (_, mass) = local_matrices(mesh, k)?;
        for i in 0..3 {
            for j in 0..3 {
                t.push((tri[i], tri[j], mass[i][j]));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, &t)
}

/// `b_i = ∫_Ω g φ_i dx` over interior dofs with the default rule.
pub fn load_vector(mesh: &Mesh, g: impl Fn([f64; 2]) -> f64) -> NodalField {
    load_vector_with(mesh, g, TriangleRule::default())
}

pub fn load_vector_with(mesh: &Mesh, g: impl Fn([f64; 2]) -> f64, rule: TriangleRule) -> NodalField {
    let points = rule.points();
    let mut b = vec![0.0; mesh.n_dofs()];
    for &t in mesh.triangles() {
        let dofs = t.map(|v| mesh.dof(v));
        if dofs.iter().all(Option::is_none) {
            continue;
        }
        let area = libm::fabs(signed_area(mesh.vertices(), t));
        let p = t.map(|v| mesh.vertices()[v]);
        for (lambda, w) in &points {
            let x = [
                lambda[0] * p[0][0] + lambda[1] * p[1][0] + lambda[2] * p[2][0],
                lambda[0] * p[0][1] + lambda[1] * p[1][1] + lambda[2] * p[2][1],
            ];
            let gw = area * w * g(x);
            for i in 0..3 {
                if let Some(d) = dofs[i] {
                    b[d] += gw * lambda[i];
                }
            }
        }
    }
    b
}

/// L² projection `Q_h g` onto the interior P1 space.
pub fn l2_project(ops: &OperatorSet, mesh: &Mesh, g: impl Fn([f64; 2]) -> f64) -> Result<NodalField> {
    l2_project_with(ops, mesh, g, TriangleRule::default())
}

pub fn l2_project_with(
    ops: &OperatorSet,
    mesh: &Mesh,
    g: impl Fn([f64; 2]) -> f64,
    rule: TriangleRule,
) -> Result<NodalField> {
    Error::check_len(ops.n_dofs, mesh.n_dofs())?;
    let mut x = load_vector_with(mesh, g, rule);
    if x.is_empty() {
        return Ok(x);
    }
    let factor = LdlFactor::new(&ops.mass, Ordering::NestedDissection)
        .map_err(|e| Error::NumericalFailure(format!("mass matrix factorization: {e}")))?;
    factor.solve_in_place(&mut x);
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_mesh, Rect};

    #[test]
    fn unit_right_triangle_local_stiffness() {
        let m = Mesh::from_parts(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]], vec![true; 3]).unwrap();
        let (k, mass) = local_matrices(&m, 0).unwrap();
        let expected = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((k[i][j] - expected[i][j]).abs() < 1e-15);
            }
        }
        assert!((mass[0][0] - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn partition_of_unity_of_full_mass() {
        let dom = Rect::new(0.0, 2.0, -1.0, 0.5);
        let mesh = build_structured_mesh(7, dom).unwrap();
        let m = assemble_full_mass(&mesh).unwrap();
        let total: f64 = m.values().iter().sum();
        assert!((total - dom.area()).abs() < 1e-13);
    }

    #[test]
    fn stiffness_scales_with_c_squared() {
        let mesh = build_structured_mesh(6, Rect::default()).unwrap();
        let a1 = assemble_operators(&mesh, 1.0).unwrap();
        let a2 = assemble_operators(&mesh, 2.0).unwrap();
        assert_eq!(a1.mass, a2.mass);
        for (x, y) in a1.stiffness.values().iter().zip(a2.stiffness.values()) {
            assert_eq!(4.0 * x, *y);
        }
        assert_eq!(a1.stiffness, a1.gram_h10);
        assert!(a1.mass.same_pattern(&a1.stiffness));
        assert!(a1.mass.is_symmetric() && a1.gram_h10.is_symmetric() && a2.stiffness.is_symmetric());
    }

    #[test]
    fn rejects_nonpositive_wave_speed() {
        let mesh = build_structured_mesh(3, Rect::default()).unwrap();
        assert!(assemble_operators(&mesh, 0.0).is_err());
        assert!(assemble_operators(&mesh, -1.0).is_err());
    }

    #[test]
    fn gaussian_values() {
        let g = gaussian_field([0.25, -0.1], 0.05).unwrap();
        assert_eq!(g.eval([0.25, -0.1]), 1.0);
        assert!((g.eval([0.30, -0.1]) - libm::exp(-1.0)).abs() < 1e-12);
        assert!(gaussian_field([0.0, 0.0], 0.0).is_err());
        assert!(gaussian_field([0.0, 0.0], -1.0).is_err());
    }

    #[test]
    fn degree5_rule_integrates_quintics() {
        // (1/|K|) ∫_K λ0^a λ1^b λ2^c = 2 a! b! c! / (a+b+c+2)!
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        for (a, b, c) in [(5, 0, 0), (2, 2, 1), (3, 1, 1), (0, 2, 3), (1, 1, 0)] {
            let exact = 2.0 * fact(a) * fact(b) * fact(c) / fact(a + b + c + 2);
            let q: f64 = TriangleRule::Degree5
                .points()
                .iter()
                .map(|(l, w)| w * libm::pow(l[0], a as f64) * libm::pow(l[1], b as f64) * libm::pow(l[2], c as f64))
                .sum();
            assert!((q - exact).abs() < 1e-15, "({a},{b},{c}) {q} vs {exact}");
        }
    }
}
