mod common;

use common::{generalized_eigen, setup, to_na};
use ltrb_core::fem::{assemble_full_mass, l2_project_with, load_vector_with, TriangleRule};
use ltrb_core::{
    build_structured_mesh, gaussian_field, l2_project, load_vector, max_generalized_eigenvalue, mesh_quality,
    optimal_beta, Rect,
};

#[test]
fn mesh_counts_and_euler_characteristic() {
    for n in [2, 3, 7, 16] {
        let mesh = build_structured_mesh(n, Rect::default()).unwrap();
        assert_eq!(mesh.n_dofs(), (n - 1) * (n - 1));
        assert_eq!(mesh.n_triangles(), 2 * n * n);
        let euler = mesh.n_vertices() as i64 - mesh.n_edges() as i64 + mesh.n_triangles() as i64;
        assert_eq!(euler, 1);
    }
}

#[test]
fn refinement_halves_h_and_quality_is_constant() {
    let h8 = build_structured_mesh(8, Rect::default()).unwrap().h();
    let h16 = build_structured_mesh(16, Rect::default()).unwrap().h();
    assert!((h16 - h8 / 2.0).abs() < 1e-15);
    let q = mesh_quality(&build_structured_mesh(16, Rect::default()).unwrap()).unwrap();
    assert!((q.gamma - (1.0 + 2f64.sqrt())).abs() < 1e-12);
    assert!((q.c_qu - 1.0).abs() < 1e-12);
}

#[test]
fn large_grid_has_14641_dofs() {
    let mesh = build_structured_mesh(122, Rect::default()).unwrap();
    assert_eq!(mesh.n_dofs(), 14641);
}

#[test]
fn operators_are_symmetric_and_share_pattern() {
    let (_, ops) = setup(9, 1.7);
    for m in [&ops.mass, &ops.stiffness, &ops.gram_h10] {
        assert!(m.is_symmetric());
    }
    assert!(ops.mass.same_pattern(&ops.stiffness));
    assert!(ops.mass.same_pattern(&ops.gram_h10));
    for (a, b) in ops.stiffness.values().iter().zip(ops.gram_h10.values()) {
        assert!((a - 1.7 * 1.7 * b).abs() <= 1e-15 * a.abs().max(1.0));
    }
    // SPD via the dense oracle
    assert!(to_na(&ops.mass).cholesky().is_some());
    assert!(to_na(&ops.gram_h10).cholesky().is_some());
}

#[test]
fn full_mass_partition_of_unity() {
    let domain = Rect::new(-1.0, 2.0, 0.0, 0.5);
    let mesh = build_structured_mesh(7, domain).unwrap();
    let m = assemble_full_mass(&mesh).unwrap();
    let total: f64 = m.values().iter().sum();
    assert!((total - domain.area()).abs() < 1e-13);
}

#[test]
fn gram_matches_dirichlet_energy_of_interior_field() {
    let (mesh, ops) = setup(6, 1.0);
    let u: Vec<f64> = mesh
        .dof_vertices()
        .iter()
        .map(|&v| {
            let [x, y] = mesh.vertices()[v];
            (x + 0.5) * (0.5 - x) * (1.0 + y)
        })
        .collect();
    let mut energy = 0.0;
    for tri in mesh.triangles() {
        let p: Vec<[f64; 2]> = tri.iter().map(|&v| mesh.vertices()[v]).collect();
        let val = |k: usize| mesh.dof(tri[k]).map_or(0.0, |d| u[d]);
        let (x1, y1, x2, y2) = (p[1][0] - p[0][0], p[1][1] - p[0][1], p[2][0] - p[0][0], p[2][1] - p[0][1]);
        let det = x1 * y2 - x2 * y1;
        let (d1, d2) = (val(1) - val(0), val(2) - val(0));
        let gx = (d1 * y2 - d2 * y1) / det;
        let gy = (x1 * d2 - x2 * d1) / det;
        energy += 0.5 * det.abs() * (gx * gx + gy * gy);
    }
    let q = ops.gram_h10.quadratic_form(&u);
    assert!((q - energy).abs() < 1e-13 * energy);
}

#[test]
fn load_vector_of_one_is_mass_row_sum() {
    let (mesh, _) = setup(5, 1.0);
    let full = assemble_full_mass(&mesh).unwrap();
    let b = load_vector(&mesh, |_| 1.0);
    for (d, &v) in mesh.dof_vertices().iter().enumerate() {
        let (_, vals) = full.row(v);
        let row_sum: f64 = vals.iter().sum();
        assert!((b[d] - row_sum).abs() < 1e-15);
    }
    assert!(load_vector(&mesh, |_| 0.0).iter().all(|&x| x == 0.0));
}

#[test]
fn load_vector_of_x_matches_exact_integration() {
    // ∫_K x φ_i = |K| (2 x_i + x_j + x_k) / 12
    let mesh = build_structured_mesh(4, Rect::new(0.0, 1.0, 0.0, 1.0)).unwrap();
    let b = load_vector(&mesh, |p| p[0]);
    let mut exact = vec![0.0; mesh.n_dofs()];
    for tri in mesh.triangles() {
        let p: Vec<[f64; 2]> = tri.iter().map(|&v| mesh.vertices()[v]).collect();
        let area = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1])).abs();
        let sx = p[0][0] + p[1][0] + p[2][0];
        for k in 0..3 {
            if let Some(d) = mesh.dof(tri[k]) {
                exact[d] += area * (sx + p[k][0]) / 12.0;
            }
        }
    }
    for (a, e) in b.iter().zip(&exact) {
        assert!((a - e).abs() < 1e-15);
    }
}

#[test]
fn projection_of_hat_function_is_unit_vector() {
    let (mesh, ops) = setup(6, 1.0);
    let k = 7;
    let hat = |p: [f64; 2]| {
        // P1 interpolant of e_k, evaluated by barycentric lookup
        for tri in mesh.triangles() {
            let v: Vec<[f64; 2]> = tri.iter().map(|&i| mesh.vertices()[i]).collect();
            let det = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
            let l1 = ((p[0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (p[1] - v[0][1])) / det;
            let l2 = ((v[1][0] - v[0][0]) * (p[1] - v[0][1]) - (p[0] - v[0][0]) * (v[1][1] - v[0][1])) / det;
            let l0 = 1.0 - l1 - l2;
            if l0 >= -1e-12 && l1 >= -1e-12 && l2 >= -1e-12 {
                let lam = [l0, l1, l2];
                return (0..3).map(|j| if mesh.dof(tri[j]) == Some(k) { lam[j] } else { 0.0 }).sum();
            }
        }
        0.0
    };
    let x = l2_project(&ops, &mesh, hat).unwrap();
    for (d, &v) in x.iter().enumerate() {
        let e = if d == k { 1.0 } else { 0.0 };
        assert!((v - e).abs() < 1e-12, "dof {d}: {v}");
    }
}

#[test]
fn gaussian_projection_against_degree5_rule() {
    let (mesh, ops) = setup(32, 1.0);
    let g = gaussian_field([0.25, -0.1], 0.05).unwrap();
    let prod = l2_project(&ops, &mesh, |p| g.eval(p)).unwrap();
    let oracle = l2_project_with(&ops, &mesh, |p| g.eval(p), TriangleRule::Degree5).unwrap();
    let diff: f64 = prod.iter().zip(&oracle).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let norm: f64 = oracle.iter().map(|a| a * a).sum::<f64>().sqrt();
    let rel32 = diff / norm;
    let (mesh, ops) = setup(128, 1.0);
    let prod = load_vector_with(&mesh, |p| g.eval(p), TriangleRule::EdgeMidpoints);
    let oracle = load_vector_with(&mesh, |p| g.eval(p), TriangleRule::Degree5);
    let _ = ops;
    let diff: f64 = prod.iter().zip(&oracle).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let norm: f64 = oracle.iter().map(|a| a * a).sum::<f64>().sqrt();
    let rel128 = diff / norm;
    println!("rule gap: 32x32 {rel32:.3e}, 128x128 (load) {rel128:.3e}");
    assert!(rel128 < rel32 / 8.0);
}

#[test]
fn power_iteration_matches_dense_eigensolver() {
    let (_, ops) = setup(8, 1.0);
    let (vals, _) = generalized_eigen(&ops.stiffness, &ops.mass);
    let exact = *vals.last().unwrap();
    let r = max_generalized_eigenvalue(&ops, 1e-10, 20000).unwrap();
    assert!(r.converged);
    assert!((r.lambda_max - exact).abs() < 1e-6 * exact, "{} vs {exact}", r.lambda_max);
    let d = max_generalized_eigenvalue(&ops, 1e-6, 5000).unwrap();
    assert!((d.lambda_max - exact).abs() < 1e-4 * exact);
}

#[test]
fn beta_opt_roughly_doubles_under_refinement() {
    let mut betas = Vec::new();
    for n in [8, 16, 32] {
        let (_, ops) = setup(n, 1.0);
        let l = max_generalized_eigenvalue(&ops, 1e-8, 20000).unwrap().lambda_max;
        betas.push(optimal_beta(5.0, l).unwrap().beta_opt);
    }
    for w in betas.windows(2) {
        let r = w[1] / w[0];
        assert!((1.8..=2.2).contains(&r), "ratio {r}");
    }
}

#[test]
fn beta_formula_and_asymptotics() {
    for l in [1.0, 1e2, 1e6] {
        let b = optimal_beta(5.0, l).unwrap();
        assert_eq!(b.beta_opt, (25.0f64 + l).sqrt());
        assert!(b.eta > 1.0 && b.beta_opt > 5.0);
    }
    let b = optimal_beta(5.0, 1e14).unwrap();
    assert!((b.beta_opt / 1e7 - 1.0).abs() < 1e-6);
}
