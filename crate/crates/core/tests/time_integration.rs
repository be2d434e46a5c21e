mod common;

use common::{dense_to_na, generalized_eigen, setup, to_na};
use ltrb_core::linalg::DenseMatrix;
use ltrb_core::metrics::ErrorNorm;
use ltrb_core::newmark::{newmark_solve_strided, project, CoordinateSpace, DenseSystem, SecondOrderSystem};
use ltrb_core::pod::ReducedBasis;
use ltrb_core::{
    build_reduced_basis, cholesky_gram, compute_snapshots, gaussian_field, l2_project, lift, make_quadrature,
    newmark_solve, reduce_system, relative_error, Error, Forcing, NewmarkConfig, TemporalProfile, Trajectory,
};

fn oscillator_error(omega: f64, n_steps: usize) -> f64 {
    let m = DenseMatrix::identity(1);
    let k = DenseMatrix::from_fn(1, 1, |_, _| omega * omega);
    let cfg = NewmarkConfig::new(1.0, n_steps).unwrap();
    let traj =
        newmark_solve(&DenseSystem { mass: &m, stiffness: &k }, |_, f| f.fill(0.0), &[1.0], &[0.0], &cfg).unwrap();
    (traj.displacement(n_steps)[0] - omega.cos()).abs()
}

/// `Φ = L⁻ᵀ` with `B = L Lᵀ`, a B-orthonormal basis of all of V_h.
fn full_basis(ops: &ltrb_core::OperatorSet) -> ReducedBasis {
    let n = ops.n_dofs;
    let chol = to_na(&ops.gram_h10).cholesky().unwrap();
    let phi = chol.l().transpose().try_inverse().unwrap();
    let phi = DenseMatrix::from_fn(n, n, |i, j| phi[(i, j)]);
    ReducedBasis::new(phi, vec![1.0; n], n, ops.mesh_hash).unwrap()
}

fn gaussian_ic(n: usize) -> (ltrb_core::Mesh, ltrb_core::OperatorSet, Vec<f64>) {
    let (mesh, ops) = setup(n, 1.0);
    let g = gaussian_field([0.25, -0.1], 0.05).unwrap();
    let u0 = l2_project(&ops, &mesh, |p| g.eval(p)).unwrap();
    (mesh, ops, u0)
}

#[test]
fn second_order_convergence() {
    let omega = 3.0;
    let e: Vec<f64> = [100, 200, 400].iter().map(|&n| oscillator_error(omega, n)).collect();
    for w in e.windows(2) {
        let ratio = w[0] / w[1];
        let order = ratio.log2();
        assert!((3.6..=4.4).contains(&ratio) && (1.9..=2.1).contains(&order), "ratio {ratio}");
    }
}

#[test]
fn energy_is_conserved_full_and_reduced() {
    let (_, ops, u0) = gaussian_ic(8);
    let v0: Vec<f64> = (0..ops.n_dofs).map(|i| (i as f64).sin()).collect();
    let cfg = NewmarkConfig::new(1.0, 2000).unwrap();
    let sys = ops.system();
    let traj = newmark_solve(&sys, |_, f| f.fill(0.0), &u0, &v0, &cfg).unwrap();
    let e0 = sys.energy(traj.displacement(0), traj.velocity(0));
    let drift = (0..traj.len())
        .map(|j| (sys.energy(traj.displacement(j), traj.velocity(j)) - e0).abs() / e0)
        .fold(0.0, f64::max);
    assert!(drift < 1e-10, "full drift {drift}");

    let rule = make_quadrature(5.0, 20.0, 40).unwrap();
    let snaps = compute_snapshots(&ops, &rule, &u0, &v0, &Forcing::zero()).unwrap();
    let basis = build_reduced_basis(&snaps, &cholesky_gram(&ops).unwrap(), 12).unwrap();
    let red = reduce_system(&ops, &basis, &u0, &v0, &Forcing::zero()).unwrap();
    let rt = red.solve(&cfg, 1).unwrap();
    let rs = red.system();
    let e0 = rs.energy(rt.displacement(0), rt.velocity(0));
    let drift =
        (0..rt.len()).map(|j| (rs.energy(rt.displacement(j), rt.velocity(j)) - e0).abs() / e0).fold(0.0, f64::max);
    assert!(drift < 1e-8, "reduced drift {drift}");
}

#[test]
fn full_basis_reproduces_full_trajectory() {
    let (_, ops, u0) = gaussian_ic(8);
    let u1: Vec<f64> = (0..ops.n_dofs).map(|i| 0.1 * (i as f64 * 0.3).cos()).collect();
    let profile: Vec<f64> = (0..ops.n_dofs).map(|i| 0.01 * (i as f64 * 0.7).sin()).collect();
    let forcing = Forcing::new(profile, TemporalProfile::Exponential { rate: 1.5 }).unwrap();
    let cfg = NewmarkConfig::new(1.0, 500).unwrap();
    let full = newmark_solve(&ops.system(), |t, f| forcing.load_at(t, f), &u0, &u1, &cfg).unwrap();
    let basis = full_basis(&ops);
    let red = reduce_system(&ops, &basis, &u0, &u1, &forcing).unwrap();
    let lifted = lift(&basis, &red.solve(&cfg, 1).unwrap()).unwrap();
    let mut worst: f64 = 0.0;
    for j in 0..full.len() {
        let d: Vec<f64> = full.displacement(j).iter().zip(lifted.displacement(j)).map(|(a, b)| a - b).collect();
        let rel = (ops.mass.quadratic_form(&d) / ops.mass.quadratic_form(full.displacement(j))).sqrt();
        worst = worst.max(rel);
    }
    assert!(worst < 1e-8, "{worst}");
    assert!(relative_error(&full, &lifted, &ops, ErrorNorm::H10).unwrap() < 1e-8);
}

#[test]
fn reduced_stiffness_is_scaled_identity() {
    let (_, ops, u0) = gaussian_ic(10);
    let zero = vec![0.0; ops.n_dofs];
    let rule = make_quadrature(5.0, 30.0, 60).unwrap();
    let snaps = compute_snapshots(&ops, &rule, &u0, &zero, &Forcing::zero()).unwrap();
    let basis = build_reduced_basis(&snaps, &cholesky_gram(&ops).unwrap(), 25).unwrap();
    let phi = dense_to_na(basis.phi());
    let a_r = phi.transpose() * to_na(&ops.stiffness) * &phi;
    let defect = (a_r - nalgebra::DMatrix::<f64>::identity(basis.dim(), basis.dim())).abs().max();
    assert!(defect < 1e-10, "{defect}");
    let red = reduce_system(&ops, &basis, &zero, &zero, &Forcing::zero()).unwrap();
    assert!(red.u0_r.iter().chain(&red.u1_r).all(|&x| x == 0.0));
    assert!(to_na(&ops.mass).cholesky().is_some());
    assert!(dense_to_na(&red.mass_r).cholesky().is_some());
}

#[test]
fn one_dimensional_reduction() {
    let (_, ops, u0) = gaussian_ic(6);
    let phi: Vec<f64> = (0..ops.n_dofs).map(|i| 1.0 + (i as f64 * 0.2).sin()).collect();
    let nb = ops.gram_h10.quadratic_form(&phi).sqrt();
    let phi: Vec<f64> = phi.iter().map(|x| x / nb).collect();
    let basis = ReducedBasis::new(
        DenseMatrix::from_columns(ops.n_dofs, std::slice::from_ref(&phi)).unwrap(),
        vec![1.0],
        1,
        ops.mesh_hash,
    )
    .unwrap();
    let red = reduce_system(&ops, &basis, &u0, &u0, &Forcing::zero()).unwrap();
    assert!((red.mass_r[(0, 0)] - ops.mass.quadratic_form(&phi)).abs() < 1e-15);
    let bu0 = ops.gram_h10.mul_vec(&u0);
    let expect: f64 = phi.iter().zip(&bu0).map(|(a, b)| a * b).sum();
    assert!((red.u0_r[0] - expect).abs() < 1e-14 * expect.abs());
}

#[test]
fn lift_after_projection_is_identity_on_span() {
    let (_, ops, u0) = gaussian_ic(16);
    let zero = vec![0.0; ops.n_dofs];
    let rule = make_quadrature(5.0, 40.0, 40).unwrap();
    let snaps = compute_snapshots(&ops, &rule, &u0, &zero, &Forcing::zero()).unwrap();
    let basis = build_reduced_basis(&snaps, &cholesky_gram(&ops).unwrap(), 15).unwrap();
    let r = basis.dim();
    let mut seed = 3u64;
    for _ in 0..5 {
        let x: Vec<f64> = (0..r)
            .map(|_| {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
                (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        let v = basis.phi().mul_vec(&x);
        let q = project(&basis, &ops, &v).unwrap();
        let traj =
            Trajectory::from_parts(CoordinateSpace::Reduced, r, vec![0], vec![0.0], q.clone(), q.clone(), q).unwrap();
        let back = lift(&basis, &traj).unwrap();
        let scale = v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        for (a, b) in back.displacement(0).iter().zip(&v) {
            assert!((a - b).abs() < 1e-10 * scale);
        }
    }
    let zero_traj = Trajectory::from_parts(
        CoordinateSpace::Reduced,
        r,
        vec![0, 1],
        vec![0.0, 0.5],
        vec![0.0; 2 * r],
        vec![0.0; 2 * r],
        vec![0.0; 2 * r],
    )
    .unwrap();
    let lifted = lift(&basis, &zero_traj).unwrap();
    assert!(lifted.displacement(1).iter().all(|&x| x == 0.0));
    assert_eq!(lifted.times(), &[0.0, 0.5]);
}

#[test]
fn mismatched_basis_is_refused() {
    let (_, ops, u0) = gaussian_ic(8);
    let (_, other) = setup(9, 1.0);
    let basis = full_basis(&other);
    let err = reduce_system(&ops, &basis, &u0, &u0, &Forcing::zero()).unwrap_err();
    assert!(matches!(err, Error::IncompatibleBasis { .. }));
    let too_big = Trajectory::from_parts(
        CoordinateSpace::Reduced,
        3,
        vec![0],
        vec![0.0],
        vec![0.0; 3],
        vec![0.0; 3],
        vec![0.0; 3],
    )
    .unwrap();
    let small = ReducedBasis::new(
        DenseMatrix::from_fn(ops.n_dofs, 2, |i, j| (i == j) as u8 as f64),
        vec![1.0, 1.0],
        2,
        ops.mesh_hash,
    )
    .unwrap();
    assert!(lift(&small, &too_big).is_err());
}

#[test]
fn zero_error_iff_identical_and_zero_reference() {
    let (_, ops, u0) = gaussian_ic(6);
    let cfg = NewmarkConfig::new(0.5, 20).unwrap();
    let a = newmark_solve(&ops.system(), |_, f| f.fill(0.0), &u0, &u0, &cfg).unwrap();
    assert_eq!(relative_error(&a, &a, &ops, ErrorNorm::L2).unwrap(), 0.0);
    let b = newmark_solve(&ops.system(), |_, f| f.fill(0.0), &u0, &vec![0.0; ops.n_dofs], &cfg).unwrap();
    assert!(relative_error(&a, &b, &ops, ErrorNorm::L2).unwrap() > 0.0);
    assert!(relative_error(&a, &b, &ops, ErrorNorm::H10).unwrap() > 0.0);
    let zero = vec![0.0; ops.n_dofs];
    let z = newmark_solve(&ops.system(), |_, f| f.fill(0.0), &zero, &zero, &cfg).unwrap();
    assert_eq!(relative_error(&z, &a, &ops, ErrorNorm::L2), Err(Error::ZeroReference));
    let strided =
        newmark_solve_strided(&ops.system(), |_, f| f.fill(0.0), &u0, &u0, &cfg, 3, CoordinateSpace::Full).unwrap();
    assert!(relative_error(&a, &strided, &ops, ErrorNorm::L2).is_err());
}

#[test]
fn modal_solution_matches_closed_form() {
    let (_, ops) = setup(8, 1.0);
    let (vals, vecs) = generalized_eigen(&ops.stiffness, &ops.mass);
    let v: Vec<f64> = vecs[2].iter().copied().collect();
    let omega = vals[2].sqrt();
    let n_steps = 4000;
    let cfg = NewmarkConfig::new(1.0, n_steps).unwrap();
    let traj = newmark_solve(&ops.system(), |_, f| f.fill(0.0), &v, &vec![0.0; ops.n_dofs], &cfg).unwrap();
    let dt = cfg.dt();
    let discrete = 2.0 / dt * (omega * dt / 2.0).atan();
    let end = traj.displacement(n_steps);
    for (a, b) in end.iter().zip(&v) {
        assert!((a - (discrete * 1.0).cos() * b).abs() < 1e-9 * v.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    }
}
