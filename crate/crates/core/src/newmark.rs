//! Implicit Newmark time stepping for `M ü + K u = f(t)`, shared by the full
//! finite-element system and the Galerkin-reduced one.
//!
//! With predictors `ũ = uⁿ + Δt vⁿ + Δt²(½ − β) aⁿ` and
//! `ṽ = vⁿ + Δt(1 − γ) aⁿ`, each step solves
//! `(M + βΔt² K) aⁿ⁺¹ = f(tⁿ⁺¹) − K ũ` and corrects
//! `uⁿ⁺¹ = ũ + βΔt² aⁿ⁺¹`, `vⁿ⁺¹ = ṽ + γΔt aⁿ⁺¹`. The effective matrix is
//! factored once per run.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fem::OperatorSet;
use crate::forcing::{Forcing, TemporalProfile};
use crate::linalg::{dot, CsrMatrix, DenseCholesky, DenseMatrix, LdlFactor, Ordering};
use crate::pod::ReducedBasis;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewmarkConfig {
    pub t_final: f64,
    pub n_steps: usize,
    pub gamma: f64,
    pub beta: f64,
}

impl NewmarkConfig {
    /// Average-acceleration scheme (`γ = 1/2`, `β = 1/4`).
    pub fn new(t_final: f64, n_steps: usize) -> Result<Self> {
        let cfg = Self { t_final, n_steps, gamma: 0.5, beta: 0.25 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::invalid(format!("final time must be positive, got {}", self.t_final)));
        }
        if self.n_steps < 1 {
            return Err(Error::invalid("need at least one time step"));
        }
        if !(self.gamma >= 0.0 && self.beta >= 0.0) {
            return Err(Error::invalid(format!(
                "Newmark parameters must be nonnegative, got gamma = {}, beta = {}",
                self.gamma, self.beta
            )));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }

    /// Time of grid point `j`; the last point is exactly `t_final`.
    pub fn time(&self, j: usize) -> f64 {
        if j == self.n_steps {
            self.t_final
        } else {
            j as f64 * self.dt()
        }
    }
}

/// Solver for the effective matrix.
pub trait LinearSolver {
    fn solve_in_place(&self, b: &mut [f64]);
}

impl LinearSolver for LdlFactor<f64> {
    fn solve_in_place(&self, b: &mut [f64]) {
        LdlFactor::solve_in_place(self, b)
    }
}

impl LinearSolver for DenseCholesky {
    fn solve_in_place(&self, b: &mut [f64]) {
        DenseCholesky::solve_in_place(self, b)
    }
}

/// Mass/stiffness pair of a linear second-order system.
pub trait SecondOrderSystem {
    type Solver: LinearSolver;

    fn dim(&self) -> usize;
    fn apply_mass(&self, x: &[f64], y: &mut [f64]);
    fn apply_stiffness(&self, x: &[f64], y: &mut [f64]);
    /// Factors `a M + b K`.
    fn factor_combination(&self, mass_coeff: f64, stiffness_coeff: f64) -> Result<Self::Solver>;

    /// `½ vᵀMv + ½ uᵀKu`
    fn energy(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut tmp = vec![0.0; self.dim()];
        self.apply_mass(v, &mut tmp);
        let kin = dot(v, &tmp);
        self.apply_stiffness(u, &mut tmp);
        0.5 * (kin + dot(u, &tmp))
    }
}

/// Sparse pair, e.g. `(M_h, A_h)`.
#[derive(Clone, Copy, Debug)]
pub struct SparseSystem<'a> {
    pub mass: &'a CsrMatrix,
    pub stiffness: &'a CsrMatrix,
}

impl SecondOrderSystem for SparseSystem<'_> {
    type Solver = LdlFactor<f64>;

    fn dim(&self) -> usize {
        self.mass.nrows()
    }
    fn apply_mass(&self, x: &[f64], y: &mut [f64]) {
        self.mass.mul_vec_into(x, y)
    }
    fn apply_stiffness(&self, x: &[f64], y: &mut [f64]) {
        self.stiffness.mul_vec_into(x, y)
    }
    fn factor_combination(&self, a: f64, b: f64) -> Result<Self::Solver> {
        let m = self.mass.zip_map(self.stiffness, |mv, kv| a * mv + b * kv)?;
        LdlFactor::new(&m, Ordering::NestedDissection)
    }
}

impl OperatorSet {
    /// The semi-discrete wave system `(M_h, A_h)`.
    pub fn system(&self) -> SparseSystem<'_> {
        SparseSystem { mass: &self.mass, stiffness: &self.stiffness }
    }
}

/// Dense pair, e.g. a reduced model.
#[derive(Clone, Copy, Debug)]
pub struct DenseSystem<'a> {
    pub mass: &'a DenseMatrix,
    pub stiffness: &'a DenseMatrix,
}

impl SecondOrderSystem for DenseSystem<'_> {
    type Solver = DenseCholesky;

    fn dim(&self) -> usize {
        self.mass.nrows()
    }
    fn apply_mass(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(&self.mass.mul_vec(x));
    }
    fn apply_stiffness(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(&self.stiffness.mul_vec(x));
    }
    fn factor_combination(&self, a: f64, b: f64) -> Result<Self::Solver> {
        let n = self.dim();
        let m = DenseMatrix::from_fn(n, n, |i, j| a * self.mass[(i, j)] + b * self.stiffness[(i, j)]);
        DenseCholesky::factor(&m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoordinateSpace {
    /// Finite-element dof coefficients, length `N_h`.
    Full,
    /// Reduced-basis coefficients, length `R`.
    Reduced,
}

/// Recorded Newmark states on a uniform time grid.
///
/// With a recording stride `k`, grid points `0, k, 2k, …` are kept, and the
/// final time is always included.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    steps: Vec<usize>,
    dim: usize,
    displacements: Vec<f64>,
    velocities: Vec<f64>,
    accelerations: Vec<f64>,
    space: CoordinateSpace,
}

impl Trajectory {
    fn empty(dim: usize, space: CoordinateSpace, capacity: usize) -> Self {
        Self {
            times: Vec::with_capacity(capacity),
            steps: Vec::with_capacity(capacity),
            dim,
            displacements: Vec::with_capacity(capacity * dim),
            velocities: Vec::with_capacity(capacity * dim),
            accelerations: Vec::with_capacity(capacity * dim),
            space,
        }
    }

    /// Builds a trajectory from row-major state blocks, one row per time point.
    pub fn from_parts(
        space: CoordinateSpace,
        dim: usize,
        steps: Vec<usize>,
        times: Vec<f64>,
        displacements: Vec<f64>,
        velocities: Vec<f64>,
        accelerations: Vec<f64>,
    ) -> Result<Self> {
        let n = times.len();
        Error::check_len(n, steps.len())?;
        for block in [&displacements, &velocities, &accelerations] {
            Error::check_len(n * dim, block.len())?;
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("trajectory times must be strictly increasing"));
        }
        Ok(Self { times, steps, dim, displacements, velocities, accelerations, space })
    }

    fn push(&mut self, step: usize, t: f64, u: &[f64], v: &[f64], a: &[f64]) {
        self.steps.push(step);
        self.times.push(t);
        self.displacements.extend_from_slice(u);
        self.velocities.extend_from_slice(v);
        self.accelerations.extend_from_slice(a);
    }

    /// Number of recorded time points.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn space(&self) -> CoordinateSpace {
        self.space
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Grid indices of the recorded points.
    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn displacement(&self, j: usize) -> &[f64] {
        &self.displacements[j * self.dim..(j + 1) * self.dim]
    }

    pub fn velocity(&self, j: usize) -> &[f64] {
        &self.velocities[j * self.dim..(j + 1) * self.dim]
    }

    pub fn acceleration(&self, j: usize) -> &[f64] {
        &self.accelerations[j * self.dim..(j + 1) * self.dim]
    }
}

/// Runs Newmark and hands every state `(step, t, u, v, a)` to `observer`,
/// starting with the initial state at step 0.
pub fn newmark_run<S: SecondOrderSystem>(
    sys: &S,
    mut load: impl FnMut(f64, &mut [f64]),
    u0: &[f64],
    v0: &[f64],
    cfg: &NewmarkConfig,
    mut observer: impl FnMut(usize, f64, &[f64], &[f64], &[f64]),
) -> Result<()> {
    cfg.validate()?;
    let n = sys.dim();
    Error::check_len(n, u0.len())?;
    Error::check_len(n, v0.len())?;
    let dt = cfg.dt();
    let bdt2 = cfg.beta * dt * dt;

    let mut u = u0.to_vec();
    let mut v = v0.to_vec();
    let mut a = vec![0.0; n];
    let mut f = vec![0.0; n];
    let mut ku = vec![0.0; n];

    if n == 0 {
        for j in 0..=cfg.n_steps {
            observer(j, cfg.time(j), &u, &v, &a);
        }
        return Ok(());
    }

    // M a⁰ = f(0) − K u⁰
    load(0.0, &mut f);
    sys.apply_stiffness(&u, &mut ku);
    for i in 0..n {
        a[i] = f[i] - ku[i];
    }
    let mass =
        sys.factor_combination(1.0, 0.0).map_err(|e| Error::NumericalFailure(format!("mass factorization: {e}")))?;
    mass.solve_in_place(&mut a);
    observer(0, 0.0, &u, &v, &a);

    let effective = sys
        .factor_combination(1.0, bdt2)
        .map_err(|e| Error::NumericalFailure(format!("effective matrix factorization: {e}")))?;
    let c_u = dt * dt * (0.5 - cfg.beta);
    let c_v = dt * (1.0 - cfg.gamma);
    let g_dt = cfg.gamma * dt;
    for step in 1..=cfg.n_steps {
        let t = cfg.time(step);
        for i in 0..n {
            u[i] += dt * v[i] + c_u * a[i];
            v[i] += c_v * a[i];
        }
        load(t, &mut f);
        sys.apply_stiffness(&u, &mut ku);
        for i in 0..n {
            a[i] = f[i] - ku[i];
        }
        effective.solve_in_place(&mut a);
        for i in 0..n {
            u[i] += bdt2 * a[i];
            v[i] += g_dt * a[i];
        }
        observer(step, t, &u, &v, &a);
    }
    Ok(())
}

/// Newmark solve recording every `stride`-th grid point (and the last one).
pub fn newmark_solve_strided<S: SecondOrderSystem>(
    sys: &S,
    load: impl FnMut(f64, &mut [f64]),
    u0: &[f64],
    v0: &[f64],
    cfg: &NewmarkConfig,
    stride: usize,
    space: CoordinateSpace,
) -> Result<Trajectory> {
    if stride == 0 {
        return Err(Error::invalid("recording stride must be at least 1"));
    }
    let mut traj = Trajectory::empty(sys.dim(), space, cfg.n_steps / stride + 2);
    newmark_run(sys, load, u0, v0, cfg, |step, t, u, v, a| {
        if step % stride == 0 || step == cfg.n_steps {
            traj.push(step, t, u, v, a);
        }
    })?;
    Ok(traj)
}

/// Newmark solve recording all `N_t + 1` grid points in full coordinates.
pub fn newmark_solve<S: SecondOrderSystem>(
    sys: &S,
    load: impl FnMut(f64, &mut [f64]),
    u0: &[f64],
    v0: &[f64],
    cfg: &NewmarkConfig,
) -> Result<Trajectory> {
    newmark_solve_strided(sys, load, u0, v0, cfg, 1, CoordinateSpace::Full)
}

/// Galerkin-reduced wave system `M_R ü + c² u = f_R(t)`.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    /// `Φᵀ M_h Φ`
    pub mass_r: DenseMatrix,
    /// `c² I_R`
    pub stiffness_r: DenseMatrix,
    /// `Φᵀ B_h u₀ₕ`
    pub u0_r: Vec<f64>,
    /// `Φᵀ B_h u₁ₕ`
    pub u1_r: Vec<f64>,
    /// `Φᵀ b`, the spatial part of `f_R(t) = q(t) Φᵀ b`; empty without forcing.
    pub load_profile_r: Vec<f64>,
    pub temporal: TemporalProfile,
    pub c: f64,
}

impl ReducedSystem {
    pub fn dim(&self) -> usize {
        self.mass_r.nrows()
    }

    pub fn system(&self) -> DenseSystem<'_> {
        DenseSystem { mass: &self.mass_r, stiffness: &self.stiffness_r }
    }

    pub fn load_at(&self, t: f64, out: &mut [f64]) {
        if self.load_profile_r.is_empty() || matches!(self.temporal, TemporalProfile::Zero) {
            out.fill(0.0);
            return;
        }
        let q = self.temporal.value(t);
        for (o, &b) in out.iter_mut().zip(&self.load_profile_r) {
            *o = q * b;
        }
    }

    /// Reduced Newmark solve, recording every `stride`-th grid point.
    pub fn solve(&self, cfg: &NewmarkConfig, stride: usize) -> Result<Trajectory> {
        newmark_solve_strided(
            &self.system(),
            |t, out| self.load_at(t, out),
            &self.u0_r,
            &self.u1_r,
            cfg,
            stride,
            CoordinateSpace::Reduced,
        )
    }
}

/// `Φᵀ B_h x`, the reduced coordinates of the B-orthogonal projection.
pub fn project(basis: &ReducedBasis, ops: &OperatorSet, x: &[f64]) -> Result<Vec<f64>> {
    Error::check_len(ops.n_dofs, x.len())?;
    let bx = ops.gram_h10.mul_vec(x);
    Ok(basis.phi().tr_mul_vec(&bx))
}

pub fn reduce_system(
    ops: &OperatorSet,
    basis: &ReducedBasis,
    u0h: &[f64],
    u1h: &[f64],
    forcing: &Forcing,
) -> Result<ReducedSystem> {
    if basis.mesh_hash() != ops.mesh_hash {
        return Err(Error::IncompatibleBasis { basis: basis.mesh_hash(), operators: ops.mesh_hash });
    }
    Error::check_len(ops.n_dofs, basis.n_dofs())?;
    let phi = basis.phi();
    let r = basis.dim();
    let mut m_phi = DenseMatrix::zeros(ops.n_dofs, r);
    for j in 0..r {
        ops.mass.mul_vec_into(phi.column(j), m_phi.column_mut(j));
    }
    let mut mass_r = phi.tr_mul(&m_phi);
    // symmetrize away rounding
    for j in 0..r {
        for i in 0..j {
            let avg = 0.5 * (mass_r[(i, j)] + mass_r[(j, i)]);
            mass_r[(i, j)] = avg;
            mass_r[(j, i)] = avg;
        }
    }
    let c2 = ops.c * ops.c;
    let stiffness_r = DenseMatrix::from_fn(r, r, |i, j| if i == j { c2 } else { 0.0 });
    let load_profile_r = if forcing.is_zero() {
        Vec::new()
    } else {
        Error::check_len(ops.n_dofs, forcing.profile.len())?;
        phi.tr_mul_vec(&forcing.profile)
    };
    Ok(ReducedSystem {
        mass_r,
        stiffness_r,
        u0_r: project(basis, ops, u0h)?,
        u1_r: project(basis, ops, u1h)?,
        load_profile_r,
        temporal: forcing.temporal,
        c: ops.c,
    })
}

/// Maps a reduced trajectory back to dof coefficients with the leading
/// `traj.dim()` basis vectors.
pub fn lift(basis: &ReducedBasis, traj: &Trajectory) -> Result<Trajectory> {
    if traj.space() != CoordinateSpace::Reduced {
        return Err(Error::invalid("only reduced trajectories can be lifted"));
    }
    if traj.dim() > basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), found: traj.dim() });
    }
    let phi = basis.phi().leading_columns(traj.dim());
    let mut out = Trajectory::empty(basis.n_dofs(), CoordinateSpace::Full, traj.len());
    for j in 0..traj.len() {
        out.push(
            traj.steps[j],
            traj.times[j],
            &phi.mul_vec(traj.displacement(j)),
            &phi.mul_vec(traj.velocity(j)),
            &phi.mul_vec(traj.acceleration(j)),
        );
    }
    Ok(out)
}
