//! The LT-RB pipeline with wall-clock phase timings.

use std::time::Instant;

use ltrb_core::metrics::{ErrorAccumulator, PhaseDurations, SingularValueEntry};
use ltrb_core::newmark::{newmark_solve_strided, CoordinateSpace};
use ltrb_core::pod::ReducedBasis;
use ltrb_core::{
    assemble_operators, build_reduced_basis, build_structured_mesh, cholesky_gram, gaussian_field, l2_project,
    load_vector, make_quadrature, max_generalized_eigenvalue, optimal_beta, reduce_system, singular_value_report,
    timing_report, BetaSelection, ErrorNorm, Forcing, Mesh, NewmarkConfig, OperatorSet, PowerIteration, QuadratureRule,
    ReducedSystem, SnapshotSet, TimingReport, Trajectory,
};

use crate::config::{BetaSpec, InitialVelocity, MeshSource, RunConfig};
use crate::error::{CliError, Context, Result};
use crate::io::csv::{ErrorRow, SamplingRow};
use crate::io::mesh_text;
use crate::snapshots::snapshots;

pub fn build_mesh(cfg: &RunConfig) -> Result<Mesh> {
    match &cfg.mesh {
        MeshSource::Structured { n, domain } => build_structured_mesh(*n, *domain).context("mesh generation"),
        MeshSource::File(path) => mesh_text::read_mesh(path),
    }
}

/// Discretized problem: mesh, operators, projected initial data and load.
pub struct Problem {
    pub mesh: Mesh,
    pub ops: OperatorSet,
    pub u0: Vec<f64>,
    pub u1: Vec<f64>,
    pub forcing: Forcing,
    /// Seconds spent in mesh generation, assembly and data projection.
    pub assemble_secs: f64,
}

pub fn build_problem(cfg: &RunConfig) -> Result<Problem> {
    let start = Instant::now();
    let mesh = build_mesh(cfg)?;
    let ops = assemble_operators(&mesh, cfg.c).context("assembly")?;
    let g0 = gaussian_field(cfg.ic_x0, cfg.ic_zeta).context("initial displacement")?;
    let u0 = l2_project(&ops, &mesh, |p| cfg.ic_amplitude * g0.eval(p)).context("initial displacement")?;
    let u1 = match cfg.u1 {
        InitialVelocity::Zero => vec![0.0; ops.n_dofs],
        InitialVelocity::Gaussian { x0, zeta, amplitude } => {
            let g = gaussian_field(x0, zeta).context("initial velocity")?;
            l2_project(&ops, &mesh, |p| amplitude * g.eval(p)).context("initial velocity")?
        }
    };
    let forcing = if cfg.forcing.amplitude == 0.0 {
        Forcing::zero()
    } else {
        let f = cfg.forcing;
        let g = gaussian_field(f.x0, f.zeta).context("forcing")?;
        let profile = load_vector(&mesh, |p| f.amplitude * g.eval(p));
        Forcing::new(profile, f.temporal).context("forcing")?
    };
    Ok(Problem { mesh, ops, u0, u1, forcing, assemble_secs: start.elapsed().as_secs_f64() })
}

pub fn newmark_config(cfg: &RunConfig) -> Result<NewmarkConfig> {
    NewmarkConfig::new(cfg.t_final, cfg.n_steps).context("time grid")
}

/// Full-order Newmark run recording every `stride`-th step.
pub fn run_full(problem: &Problem, cfg: &RunConfig, stride: usize) -> Result<(Trajectory, f64)> {
    let nm = newmark_config(cfg)?;
    let start = Instant::now();
    let traj = newmark_solve_strided(
        &problem.ops.system(),
        |t, out| problem.forcing.load_at(t, out),
        &problem.u0,
        &problem.u1,
        &nm,
        stride,
        CoordinateSpace::Full,
    )
    .context("full-order time stepping")?;
    Ok((traj, start.elapsed().as_secs_f64()))
}

#[derive(Clone, Copy, Debug)]
pub struct Sampling {
    pub beta: f64,
    pub power: Option<PowerIteration>,
    pub selection: Option<BetaSelection>,
}

pub fn select_beta(problem: &Problem, cfg: &RunConfig) -> Result<Sampling> {
    match cfg.beta {
        BetaSpec::Fixed(beta) => Ok(Sampling { beta, power: None, selection: None }),
        BetaSpec::Auto => {
            let power = max_generalized_eigenvalue(&problem.ops, cfg.spectral_tol, cfg.spectral_max_iter)
                .context("largest generalized eigenvalue")?;
            if !power.converged {
                eprintln!(
                    "warning: power iteration stopped after {} iterations without reaching tol {:e}",
                    power.iterations, cfg.spectral_tol
                );
            }
            let sel = optimal_beta(cfg.alpha, power.lambda_max).context("optimal beta")?;
            Ok(Sampling { beta: sel.beta_opt, power: Some(power), selection: Some(sel) })
        }
    }
}

pub struct Offline {
    pub rule: QuadratureRule,
    pub snapshots: SnapshotSet,
    pub basis: ReducedBasis,
    /// β selection, quadrature and snapshot solves.
    pub laplace_secs: f64,
    /// Cholesky of `B_h`, SVD and back substitution.
    pub build_secs: f64,
}

pub fn run_offline(
    problem: &Problem,
    cfg: &RunConfig,
    sampling: &Sampling,
    m: usize,
    r: usize,
    parallel: bool,
) -> Result<Offline> {
    let start = Instant::now();
    let rule = make_quadrature(cfg.alpha, sampling.beta, m).context("quadrature")?;
    let snaps = snapshots(&problem.ops, &rule, &problem.u0, &problem.u1, &problem.forcing, parallel)
        .context(format!("Laplace snapshots (M = {m})"))?;
    let laplace_secs = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let factor = cholesky_gram(&problem.ops).context("Cholesky factor of the H1_0 Gram matrix")?;
    let basis = build_reduced_basis(&snaps, &factor, r).context(format!("POD basis (M = {m})"))?;
    let build_secs = start.elapsed().as_secs_f64();
    Ok(Offline { rule, snapshots: snaps, basis, laplace_secs, build_secs })
}

/// Reduced system and reduced Newmark run on the leading `r` basis vectors.
pub fn run_online(
    problem: &Problem,
    basis: &ReducedBasis,
    r: usize,
    cfg: &RunConfig,
    stride: usize,
) -> Result<(ReducedSystem, Trajectory, f64)> {
    let nm = newmark_config(cfg)?;
    let sub = basis.leading(r.min(basis.dim())).context("basis truncation")?;
    let start = Instant::now();
    let red = reduce_system(&problem.ops, &sub, &problem.u0, &problem.u1, &problem.forcing).context("reduction")?;
    let traj = red.solve(&nm, stride).context("reduced time stepping")?;
    Ok((red, traj, start.elapsed().as_secs_f64()))
}

/// Relative L² and H¹₀ space-time errors of `Φ_R q` against `hf`.
pub fn reduced_errors(
    problem: &Problem,
    hf: &Trajectory,
    basis: &ReducedBasis,
    reduced: &Trajectory,
) -> Result<ErrorRow> {
    if hf.times() != reduced.times() {
        return Err(CliError::Incompatible("full and reduced trajectories use different time grids".into()));
    }
    let r = reduced.dim();
    let phi = basis.phi().leading_columns(r);
    let mut l2 = ErrorAccumulator::new(&problem.ops, ErrorNorm::L2);
    let mut h10 = ErrorAccumulator::new(&problem.ops, ErrorNorm::H10);
    for j in 0..hf.len() {
        let lifted = phi.mul_vec(reduced.displacement(j));
        l2.add(hf.displacement(j), &lifted).context("relative error")?;
        h10.add(hf.displacement(j), &lifted).context("relative error")?;
    }
    Ok(ErrorRow { r, err_l2: l2.finish().context("relative error")?, err_h10: h10.finish().context("relative error")? })
}

pub struct SamplingStudy {
    pub m: usize,
    pub beta: f64,
    pub n_solves: usize,
    pub singular_values: Vec<SingularValueEntry>,
    pub errors: Vec<ErrorRow>,
    pub summary: SamplingRow,
    pub timing: TimingReport,
}

pub struct Comparison {
    pub assemble_secs: f64,
    pub hf_secs: f64,
    pub sampling: Sampling,
    pub studies: Vec<SamplingStudy>,
    pub skipped_r: Vec<(usize, usize)>,
}

/// Full run once, then an offline run per `M` and an online run per `(M, R)`.
pub fn run_compare(problem: &Problem, cfg: &RunConfig, parallel: bool) -> Result<Comparison> {
    let mut r_values = cfg.r_values()?;
    r_values.sort_unstable();
    r_values.dedup();
    let m_values = cfg.m_values()?;
    let r_target = cfg.r()?;
    let r_max = r_values.iter().copied().chain([r_target]).max().unwrap_or(1);
    let stride = cfg.error_stride;

    let (hf, hf_secs) = run_full(problem, cfg, stride)?;
    let beta_start = Instant::now();
    let sampling = select_beta(problem, cfg)?;
    let beta_secs = beta_start.elapsed().as_secs_f64();

    let mut studies = Vec::new();
    let mut skipped_r = Vec::new();
    for &m in &m_values {
        let off = run_offline(problem, cfg, &sampling, m, r_max, parallel)?;
        let dim = off.basis.dim();
        let mut errors = Vec::new();
        for &r in &r_values {
            if r > dim {
                skipped_r.push((m, r));
                continue;
            }
            let (_, traj, _) = run_online(problem, &off.basis, r, cfg, stride)?;
            errors.push(reduced_errors(problem, &hf, &off.basis, &traj)?);
        }
        let r_eff = r_target.min(dim);
        let (_, traj, rb_secs) = run_online(problem, &off.basis, r_eff, cfg, stride)?;
        let summary_err = reduced_errors(problem, &hf, &off.basis, &traj)?;
        let timing = timing_report(&PhaseDurations {
            assemble_fem: Some(problem.assemble_secs),
            laplace_hf: Some(beta_secs + off.laplace_secs),
            build_rb: Some(off.build_secs),
            solve_td_rb: Some(rb_secs),
            solve_td_hf: Some(hf_secs),
            n_solves: off.snapshots.n_solves,
            n_steps: cfg.n_steps,
            r: r_eff,
            n_dofs: problem.ops.n_dofs,
        })
        .context("timing report")?;
        studies.push(SamplingStudy {
            m,
            beta: off.rule.beta,
            n_solves: off.snapshots.n_solves,
            singular_values: singular_value_report(&off.basis).context("singular values")?,
            errors,
            summary: SamplingRow {
                m,
                n_solves: off.snapshots.n_solves,
                beta: off.rule.beta,
                rank: off.basis.rank(),
                error: summary_err,
            },
            timing,
        });
    }
    Ok(Comparison { assemble_secs: problem.assemble_secs, hf_secs, sampling, studies, skipped_r })
}
