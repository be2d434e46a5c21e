//! Relative space-time errors, singular-value series and timing summaries.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fem::OperatorSet;
use crate::linalg::CsrMatrix;
use crate::newmark::{CoordinateSpace, Trajectory};
use crate::pod::ReducedBasis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ErrorNorm {
    /// `‖v‖² = vᵀ M_h v`
    L2,
    /// `‖v‖² = vᵀ B_h v`
    H10,
}

impl ErrorNorm {
    pub fn matrix<'a>(&self, ops: &'a OperatorSet) -> &'a CsrMatrix {
        match self {
            ErrorNorm::L2 => &ops.mass,
            ErrorNorm::H10 => &ops.gram_h10,
        }
    }
}

/// Accumulates `Σ_j ‖u_h(t_j) − u_R(t_j)‖²` and `Σ_j ‖u_h(t_j)‖²` one time
/// point at a time, so neither trajectory has to be stored.
#[derive(Clone, Debug)]
pub struct ErrorAccumulator<'a> {
    matrix: &'a CsrMatrix,
    diff: Vec<f64>,
    work: Vec<f64>,
    err_sq: f64,
    ref_sq: f64,
    points: usize,
}

impl<'a> ErrorAccumulator<'a> {
    pub fn new(ops: &'a OperatorSet, norm: ErrorNorm) -> Self {
        let n = ops.n_dofs;
        Self { matrix: norm.matrix(ops), diff: vec![0.0; n], work: vec![0.0; n], err_sq: 0.0, ref_sq: 0.0, points: 0 }
    }

    pub fn add(&mut self, reference: &[f64], approx: &[f64]) -> Result<()> {
        let n = self.diff.len();
        Error::check_len(n, reference.len())?;
        Error::check_len(n, approx.len())?;
        for i in 0..n {
            self.diff[i] = reference[i] - approx[i];
        }
        self.matrix.mul_vec_into(&self.diff, &mut self.work);
        self.err_sq += self.diff.iter().zip(&self.work).map(|(a, b)| a * b).sum::<f64>();
        self.matrix.mul_vec_into(reference, &mut self.work);
        self.ref_sq += reference.iter().zip(&self.work).map(|(a, b)| a * b).sum::<f64>();
        self.points += 1;
        Ok(())
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn finish(&self) -> Result<f64> {
        if !(self.ref_sq > 0.0) {
            return Err(Error::ZeroReference);
        }
        Ok(libm::sqrt(self.err_sq.max(0.0) / self.ref_sq))
    }
}

/// `(Σ_j ‖u_h(t_j) − u_R(t_j)‖²_X)^{1/2} / (Σ_j ‖u_h(t_j)‖²_X)^{1/2}` over all
/// recorded time points.
pub fn relative_error(hf: &Trajectory, rb: &Trajectory, ops: &OperatorSet, norm: ErrorNorm) -> Result<f64> {
    if hf.space() != CoordinateSpace::Full || rb.space() != CoordinateSpace::Full {
        return Err(Error::invalid("relative error needs trajectories in full coordinates"));
    }
    if hf.times() != rb.times() {
        return Err(Error::invalid(format!("time grids differ ({} vs {} points)", hf.len(), rb.len())));
    }
    let mut acc = ErrorAccumulator::new(ops, norm);
    for j in 0..hf.len() {
        acc.add(hf.displacement(j), rb.displacement(j))?;
    }
    acc.finish()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularValueEntry {
    /// 1-based
    pub index: usize,
    pub sigma: f64,
    pub ratio: f64,
}

/// `(j, σ̌_j, σ̌_j / σ̌_1)` for every retained singular value.
pub fn singular_value_report(basis: &ReducedBasis) -> Result<Vec<SingularValueEntry>> {
    let sv = basis.singular_values();
    let first = match sv.first() {
        Some(&s) if s > 0.0 => s,
        _ => return Err(Error::invalid("basis has no singular values")),
    };
    Ok(sv
        .iter()
        .enumerate()
        .map(|(j, &sigma)| SingularValueEntry { index: j + 1, sigma, ratio: sigma / first })
        .collect())
}

/// Measured phase durations in seconds; `None` for phases that were not run.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseDurations {
    pub assemble_fem: Option<f64>,
    pub laplace_hf: Option<f64>,
    pub build_rb: Option<f64>,
    pub solve_td_rb: Option<f64>,
    pub solve_td_hf: Option<f64>,
    pub n_solves: usize,
    pub n_steps: usize,
    pub r: usize,
    pub n_dofs: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TimingReport {
    pub assemble_fem: f64,
    pub laplace_hf: f64,
    pub build_rb: f64,
    pub solve_td_rb: f64,
    pub solve_td_hf: f64,
    pub n_solves: usize,
    pub n_steps: usize,
    pub r: usize,
    pub n_dofs: usize,
    /// `assemble_fem + laplace_hf + build_rb + solve_td_rb`
    pub lt_rb_total: f64,
    /// `assemble_fem + solve_td_hf`
    pub hf_total: f64,
    /// `hf_total / lt_rb_total`, present only when both sides were measured.
    pub speedup: Option<f64>,
}

pub fn timing_report(phases: &PhaseDurations) -> Result<TimingReport> {
    let all = [phases.assemble_fem, phases.laplace_hf, phases.build_rb, phases.solve_td_rb, phases.solve_td_hf];
    if all.iter().flatten().any(|d| !(*d >= 0.0) || !d.is_finite()) {
        return Err(Error::invalid("phase durations must be finite and nonnegative"));
    }
    let get = |d: Option<f64>| d.unwrap_or(0.0);
    let lt_rb_total =
        get(phases.assemble_fem) + get(phases.laplace_hf) + get(phases.build_rb) + get(phases.solve_td_rb);
    let hf_total = get(phases.assemble_fem) + get(phases.solve_td_hf);
    let rb_measured = phases.laplace_hf.is_some() && phases.build_rb.is_some() && phases.solve_td_rb.is_some();
    let speedup = if rb_measured && phases.solve_td_hf.is_some() && lt_rb_total > 0.0 {
        Some(hf_total / lt_rb_total)
    } else {
        None
    };
    Ok(TimingReport {
        assemble_fem: get(phases.assemble_fem),
        laplace_hf: get(phases.laplace_hf),
        build_rb: get(phases.build_rb),
        solve_td_rb: get(phases.solve_td_rb),
        solve_td_hf: get(phases.solve_td_hf),
        n_solves: phases.n_solves,
        n_steps: phases.n_steps,
        r: phases.r,
        n_dofs: phases.n_dofs,
        lt_rb_total,
        hf_total,
        speedup,
    })
}
