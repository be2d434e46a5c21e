//! Snapshot computation with the `M/2` effective solves spread over a rayon
//! pool. Column placement does not depend on completion order.

use ltrb_core::laplace::LaplaceSolver;
use ltrb_core::{compute_snapshots, Forcing, OperatorSet, QuadratureRule, Result, SnapshotSet};
use rayon::prelude::*;

pub fn compute_snapshots_parallel(
    ops: &OperatorSet,
    rule: &QuadratureRule,
    u0h: &[f64],
    u1h: &[f64],
    forcing: &Forcing,
) -> Result<SnapshotSet> {
    let solver = LaplaceSolver::new(ops, u0h, u1h, forcing)?;
    let solved = rule
        .effective_columns()
        .into_par_iter()
        .map(|j| solver.snapshot_column(rule, j))
        .collect::<Result<Vec<_>>>()?;
    SnapshotSet::from_solved(rule.clone(), solved, u0h)
}

/// Serial or parallel snapshots.
pub fn snapshots(
    ops: &OperatorSet,
    rule: &QuadratureRule,
    u0h: &[f64],
    u1h: &[f64],
    forcing: &Forcing,
    parallel: bool,
) -> Result<SnapshotSet> {
    if parallel {
        compute_snapshots_parallel(ops, rule, u0h, u1h, forcing)
    } else {
        compute_snapshots(ops, rule, u0h, u1h, forcing)
    }
}
