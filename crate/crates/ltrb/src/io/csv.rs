//! Comma-separated outputs with a header row.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ltrb_core::metrics::SingularValueEntry;
use ltrb_core::newmark::CoordinateSpace;
use ltrb_core::Trajectory;

use crate::error::{CliError, Result};

fn write_rows(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> Result<()> {
    let io = CliError::io(path);
    let mut w = BufWriter::new(File::create(path).map_err(CliError::io(path))?);
    (|| {
        writeln!(w, "{header}")?;
        for r in rows {
            writeln!(w, "{r}")?;
        }
        w.flush()
    })()
    .map_err(io)
}

/// `t, dof_0, …` for full trajectories and `t, q_0, …` for reduced ones;
/// every `stride`-th recorded point plus the last.
pub fn write_trajectory(path: &Path, traj: &Trajectory, stride: usize) -> Result<()> {
    let prefix = match traj.space() {
        CoordinateSpace::Full => "dof",
        CoordinateSpace::Reduced => "q",
    };
    let mut header = String::from("t");
    for i in 0..traj.dim() {
        header.push_str(&format!(",{prefix}_{i}"));
    }
    let last = traj.len().saturating_sub(1);
    let rows = (0..traj.len()).filter(|j| j % stride.max(1) == 0 || *j == last).map(|j| {
        let mut row = format!("{:e}", traj.times()[j]);
        for v in traj.displacement(j) {
            row.push_str(&format!(",{v:e}"));
        }
        row
    });
    write_rows(path, &header, rows)
}

pub fn write_singular_values(path: &Path, entries: &[SingularValueEntry]) -> Result<()> {
    write_rows(path, "j,sigma,ratio", entries.iter().map(|e| format!("{},{:e},{:e}", e.index, e.sigma, e.ratio)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorRow {
    pub r: usize,
    pub err_l2: f64,
    pub err_h10: f64,
}

pub fn write_error_vs_r(path: &Path, rows: &[ErrorRow]) -> Result<()> {
    write_rows(path, "R,err_L2,err_H10", rows.iter().map(|e| format!("{},{:e},{:e}", e.r, e.err_l2, e.err_h10)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingRow {
    pub m: usize,
    pub n_solves: usize,
    pub beta: f64,
    pub rank: usize,
    pub error: ErrorRow,
}

pub fn write_error_vs_m(path: &Path, rows: &[SamplingRow]) -> Result<()> {
    write_rows(
        path,
        "M,n_solves,beta,rank,R,err_L2,err_H10",
        rows.iter().map(|s| {
            format!(
                "{},{},{:e},{},{},{:e},{:e}",
                s.m, s.n_solves, s.beta, s.rank, s.error.r, s.error.err_l2, s.error.err_h10
            )
        }),
    )
}

pub fn write_timings(path: &Path, rows: &[(String, f64)]) -> Result<()> {
    write_rows(path, "phase,seconds", rows.iter().map(|(p, s)| format!("{p},{s:.6}")))
}
