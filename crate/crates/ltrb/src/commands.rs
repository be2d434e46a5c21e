//! Subcommand implementations. Each writes its files under the output
//! directory and a short report to stdout.

use std::fs;
use std::path::{Path, PathBuf};

use ltrb_core::metrics::PhaseDurations;
use ltrb_core::{mesh_quality, singular_value_report, timing_report};

use crate::config::RunConfig;
use crate::error::{CliError, Context, Result};
use crate::io::csv::{self, ErrorRow};
use crate::io::meta::{self, Provenance};
use crate::io::mtx::{self, Symmetry};
use crate::pipeline::{self, build_problem, select_beta, Problem, Sampling};

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub basis: Option<PathBuf>,
    pub parallel: bool,
}

fn out_dir(cfg: &RunConfig, opts: &Options) -> Result<PathBuf> {
    let dir = opts.out.clone().unwrap_or_else(|| cfg.out_dir.clone());
    fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
    Ok(dir)
}

fn report_beta(s: &Sampling) {
    match (s.power, s.selection) {
        (Some(p), Some(sel)) => {
            println!(
                "lambda_max = {:.10e} ({} power iterations{})",
                p.lambda_max,
                p.iterations,
                if p.converged { "" } else { ", not converged" }
            );
            println!(
                "alpha = {}, beta_opt = sqrt(alpha^2 + lambda_max) = {:.10e}, eta = {:.6}",
                sel.alpha, sel.beta_opt, sel.eta
            );
        }
        _ => println!("beta = {:e} (fixed)", s.beta),
    }
}

fn problem_summary(p: &Problem) {
    println!(
        "mesh: {} vertices, {} triangles, {} dofs, h = {:.6e} (hash {:016x})",
        p.mesh.n_vertices(),
        p.mesh.n_triangles(),
        p.ops.n_dofs,
        p.mesh.h(),
        p.ops.mesh_hash
    );
}

pub fn cmd_full(cfg: &RunConfig, opts: &Options) -> Result<()> {
    let dir = out_dir(cfg, opts)?;
    let problem = build_problem(cfg)?;
    problem_summary(&problem);
    if cfg.export_operators {
        mtx::write_coordinate(&dir.join("mass.mtx"), &problem.ops.mass, Symmetry::Symmetric)?;
        mtx::write_coordinate(&dir.join("stiffness.mtx"), &problem.ops.stiffness, Symmetry::Symmetric)?;
        mtx::write_coordinate(&dir.join("gram_h10.mtx"), &problem.ops.gram_h10, Symmetry::Symmetric)?;
    }
    let (traj, secs) = pipeline::run_full(&problem, cfg, cfg.trajectory_stride)?;
    csv::write_trajectory(&dir.join("trajectory_full.csv"), &traj, 1)?;
    let t = timing_report(&PhaseDurations {
        assemble_fem: Some(problem.assemble_secs),
        solve_td_hf: Some(secs),
        n_steps: cfg.n_steps,
        n_dofs: problem.ops.n_dofs,
        ..Default::default()
    })
    .context("timing report")?;
    csv::write_timings(
        &dir.join("timings_full.csv"),
        &[
            ("assemble_fem".into(), t.assemble_fem),
            ("solve_td_hf".into(), t.solve_td_hf),
            ("hf_total".into(), t.hf_total),
        ],
    )?;
    println!("Assemble FEM {:.3} s, Solve TD-HF {:.3} s ({} steps)", t.assemble_fem, t.solve_td_hf, cfg.n_steps);
    Ok(())
}

pub fn default_basis_path(dir: &Path) -> PathBuf {
    dir.join("basis.mtx")
}

pub fn cmd_offline(cfg: &RunConfig, opts: &Options) -> Result<()> {
    let dir = out_dir(cfg, opts)?;
    let (m, r) = (cfg.m()?, cfg.r()?);
    let problem = build_problem(cfg)?;
    problem_summary(&problem);
    let start = std::time::Instant::now();
    let sampling = select_beta(&problem, cfg)?;
    let beta_secs = start.elapsed().as_secs_f64();
    report_beta(&sampling);
    let off = pipeline::run_offline(&problem, cfg, &sampling, m, r, opts.parallel || cfg.parallel_snapshots)?;
    let path = opts.basis.clone().unwrap_or_else(|| default_basis_path(&dir));
    meta::save_basis(&path, &off.basis, &Provenance { alpha: cfg.alpha, beta: sampling.beta, m, c: cfg.c })?;
    csv::write_singular_values(
        &dir.join("singular_values.csv"),
        &singular_value_report(&off.basis).context("singular values")?,
    )?;
    let laplace = beta_secs + off.laplace_secs;
    csv::write_timings(
        &dir.join("timings_offline.csv"),
        &[
            ("assemble_fem".into(), problem.assemble_secs),
            ("laplace_hf".into(), laplace),
            ("build_rb".into(), off.build_secs),
        ],
    )?;
    println!(
        "M = {m}: {} effective solves, rank {}, R = {}{}",
        off.snapshots.n_solves,
        off.basis.rank(),
        off.basis.dim(),
        if off.basis.truncated() { " (truncated to the rank)" } else { "" }
    );
    println!("Assemble FEM {:.3} s, LD-HF {:.3} s, Build RB {:.3} s", problem.assemble_secs, laplace, off.build_secs);
    println!("basis written to {}", path.display());
    Ok(())
}

pub fn cmd_online(cfg: &RunConfig, opts: &Options) -> Result<()> {
    let dir = out_dir(cfg, opts)?;
    let path = opts.basis.clone().unwrap_or_else(|| default_basis_path(&dir));
    let (basis, prov) = meta::load_basis(&path)?;
    let problem = build_problem(cfg)?;
    problem_summary(&problem);
    if basis.mesh_hash() != problem.ops.mesh_hash {
        return Err(CliError::Incompatible(format!(
            "basis {} was built on mesh {:016x}, the configured mesh is {:016x}",
            path.display(),
            basis.mesh_hash(),
            problem.ops.mesh_hash
        )));
    }
    if prov.c != cfg.c {
        eprintln!("note: basis was sampled with c = {}, running with c = {}", prov.c, cfg.c);
    }
    let r = cfg.r().unwrap_or(basis.dim());
    if r > basis.dim() {
        eprintln!("note: pod.r = {r} exceeds the stored basis dimension {}; using {}", basis.dim(), basis.dim());
    }
    let (_, traj, secs) = pipeline::run_online(&problem, &basis, r, cfg, cfg.trajectory_stride)?;
    csv::write_trajectory(&dir.join("trajectory_reduced.csv"), &traj, 1)?;
    if cfg.lift {
        let lifted = ltrb_core::lift(&basis, &traj).context("lifting")?;
        csv::write_trajectory(&dir.join("trajectory_lifted.csv"), &lifted, 1)?;
    }
    csv::write_timings(&dir.join("timings_online.csv"), &[("solve_td_rb".into(), secs)])?;
    println!("R = {}: Solve TD-RB {:.3} s ({} steps)", traj.dim(), secs, cfg.n_steps);
    Ok(())
}

pub fn cmd_compare(cfg: &RunConfig, opts: &Options) -> Result<()> {
    let dir = out_dir(cfg, opts)?;
    let problem = build_problem(cfg)?;
    problem_summary(&problem);
    let cmp = pipeline::run_compare(&problem, cfg, opts.parallel || cfg.parallel_snapshots)?;
    report_beta(&cmp.sampling);
    let mut timings = vec![("assemble_fem".to_string(), cmp.assemble_secs), ("solve_td_hf".to_string(), cmp.hf_secs)];
    let mut speedups = Vec::new();
    for s in &cmp.studies {
        csv::write_singular_values(&dir.join(format!("singular_values_M{}.csv", s.m)), &s.singular_values)?;
        csv::write_error_vs_r(&dir.join(format!("error_vs_R_M{}.csv", s.m)), &s.errors)?;
        let t = &s.timing;
        timings.push((format!("laplace_hf M={}", s.m), t.laplace_hf));
        timings.push((format!("build_rb M={}", s.m), t.build_rb));
        timings.push((format!("solve_td_rb M={} R={}", s.m, t.r), t.solve_td_rb));
        timings.push((format!("lt_rb_total M={}", s.m), t.lt_rb_total));
        speedups.push(format!(
            "{},{},{:.6},{:.6},{}",
            s.m,
            t.r,
            t.lt_rb_total,
            t.hf_total,
            t.speedup.map_or("-".to_string(), |x| format!("{x:.3}"))
        ));
        let ErrorRow { r, err_l2, err_h10 } = s.summary.error;
        println!(
            "M = {:5}: {} solves, rank {:4}, R = {r}: err_L2 = {err_l2:.3e}, err_H10 = {err_h10:.3e}, speedup {}",
            s.m,
            s.n_solves,
            s.summary.rank,
            t.speedup.map_or("-".to_string(), |x| format!("{x:.2}x"))
        );
    }
    timings.push(("hf_total".into(), cmp.assemble_secs + cmp.hf_secs));
    csv::write_error_vs_m(&dir.join("error_vs_M.csv"), &cmp.studies.iter().map(|s| s.summary).collect::<Vec<_>>())?;
    csv::write_timings(&dir.join("timings.csv"), &timings)?;
    let sp = dir.join("speedup.csv");
    let mut text = String::from("M,R,lt_rb_seconds,hf_seconds,speedup\n");
    for l in speedups {
        text.push_str(&l);
        text.push('\n');
    }
    fs::write(&sp, text).map_err(CliError::io(&sp))?;
    for (m, r) in &cmp.skipped_r {
        eprintln!("note: R = {r} skipped for M = {m}, basis dimension is smaller");
    }
    println!("Assemble FEM {:.3} s, Solve TD-HF {:.3} s", cmp.assemble_secs, cmp.hf_secs);
    Ok(())
}

pub fn cmd_quality(cfg: &RunConfig) -> Result<()> {
    let mesh = pipeline::build_mesh(cfg)?;
    let q = mesh_quality(&mesh).context("mesh quality")?;
    println!("triangles = {}", q.n_triangles);
    println!("dofs = {}", q.n_dofs);
    println!("h = {:.10e}", q.h);
    println!("gamma = {:.10}", q.gamma);
    println!("c_qu = {:.10}", q.c_qu);
    println!("mesh_hash = {:016x}", mesh.hash());
    Ok(())
}

pub fn cmd_beta(cfg: &RunConfig) -> Result<()> {
    let mesh = pipeline::build_mesh(cfg)?;
    let ops = ltrb_core::assemble_operators(&mesh, cfg.c).context("assembly")?;
    let power = ltrb_core::max_generalized_eigenvalue(&ops, cfg.spectral_tol, cfg.spectral_max_iter)
        .context("largest generalized eigenvalue")?;
    let sel = ltrb_core::optimal_beta(cfg.alpha, power.lambda_max).context("optimal beta")?;
    report_beta(&Sampling { beta: sel.beta_opt, power: Some(power), selection: Some(sel) });
    if let crate::config::BetaSpec::Fixed(b) = cfg.beta {
        println!("configured beta = {b:e} overrides beta_opt in offline runs");
    }
    Ok(())
}
