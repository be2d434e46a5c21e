//! Sidecar `.meta` files next to persisted bases and snapshot sets.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ltrb_core::pod::ReducedBasis;
use ltrb_core::{make_quadrature, SnapshotSet};

use crate::error::{CliError, Context, Result};
use crate::io::mtx;

/// Reads `key = value` lines.
pub fn read_meta(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let l = line.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let (k, v) = l.split_once('=').ok_or_else(|| CliError::Format {
            path: path.to_path_buf(),
            line: i + 1,
            msg: "expected `key = value`".into(),
        })?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn field<T: std::str::FromStr>(path: &Path, meta: &BTreeMap<String, String>, key: &str) -> Result<T> {
    let raw = meta.get(key).ok_or_else(|| CliError::Format {
        path: path.to_path_buf(),
        line: 0,
        msg: format!("missing `{key}`"),
    })?;
    raw.parse().map_err(|_| CliError::Format {
        path: path.to_path_buf(),
        line: 0,
        msg: format!("cannot parse `{key} = {raw}`"),
    })
}

fn float_list(path: &Path, meta: &BTreeMap<String, String>, key: &str) -> Result<Vec<f64>> {
    let raw: String = field(path, meta, key)?;
    if raw == "-" {
        return Ok(Vec::new());
    }
    raw.split(',')
        .map(|t| {
            t.trim().parse().map_err(|_| CliError::Format {
                path: path.to_path_buf(),
                line: 0,
                msg: format!("bad number `{t}` in `{key}`"),
            })
        })
        .collect()
}

fn join(v: &[f64]) -> String {
    if v.is_empty() {
        return "-".into();
    }
    v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(", ")
}

fn hash(path: &Path, meta: &BTreeMap<String, String>) -> Result<u64> {
    let raw: String = field(path, meta, "mesh_hash")?;
    u64::from_str_radix(&raw, 16).map_err(|_| CliError::Format {
        path: path.to_path_buf(),
        line: 0,
        msg: format!("bad mesh hash `{raw}`"),
    })
}

pub fn meta_path(matrix: &Path) -> PathBuf {
    matrix.with_extension("meta")
}

/// Sampling parameters recorded with a basis or snapshot set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Provenance {
    pub alpha: f64,
    pub beta: f64,
    pub m: usize,
    pub c: f64,
}

/// Writes `Φ` to `path` and the metadata to the `.meta` sidecar.
pub fn save_basis(path: &Path, basis: &ReducedBasis, prov: &Provenance) -> Result<()> {
    mtx::write_array(path, basis.phi())?;
    let mut s = String::new();
    let _ = writeln!(s, "kind = reduced_basis");
    let _ = writeln!(s, "n_dofs = {}", basis.n_dofs());
    let _ = writeln!(s, "r = {}", basis.dim());
    let _ = writeln!(s, "requested = {}", basis.requested());
    let _ = writeln!(s, "rank = {}", basis.rank());
    let _ = writeln!(s, "alpha = {:e}", prov.alpha);
    let _ = writeln!(s, "beta = {:e}", prov.beta);
    let _ = writeln!(s, "m = {}", prov.m);
    let _ = writeln!(s, "c = {:e}", prov.c);
    let _ = writeln!(s, "mesh_hash = {:016x}", basis.mesh_hash());
    let _ = writeln!(s, "singular_values = {}", join(basis.singular_values()));
    let meta = meta_path(path);
    fs::write(&meta, s).map_err(CliError::io(meta))
}

pub fn load_basis(path: &Path) -> Result<(ReducedBasis, Provenance)> {
    let mp = meta_path(path);
    let meta = read_meta(&mp)?;
    let phi = mtx::read_array(path)?;
    let r: usize = field(&mp, &meta, "r")?;
    let n: usize = field(&mp, &meta, "n_dofs")?;
    if phi.ncols() != r || phi.nrows() != n {
        return Err(CliError::Incompatible(format!(
            "{}: matrix is {}x{} but metadata says {n}x{r}",
            path.display(),
            phi.nrows(),
            phi.ncols()
        )));
    }
    let sv = float_list(&mp, &meta, "singular_values")?;
    let basis = ReducedBasis::new(phi, sv, field(&mp, &meta, "requested")?, hash(&mp, &meta)?)
        .context(format!("basis {}", path.display()))?;
    let prov = Provenance {
        alpha: field(&mp, &meta, "alpha")?,
        beta: field(&mp, &meta, "beta")?,
        m: field(&mp, &meta, "m")?,
        c: field(&mp, &meta, "c")?,
    };
    Ok((basis, prov))
}

pub fn save_snapshots(path: &Path, snaps: &SnapshotSet, c: f64, mesh_hash: u64) -> Result<()> {
    mtx::write_array(path, &snaps.columns)?;
    let mut s = String::new();
    let _ = writeln!(s, "kind = snapshot_set");
    let _ = writeln!(s, "alpha = {:e}", snaps.rule.alpha);
    let _ = writeln!(s, "beta = {:e}", snaps.rule.beta);
    let _ = writeln!(s, "m = {}", snaps.rule.m);
    let _ = writeln!(s, "c = {c:e}");
    let _ = writeln!(s, "mesh_hash = {mesh_hash:016x}");
    let _ = writeln!(s, "n_solves = {}", snaps.n_solves);
    let _ = writeln!(s, "weights = {}", join(&snaps.weights));
    let meta = meta_path(path);
    fs::write(&meta, s).map_err(CliError::io(meta))
}

pub fn load_snapshots(path: &Path) -> Result<(SnapshotSet, f64, u64)> {
    let mp = meta_path(path);
    let meta = read_meta(&mp)?;
    let columns = mtx::read_array(path)?;
    let rule = make_quadrature(field(&mp, &meta, "alpha")?, field(&mp, &meta, "beta")?, field(&mp, &meta, "m")?)
        .context(format!("snapshot set {}", path.display()))?;
    let weights = float_list(&mp, &meta, "weights")?;
    if columns.ncols() != rule.m || weights.len() != rule.m {
        return Err(CliError::Format { path: mp, line: 0, msg: "column count does not match m".into() });
    }
    let snaps = SnapshotSet { columns, weights, rule, n_solves: field(&mp, &meta, "n_solves")? };
    Ok((snaps, field(&mp, &meta, "c")?, hash(&mp, &meta)?))
}
