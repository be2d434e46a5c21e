use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = "mesh.n = 8\nphysics.c = 1\nic.x0 = 0.25, -0.1\nic.zeta = 0.05\nlaplace.m = 20\npod.r = 5\n\
                     time.t_final = 0.5\ntime.n_steps = 50\n";

fn ltrb(dir: &Path, args: &[&str], config: &str) -> Output {
    let cfg = dir.join("run.conf");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_ltrb"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn missing_key_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace("physics.c = 1\n", "");
    let out = ltrb(dir.path(), &["full"], &text);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("physics.c"), "{}", stderr(&out));
}

#[test]
fn unknown_key_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = ltrb(dir.path(), &["full"], &format!("{SMALL}time.dt = 3\n"));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("time.dt"));
}

#[test]
fn odd_sample_count_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = ltrb(dir.path(), &["offline"], &SMALL.replace("laplace.m = 20", "laplace.m = 21"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_flag_exits_with_config_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_ltrb")).arg("full").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn basis_from_other_mesh_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let off = ltrb(dir.path(), &["offline"], SMALL);
    assert!(off.status.success(), "{}", stderr(&off));
    let basis = dir.path().join("out").join("basis.mtx");
    assert!(basis.exists());
    let on =
        ltrb(dir.path(), &["online", "--basis", basis.to_str().unwrap()], &SMALL.replace("mesh.n = 8", "mesh.n = 10"));
    assert_eq!(on.status.code(), Some(4), "{}", stderr(&on));
    let same = ltrb(dir.path(), &["online", "--basis", basis.to_str().unwrap()], SMALL);
    assert!(same.status.success(), "{}", stderr(&same));
    assert!(dir.path().join("out").join("trajectory_reduced.csv").exists());
    assert!(dir.path().join("out").join("trajectory_lifted.csv").exists());
}

#[test]
fn zero_initial_data_gives_zero_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace("ic.zeta = 0.05", "ic.zeta = 0.05\nic.amplitude = 0");
    let out = ltrb(dir.path(), &["full"], &text);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("out").join("trajectory_full.csv")).unwrap();
    for line in csv.lines().skip(1) {
        assert!(line.split(',').skip(1).all(|v| v.parse::<f64>().unwrap() == 0.0));
    }
}

#[test]
fn full_run_writes_trajectory_and_timings() {
    let dir = tempfile::tempdir().unwrap();
    let out = ltrb(dir.path(), &["full"], SMALL);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("out").join("trajectory_full.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("t,dof_0"));
    assert_eq!(csv.lines().count(), 52);
    assert!(dir.path().join("out").join("timings_full.csv").exists());
}
