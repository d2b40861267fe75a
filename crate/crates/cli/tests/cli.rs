use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use chebdir_core::PointCloud;

fn chebdir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chebdir")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

const AXIS: &str = "
[experiment]
kind = tau-sweep
name = axis
expected = 1

[set]
model = torus
radii = 1, 2
mesh = 2pi/16

[sweep]
theta = 1, 0
j_max = 10
";

#[test]
fn passing_sweep_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "axis.conf", AXIS);
    let out = dir.path().join("out");
    let o = chebdir(&["sweep", "--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("axis_sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 11);
    assert!(csv.starts_with("j;alpha;tau;rel_gap;tau_half_mesh;window_max;window_min\n"));
    assert!(out.join("axis_sweep.svg").exists());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("PASS verdict"));
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "axis.conf", AXIS);
    let out = dir.path().join("out");
    let o = chebdir(&[
        "sweep", "--config", &cfg, "--out-dir", out.to_str().unwrap(), "--theta", "0.5,0.5", "--name", "diag", "--tol", "0.05",
    ]);
    // the limit is now sqrt 2, not the configured 1
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL limit"));
    assert!(out.join("diag_sweep.csv").exists());
}

#[test]
fn config_errors_exit_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.conf", &AXIS.replace("tau-sweep", "tau-sweeep"));
    assert_eq!(code(&chebdir(&["sweep", "--config", &bad])), 4);
    let missing = dir.path().join("nope.conf");
    assert_eq!(code(&chebdir(&["sweep", "--config", missing.to_str().unwrap()])), 4);
    // a sweep config under the verify command
    let cfg = write_config(dir.path(), "axis.conf", AXIS);
    assert_eq!(code(&chebdir(&["verify", "--config", &cfg])), 4);
    assert_eq!(code(&chebdir(&["gen", "--model", "torus", "--params", "radii=1:-1", "--mesh", "1"])), 4);
}

#[test]
fn runtime_failures_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "axis.conf", AXIS);
    // about 4e9 points, far above the sampling cap
    let o = chebdir(&["sweep", "--config", &cfg, "--mesh", "1e-4", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
}

#[test]
fn runs_without_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = chebdir(&[
        "sweep", "--model", "zaharjuta", "--mesh", "2pi/16", "--kind", "counterexample", "--j-max", "12",
        "--out-dir", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 4, "interleaving must be requested in the config");
    let cfg = write_config(dir.path(), "z.conf", "[experiment]\nkind = counterexample\n[sweep]\nsequence = interleaved\nhalf_mesh = false\n");
    let o = chebdir(&[
        "sweep", "--config", &cfg, "--model", "zaharjuta", "--mesh", "2pi/16", "--j-max", "12", "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS oscillation"));
}

#[test]
fn delta_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = chebdir(&[
        "delta", "--model", "unit-circle", "--mesh", "2pi/64", "--method", "fekete", "--n", "4,8", "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("delta_delta.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "n;log_Vn;l_n;delta_estimate");
    assert!(rows[1].starts_with("4;") && rows[2].starts_with("8;"));
}

#[test]
fn gen_round_trips_through_the_file_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.txt");
    let o = chebdir(&[
        "gen", "--model", "product-discs", "--params", "centers=0.3:0.2i,radii=1:2", "--mesh", "2pi/8", "--weight",
        "gaussian:0.5", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("#dim=2 "));
    let cloud = PointCloud::read_from(text.as_bytes()).unwrap();
    assert_eq!(cloud.len(), 64);
    assert!(!cloud.is_unweighted());
}

#[test]
fn extremal_at_points() {
    let o = chebdir(&["extremal", "--model", "unit-circle", "--mesh", "2pi/64", "--n", "4", "--at", "2;0.5i"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8(o.stdout).unwrap();
    let vals: Vec<f64> = out.lines().skip(1).map(|l| l.rsplit(';').next().unwrap().parse().unwrap()).collect();
    assert!((vals[0] - 2f64.ln()).abs() < 1e-6);
    assert!(vals[1].abs() < 1e-6);
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "axis.conf", &AXIS.replace("theta = 1, 0", "theta = 0.3, 0.7"));
    let run = |threads: &str, sub: &str| {
        let out = dir.path().join(sub);
        let o = Command::new(env!("CARGO_BIN_EXE_chebdir"))
            .env("CHEBDIR_THREADS", threads)
            .args(["sweep", "--config", &cfg, "--out-dir", out.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(o.status.code().is_some());
        fs::read(out.join("axis_sweep.csv")).unwrap()
    };
    assert_eq!(run("1", "a"), run("3", "b"));
}
