//! End-to-end tests driving the compiled binary.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hmch"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn simulate_conserves_the_mean_and_emits_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "N=128\ndt=1e-3\nT=0.05\noutput_every=10\ninitial=sine(1,1,0.2)\n",
    );
    let out_dir = dir.path().join("out");
    let out = run(&["simulate", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let diag = read(&out_dir.join("diagnostics.csv"));
    let mut lines = diag.lines();
    assert_eq!(lines.next().unwrap(), "t,mu,E1,sup_u,sup_ux,H4,dissipation");
    for line in lines {
        let mu: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((mu - 0.2).abs() < 1e-10, "mu drifted: {line}");
    }
    assert!(out_dir.join("u_t0.000000.csv").exists());
    assert!(out_dir.join("u_t0.050000.csv").exists());
}

#[test]
fn emitted_fields_round_trip_through_the_csv_initial_loader() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "N=128\ndt=1e-3\nT=0\ninitial=sine(0.7,2,0.1)\n");
    let first = dir.path().join("first");
    assert_eq!(
        code(&run(&["diagnose", "--config", &cfg, "--out", first.to_str().unwrap()])),
        0
    );

    let u0 = first.join("u0.csv");
    let cfg2 = write_config(
        dir.path(),
        &format!("N=128\ndt=1e-3\nT=0\ninitial=csv({})\n", u0.display()),
    );
    let second = dir.path().join("second");
    assert_eq!(
        code(&run(&["diagnose", "--config", &cfg2, "--out", second.to_str().unwrap()])),
        0
    );
    // 17-significant-digit serialization makes the round trip bit-exact
    assert_eq!(read(&u0), read(&second.join("u0.csv")));
}

#[test]
fn csv_initial_with_wrong_row_count_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "N=128\ndt=1e-3\nT=0\ninitial=sine(1,1,0)\n");
    let first = dir.path().join("first");
    run(&["diagnose", "--config", &cfg, "--out", first.to_str().unwrap()]);

    let cfg2 = write_config(
        dir.path(),
        &format!(
            "N=256\ndt=1e-3\nT=0\ninitial=csv({})\n",
            first.join("u0.csv").display()
        ),
    );
    let out = run(&["diagnose", "--config", &cfg2, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("row count"), "message: {msg}");
}

#[test]
fn invalid_configs_exit_2_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    for (text, key) in [
        ("N=255\ndt=1e-3\nT=0\ninitial=constant(0)\n", "N"),
        ("N=128\ndt=-1\nT=0\ninitial=constant(0)\n", "dt"),
        ("N=128\ndt=1e-3\nT=0\nwhat=1\ninitial=constant(0)\n", "what"),
    ] {
        let cfg = write_config(dir.path(), text);
        let out = run(&["simulate", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
        assert_eq!(code(&out), 2, "config: {text}");
        let msg = String::from_utf8_lossy(&out.stderr);
        assert!(msg.contains(&format!("`{key}`")), "message: {msg}");
    }
}

#[test]
fn viscous_requires_positive_epsilon_and_tracks_dissipation() {
    let dir = tempfile::tempdir().unwrap();
    let inviscid = write_config(dir.path(), "N=128\ndt=1e-3\nT=0.01\ninitial=sine(1,1,0)\n");
    let out = run(&["viscous", "--config", &inviscid, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);

    let cfg = write_config(
        dir.path(),
        "N=128\ndt=1e-3\nT=0.05\nscheme=ifrk4\nepsilon=1e-3\noutput_every=10\ninitial=sine(1,1,0)\n",
    );
    let out_dir = dir.path().join("visc");
    let out = run(&["viscous", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let diag = read(&out_dir.join("diagnostics.csv"));
    let dissipation: Vec<f64> = diag
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(6).unwrap().parse().unwrap())
        .collect();
    assert!(dissipation.windows(2).all(|w| w[1] > w[0]), "{dissipation:?}");
}

#[test]
fn greens_table_matches_the_series_tail_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "greens",
        "--N",
        "256",
        "--K",
        "10000",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let table = read(&dir.path().join("greens.csv"));
    let mut lines = table.lines();
    assert_eq!(lines.next().unwrap(), "x,g_closed,g_series_K,abs_diff");
    let max_diff = lines
        .map(|l| l.split(',').nth(3).unwrap().parse::<f64>().unwrap())
        .fold(0.0f64, f64::max);
    assert!(max_diff <= 1e-4, "max abs_diff {max_diff:e}");
}

#[test]
fn residual_emits_norms_and_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "residual",
        "--s",
        "4",
        "--sigma",
        "2",
        "--n-list",
        "8,16,32,64",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let table = read(&dir.path().join("residual.csv"));
    let mut lines = table.lines();
    assert_eq!(lines.next().unwrap(), "n,Hsigma_norm");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5); // four modes plus the slope line
    let slope_row = rows.last().unwrap();
    assert!(slope_row.starts_with("slope,"));
    let slope: f64 = slope_row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((slope + 5.0).abs() <= 0.3, "slope {slope}");
}

#[test]
fn residual_with_too_few_modes_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "residual",
        "--s",
        "4",
        "--sigma",
        "2",
        "--n-list",
        "8,16",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn peakon_short_run_passes_its_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "peakon",
        "--c",
        "1",
        "--N",
        "256",
        "--dt",
        "1e-4",
        "--T",
        "0.01",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let table = read(&dir.path().join("peakon_error.csv"));
    assert_eq!(table.lines().next().unwrap(), "t,L2_error,Linf_error");
}

#[test]
fn nonuniform_emits_a_passing_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "nonuniform",
        "--s",
        "4",
        "--n-list",
        "8,16",
        "--N",
        "128",
        "--dt",
        "5e-4",
        "--phases",
        "0.8,1.6",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("nonuniform.json"))).unwrap();
    assert_eq!(doc["verdict"], "PASS");
    assert!((doc["curves"][0]["d0"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!(doc["kappa"].as_f64().unwrap() > 0.0);
}
