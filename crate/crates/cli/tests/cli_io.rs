//! Output-format, exit-code, and config-file behavior of the binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cavity-bec"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cavity-bec-test-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn traj_csv_shape_and_rerun_identical() {
    let args = [
        "traj",
        "--model",
        "double-well",
        "--lambda",
        "1.5",
        "--z0",
        "0.5",
        "--phi0",
        "3.141592653589793",
        "--t-end",
        "2",
        "--dt",
        "1e-3",
        "--stride",
        "100",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "reruns must be byte-identical");
    let text = stdout_str(&a);
    assert!(text.starts_with("t,z,phi,energy\n"));
    assert!(text.ends_with('\n'));
    assert_eq!(text.lines().count(), 1 + 21);
    // all values parse and the orbit is self-trapped
    for line in text.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(cols.len(), 4);
        assert!(cols[1] > 0.0);
    }
}

#[test]
fn traj_photon_column_for_weak_model() {
    let out = run(&[
        "traj",
        "--model",
        "weak",
        "--delta",
        "-0.5",
        "--lambda-ratio",
        "8",
        "--k",
        "10",
        "--z0",
        "-0.5",
        "--phi0",
        "0",
        "--t-end",
        "1",
        "--stride",
        "200",
        "--ensemble-size",
        "100",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    assert!(text.starts_with("t,z,phi,energy,n_photon\n"));
    for line in text.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        // n = N(k - z)/2 with N = 100, k = 10
        assert!((cols[4] - 100.0 * (10.0 - cols[1]) / 2.0).abs() < 1e-9);
    }
}

#[test]
fn traj_json_round_trips_and_matches_csv() {
    let base = [
        "traj",
        "--model",
        "weak",
        "--delta",
        "-0.5",
        "--lambda-ratio",
        "1",
        "--k",
        "10",
        "--z0",
        "0.5",
        "--phi0",
        "0",
        "--t-end",
        "1",
        "--stride",
        "100",
    ];
    let csv = stdout_str(&run(&base));
    let mut json_args = base.to_vec();
    json_args.extend(["--format", "json"]);
    let json_text = stdout_str(&run(&json_args));
    let v: serde_json::Value = serde_json::from_str(&json_text).expect("valid json");
    assert_eq!(v["termination"], "completed");
    let zs: Vec<f64> = v["z"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let csv_z: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(zs.len(), csv_z.len());
    for (a, b) in zs.iter().zip(&csv_z) {
        assert_eq!(a.to_bits(), b.to_bits(), "json and csv must carry identical values");
    }
}

#[test]
fn boundary_hit_writes_file_notes_termination_and_exits_3() {
    let dir = temp_dir("boundary");
    let path = dir.join("traj.csv");
    let out = run(&[
        "traj",
        "--model",
        "weak",
        "--delta",
        "0",
        "--lambda-ratio",
        "0",
        "--k",
        "0.3",
        "--z0",
        "0.25",
        "--phi0",
        "1.5707963267948966",
        "--t-end",
        "10",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t,z,phi,energy\n"));
    assert!(text.ends_with("# termination=boundary_hit\n"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn missing_parameters_exit_2() {
    let out = run(&["traj", "--model", "double-well", "--lambda", "1.0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["fixed-points", "--model", "weak", "--delta", "0"]);
    assert_eq!(out.status.code(), Some(2));
    // clap-level parse failure
    let out = run(&["traj", "--model", "no-such-model"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn no_transition_exits_4() {
    let out = run(&[
        "bifurcation",
        "--model",
        "weak",
        "--delta",
        "0",
        "--lambda-ratio",
        "2",
        "--bisect-k",
        "--k-range",
        "5",
        "50",
        "--tol",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn fixed_points_empty_result_is_header_only() {
    // k < -1 leaves no accessible imbalance at all
    let out = run(&[
        "fixed-points",
        "--model",
        "weak",
        "--delta",
        "0",
        "--lambda-ratio",
        "1",
        "--k",
        "-2",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout_str(&out), "phi_star,z_star,stability,branch\n");
}

#[test]
fn config_file_supplies_parameters_and_flags_override() {
    let dir = temp_dir("config");
    let cfg = dir.join("run.conf");
    std::fs::write(
        &cfg,
        "model=weak\ndelta=-0.5\nlambda-ratio=8\nk=10\nz0=0.5\nphi0=0\nt-end=1\nstride=100\n",
    )
    .unwrap();
    let from_file = run(&["traj", "--config", cfg.to_str().unwrap()]);
    assert!(from_file.status.success());
    let from_flags = run(&[
        "traj",
        "--model",
        "weak",
        "--delta",
        "-0.5",
        "--lambda-ratio",
        "8",
        "--k",
        "10",
        "--z0",
        "0.5",
        "--phi0",
        "0",
        "--t-end",
        "1",
        "--stride",
        "100",
    ]);
    assert_eq!(from_file.stdout, from_flags.stdout);
    // an explicit flag wins over the file entry
    let overridden = run(&[
        "traj",
        "--config",
        cfg.to_str().unwrap(),
        "--z0",
        "-0.5",
    ]);
    assert!(overridden.status.success());
    assert_ne!(overridden.stdout, from_file.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reduce_golden_output() {
    // pure-arithmetic reduction: the bytes are fully determined by IEEE
    // semantics
    let out = run(&[
        "reduce",
        "--omega0",
        "1",
        "--omega-a",
        "1.002",
        "--g",
        "0.01",
        "--kappa",
        "0.001",
        "--chi",
        "0",
        "--xi",
        "0.04",
        "--n",
        "100000",
    ]);
    assert!(out.status.success());
    let expected = "{\n  \"eta\": 0.0000000000000000e0,\n  \"nu\": 4.9950049950049959e-3,\n  \
                    \"omega\": 1.0000000000000000e0,\n  \"delta\": 2.0000000000000018e-3,\n  \
                    \"lambda\": 4.9950049950049959e-3,\n  \"detuning\": 6.0060000000000024e-1,\n  \
                    \"coupling_ratio\": 8.0079999999999991e0,\n  \"warnings\": []\n}\n";
    assert_eq!(stdout_str(&out), expected);
}

#[test]
fn reduce_reports_weak_regime_warnings() {
    let out = run(&[
        "reduce",
        "--omega0",
        "1",
        "--omega-a",
        "0.99",
        "--g",
        "0.002",
        "--kappa",
        "0.0075",
        "--chi",
        "0.025",
        "--xi",
        "0.01",
        "--n",
        "100",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let warnings = v["warnings"].as_array().unwrap();
    assert_eq!(warnings.len(), 1);
    assert!(warnings[0].as_str().unwrap().contains("eta"));
    assert!(v["detuning"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn landscape_header_and_raw_range_comments() {
    let out = run(&[
        "landscape",
        "--model",
        "weak",
        "--delta",
        "-0.5",
        "--lambda-ratio",
        "1",
        "--k",
        "0.1",
        "--z-samples",
        "11",
        "--phi-samples",
        "5",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    assert!(text.starts_with("phi,z,energy_norm,defined\n"));
    assert!(text.contains("\n# raw_min="));
    assert!(text.contains("\n# raw_max="));
    assert!(text.ends_with('\n'));
    // undefined cells are exactly z > k
    for line in text.lines().skip(1).filter(|l| !l.starts_with('#')) {
        let cols: Vec<&str> = line.split(',').collect();
        let z: f64 = cols[1].parse().unwrap();
        let defined: u8 = cols[3].parse().unwrap();
        assert_eq!(defined == 1, z <= 0.1, "{line}");
        if defined == 0 {
            assert_eq!(cols[2], "nan");
        }
    }
}

#[test]
fn bifurcation_branches_csv_written_alongside_report() {
    let dir = temp_dir("branches");
    let branches = dir.join("branches.csv");
    let report = dir.join("report.json");
    let out = run(&[
        "bifurcation",
        "--model",
        "double-well",
        "--sweep",
        "lambda",
        "--range",
        "0.5",
        "2.0",
        "--samples",
        "61",
        "--count-phase",
        "pi",
        "--branches-out",
        branches.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let branch_text = std::fs::read_to_string(&branches).unwrap();
    assert!(branch_text
        .starts_with("branch_id,parameter,parameter_value,phi_star,z_star,stability,branch\n"));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!((v["critical_value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(v["pre_count"], 1);
    assert_eq!(v["post_count"], 3);
    std::fs::remove_dir_all(&dir).unwrap();
}
