//! End-to-end tests of the binary: exit codes, output contracts and
//! determinism under fixed seeds.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn zetalab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zetalab"))
        .args(args)
        .env_remove("ZETALAB_CONFIG_DIR")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "expected success, stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn help_exits_zero_and_unknown_flags_exit_one() {
    let help = zetalab(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("zetalab"));

    let unknown_flag = zetalab(&["zeta", "--sigma", "0.5", "--t", "30", "--bogus"]);
    assert_eq!(unknown_flag.status.code(), Some(1));

    let unknown_subcommand = zetalab(&["frobnicate"]);
    assert_eq!(unknown_subcommand.status.code(), Some(1));

    let missing_required = zetalab(&["zeta", "--sigma", "0.5"]);
    assert_eq!(missing_required.status.code(), Some(1));
}

#[test]
fn funceq_invariants_of_the_zeta_tuple() {
    let tuple = fixture_dir().join("zeta.tuple");
    let out = zetalab(&["funceq", "invariants", "--file", tuple.to_str().unwrap()]);
    let json = stdout_json(&out);
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["command"], "funceq-invariants");
    let inv = &json["invariants"];
    assert!((inv["degree"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let q2lambda = inv["q2lambda"].as_f64().unwrap();
    assert!((q2lambda - 1.0 / std::f64::consts::TAU).abs() < 1e-12);
    // The root number of zeta's Delta factor is e^{i pi/4}.
    let omega = &inv["omega_p"];
    assert!((omega["re"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-9);
    assert!((omega["im"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-9);
}

#[test]
fn missing_tuple_file_exits_two_and_names_the_path() {
    let out = zetalab(&["funceq", "invariants", "--file", "no-such.tuple"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("no-such.tuple"), "stderr: {stderr}");
}

#[test]
fn config_dir_env_var_resolves_relative_tuples() {
    let out = Command::new(env!("CARGO_BIN_EXE_zetalab"))
        .args(["funceq", "invariants", "--file", "zeta.tuple"])
        .env("ZETALAB_CONFIG_DIR", fixture_dir())
        .output()
        .expect("binary runs");
    let json = stdout_json(&out);
    assert!((json["invariants"]["degree"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn malformed_tuple_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.tuple");
    std::fs::write(&path, "{ not json").unwrap();
    let out = zetalab(&["funceq", "invariants", "--file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("broken.tuple"));
}

#[test]
fn zeta_near_the_pole_is_a_domain_error() {
    let out = zetalab(&["zeta", "--sigma", "1.0", "--t", "0.0000000001"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zeta_eval_emits_value_and_flag() {
    let out = zetalab(&["zeta", "--sigma", "0.5", "--t", "30"]);
    let json = stdout_json(&out);
    assert_eq!(json["command"], "zeta");
    assert!(json["value"]["re"].as_f64().unwrap().is_finite());
    assert_eq!(json["accuracy_flagged"], false);
}

#[test]
fn apoints_rvm_reports_counts() {
    let out = zetalab(&["apoints", "rvm", "--a", "0", "--T", "30"]);
    let json = stdout_json(&out);
    assert_eq!(json["command"], "apoints-rvm");
    // The first three zeta zeros sit below t = 30.
    assert_eq!(json["report"]["located"], 3);
    assert!(json["report"]["discrepancy"].as_f64().unwrap().is_finite());
}

#[test]
fn funceq_eval_matches_the_asymptotic_at_height() {
    let tuple = fixture_dir().join("zeta.tuple");
    let out = zetalab(&[
        "funceq",
        "eval",
        "--file",
        tuple.to_str().unwrap(),
        "--sigma",
        "0.3",
        "--t",
        "80",
    ]);
    let json = stdout_json(&out);
    assert!(json["asymptotic_gap"].as_f64().unwrap() < 0.05);
}

#[test]
fn coeffs_csv_carries_the_schema_comment() {
    let out = zetalab(&["--format", "csv", "coeffs", "--kappa", "2", "--n", "8"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema-version: 1"));
    // d_2 = number of divisors: d_2(6) = 4.
    assert!(text.lines().any(|l| l.starts_with("6,4")), "table: {text}");
}

#[test]
fn coeffs_json_lists_divisor_values() {
    let out = zetalab(&["coeffs", "--kappa", "1", "--n", "5"]);
    let json = stdout_json(&out);
    let values = json["values"].as_array().unwrap();
    assert_eq!(values.len(), 5);
    for row in values {
        assert_eq!(row["re"], 1.0);
    }
}

#[test]
fn scan_taus_emits_an_increasing_sequence() {
    let out = zetalab(&[
        "scan", "taus", "--ell", "0", "--count", "3", "--tau-min", "1000",
    ]);
    let json = stdout_json(&out);
    let taus: Vec<f64> = json["taus"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(taus.len(), 3);
    assert!(taus.windows(2).all(|w| w[0] < w[1]));
    assert!(taus[0] >= 1000.0);
}

#[test]
fn scan_lehto_csv_rows_parse() {
    let out = zetalab(&[
        "--format", "csv", "scan", "lehto", "--t-lo", "20", "--t-hi", "30",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# schema-version: 1"));
    assert!(text.lines().nth(1).unwrap().starts_with("tau,radius,score,modulus"));
}

#[test]
fn bad_profile_string_is_a_usage_error() {
    let out = zetalab(&["scan", "lehto", "--profile", "quadratic:1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn moments_continuous_small_run() {
    let out = zetalab(&["moments", "--sigma", "1.5", "--k", "1", "--T", "12"]);
    let json = stdout_json(&out);
    assert_eq!(json["mode"], "continuous");
    // Short windows keep the t = 0 transient visible; this only pins
    // the order of magnitude.
    let gap = json["report"]["relative_gap"].as_f64().unwrap();
    assert!(gap < 0.6, "relative gap {gap}");
    assert_eq!(json["exclusion_density"], 0.0);
}

#[test]
fn moments_discrete_with_exclusion_writes_the_bitmap() {
    let dir = tempfile::tempdir().unwrap();
    let bitmap = dir.path().join("excl.csv");
    let out = zetalab(&[
        "moments",
        "--sigma",
        "0.8",
        "--k",
        "1",
        "--T",
        "60",
        "--l",
        "1",
        "--M",
        "40",
        "--excl-out",
        bitmap.to_str().unwrap(),
    ]);
    let json = stdout_json(&out);
    assert_eq!(json["mode"], "discrete");
    let text = std::fs::read_to_string(&bitmap).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema-version: 1"));
    assert_eq!(lines.next(), Some("block,excluded"));
    assert_eq!(text.lines().count(), 62);
}

#[test]
fn clt_quick_run_reports_ks_statistics() {
    let dir = tempfile::tempdir().unwrap();
    let hist = dir.path().join("hist.csv");
    let out = zetalab(&[
        "clt",
        "--T",
        "1000",
        "--bins",
        "10",
        "--re-samples",
        "200",
        "--im-samples",
        "10",
        "--hist-out",
        hist.to_str().unwrap(),
    ]);
    let json = stdout_json(&out);
    let ks = json["report"]["ks_re"].as_f64().unwrap();
    assert!(ks.is_finite() && ks > 0.0 && ks < 1.0);
    let measures = json["report"]["w_measures"].as_array().unwrap();
    let total: f64 = measures.iter().map(|v| v.as_f64().unwrap()).sum();
    assert_eq!(total, 1.0);
    let text = std::fs::read_to_string(&hist).unwrap();
    assert!(text.starts_with("# schema-version: 1"));
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn plancherel_is_byte_identical_under_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.json");
    let second = dir.path().join("b.json");
    let args = |out: &Path| {
        vec![
            "--seed".to_string(),
            "42".to_string(),
            "--out".to_string(),
            out.to_str().unwrap().to_string(),
            "torus".to_string(),
            "plancherel".to_string(),
            "--sigma".to_string(),
            "0.75".to_string(),
            "--samples".to_string(),
            "300".to_string(),
            "--n".to_string(),
            "200".to_string(),
        ]
    };
    let run = |argv: Vec<String>| {
        let out = Command::new(env!("CARGO_BIN_EXE_zetalab"))
            .args(argv)
            .output()
            .expect("binary runs");
        assert!(out.status.success());
    };
    run(args(&first));
    run(args(&second));
    let a = std::fs::read(&first).unwrap();
    let b = std::fs::read(&second).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);

    // A different seed draws different torus points.
    let third = dir.path().join("c.json");
    let mut argv = args(&third);
    argv[1] = "43".to_string();
    run(argv);
    let c = std::fs::read(&third).unwrap();
    assert_ne!(a, c);
}

#[test]
fn report_battery_is_thread_count_invariant() {
    let tuple = fixture_dir().join("zeta.tuple");
    let run = |threads: &str| {
        let out = zetalab(&[
            "--threads",
            threads,
            "report",
            "--file",
            tuple.to_str().unwrap(),
            "--points",
            "40",
        ]);
        assert!(out.status.success());
        out.stdout
    };
    let one = run("1");
    let four = run("4");
    assert_eq!(one, four);
    let json: serde_json::Value = serde_json::from_slice(&one).unwrap();
    assert!(json["unit_modulus_max_dev"].as_f64().unwrap() < 1e-10);
    assert!(json["fe_product_max_dev"].as_f64().unwrap() < 1e-9);
    assert!(json["sqrt_consistency_max_dev"].as_f64().unwrap() < 1e-9);
}

#[test]
fn torus_birkhoff_small_window() {
    let out = zetalab(&["torus", "birkhoff", "--sigma", "1.2", "--T", "200", "--n", "40"]);
    let json = stdout_json(&out);
    assert!(json["relative_gap"].as_f64().unwrap() < 0.2);
}

#[test]
fn scan_shape_reports_small_deviation_at_scale() {
    let out = zetalab(&[
        "scan", "shape", "--tau", "10000", "--profile", "constant:1.0",
    ]);
    let json = stdout_json(&out);
    let rows = json["report"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0]["max_deviation"].as_f64().unwrap() < 5e-3);
}
