use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const UNIT_23: &str = r#"{
  "domain": {"intervals": [{"lo": "0", "hi": "1"}], "weights": [{"coeff": "1", "power": "0"}]},
  "exponents": {"kind": "explicit", "values": ["2", "3"]}
}"#;

const SQUARES: &str = r#"{
  "domain": {"intervals": [{"lo": "0", "hi": "0.4"}, {"lo": "0.5", "hi": "1"}],
             "weights": [{"coeff": "1", "power": "0"}, {"coeff": "2", "power": "1"}]},
  "exponents": {"kind": "power", "c": "1", "beta": "2", "count": 6},
  "precision_bits": 128,
  "N_list": [2, 4, 6],
  "target": {"kind": "pure_power", "mu": "1"},
  "rho": ["0.3", "0.6"],
  "grid_points": 100,
  "d": ["1", "0.5", "0.25", "0.125"],
  "operator": {"kind": "dilation"},
  "partition": {"sampling": "random", "count": 10, "seed": 3}
}"#;

fn muntz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_muntz"))
        .args(args)
        .env_remove("MUNTZ_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json_ok(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_kind(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).expect("error report on stderr");
    v["error"]["kind"].as_str().unwrap().to_string()
}

fn leading_digits(x: &Value, k: usize) -> String {
    let text = x.as_str().unwrap();
    let mantissa = text.split('e').next().unwrap().replace('.', "");
    mantissa[..k].to_string()
}

#[test]
fn validate_echoes_unit_radii() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "unit.json", UNIT_23);
    let v = json_ok(&muntz(&["validate", "--config", s(&cfg)]));
    assert_eq!(v["result"]["domain"]["r_A"], v["result"]["domain"]["r_w"]);
    assert!(v["result"]["domain"]["r_A"].as_str().unwrap().starts_with("1.000000"));
    assert_eq!(v["precision_bits"], 256);
    assert_eq!(v["result"]["exponents"]["count"], 2);
}

#[test]
fn distances_for_two_and_three() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "unit.json", UNIT_23);
    let v = json_ok(&muntz(&["distances", "--config", s(&cfg), "--n", "1", "--N-list", "1,2"]));
    let rows = v["result"]["sections"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    // 1/√5 and 1/√180
    assert_eq!(leading_digits(&rows[0]["distance"], 30), "447213595499957939281834733746");
    assert_eq!(leading_digits(&rows[1]["distance"], 30), "745355992499929898803057889577");
    for row in rows {
        assert_eq!(leading_digits(&row["oracle"], 60), leading_digits(&row["distance"], 60));
    }
    assert!(v["result"]["oracle_source"].is_string());
    assert!(v["result"]["certificate"].is_null());
    assert!(v["result"]["cond_estimate"].is_string());
}

#[test]
fn overlapping_intervals_exit_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "bad.json",
        r#"{"domain": {"intervals": [{"lo": "0", "hi": "1"}, {"lo": "0.5", "hi": "2"}],
                       "weights": [{"coeff": "1", "power": "0"}, {"coeff": "1", "power": "0"}]},
            "exponents": {"kind": "explicit", "values": ["2", "3"]}}"#,
    );
    let out = muntz(&["gram", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "OverlappingIntervals");
}

#[test]
fn unknown_subcommand_and_bad_config_exit_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "unit.json", UNIT_23);
    let out = muntz(&["frobnicate", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "UnknownSubcommand");

    let junk = write(&dir, "junk.json", r#"{"domain": 3}"#);
    let out = muntz(&["validate", "--config", s(&junk)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "MalformedConfig");

    let out = muntz(&["validate", "--config", s(&cfg), "--precision", "32"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "MalformedConfig");

    // remez without radii
    let out = muntz(&["remez", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "MalformedConfig");
}

#[test]
fn exhausted_precision_exits_three() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "hard.json",
        r#"{"domain": {"intervals": [{"lo": "0", "hi": "1"}], "weights": [{"coeff": "1", "power": "0"}]},
            "exponents": {"kind": "power", "c": "1", "beta": "1", "count": 12},
            "precision_bits": 64, "max_precision_bits": 64}"#,
    );
    let out = muntz(&["gram", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_kind(&out), "PrecisionExhausted");
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "sq.json", SQUARES);
    for cmd in ["gram", "distances", "duals", "expand", "remez", "moments", "hereditary"] {
        let first = muntz(&[cmd, "--config", s(&cfg), "--n", "2"]);
        let second = muntz(&[cmd, "--config", s(&cfg), "--n", "2"]);
        assert!(first.status.success(), "{cmd}: {}", String::from_utf8_lossy(&first.stderr));
        assert_eq!(first.stdout, second.stdout, "{cmd} not deterministic");

        let report: Value = serde_json::from_slice(&first.stdout).unwrap();
        assert_eq!(report["command"], cmd);
        let embedded = write(&dir, "embedded.json", &report["config"].to_string());
        let again = muntz(&[cmd, "--config", s(&embedded)]);
        assert_eq!(first.stdout, again.stdout, "{cmd} does not round-trip");
    }
}

#[test]
fn operator_reports_eigen_checks() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "sq.json", SQUARES);
    let v = json_ok(&muntz(&["operator", "--config", s(&cfg), "--rho", "0.5"]));
    let r = &v["result"];
    for key in ["eigen_ok", "adjoint_eigen_ok", "simplicity_ok", "kernel_trivial_ok", "tail_ok"] {
        assert_eq!(r[key], true, "{key}");
    }
    assert_eq!(r["kind"], "dilation");
    assert_eq!(r["apply"]["output"].as_array().unwrap().len(), 6);
    // u_1 = 0.5^1
    assert!(r["eigenvalues"][0].as_str().unwrap().starts_with("5.0000"));

    let two = muntz(&["operator", "--config", s(&cfg)]);
    assert_eq!(two.status.code(), Some(2));
}

#[test]
fn explicit_partition_uses_one_based_indices() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "p.json",
        r#"{"domain": {"intervals": [{"lo": "0", "hi": "1"}], "weights": [{"coeff": "1", "power": "0"}]},
            "exponents": {"kind": "explicit", "values": ["1", "2", "4", "7"]},
            "partition": {"sampling": "explicit", "N1": [1, 3], "N2": [2, 4]}}"#,
    );
    let v = json_ok(&muntz(&["hereditary", "--config", s(&cfg)]));
    assert_eq!(v["result"]["N2"], serde_json::json!([2, 4]));
    assert_eq!(v["result"]["nonsingular"], true);
    assert_eq!(
        leading_digits(&v["result"]["mixed_matrix_det"], 20),
        leading_digits(&v["result"]["inverse_minor_det"], 20)
    );

    let zero = write(&dir, "z.json", &std::fs::read_to_string(&cfg).unwrap().replace("[1, 3]", "[0, 3]"));
    let out = muntz(&["hereditary", "--config", s(&zero)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "BadPartition");
}

#[test]
fn environment_precision_yields_to_flag() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "unit.json", UNIT_23);
    let run = |extra: &[&str]| {
        let mut args = vec!["validate", "--config", s(&cfg)];
        args.extend_from_slice(extra);
        let out = Command::new(env!("CARGO_BIN_EXE_muntz"))
            .args(&args)
            .env("MUNTZ_PRECISION_BITS", "96")
            .output()
            .unwrap();
        json_ok(&out)["precision_bits"].clone()
    };
    assert_eq!(run(&[]), 96);
    assert_eq!(run(&["--precision", "128"]), 128);
}

#[test]
fn csv_and_out_file() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "sq.json", SQUARES);
    let out_path = dir.path().join("remez.csv");
    let out = muntz(&["remez", "--config", s(&cfg), "--format", "csv", "--out", s(&out_path)]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,rho,c_N"));
    // three sections times two radii
    assert_eq!(lines.count(), 6);

    let hered = muntz(&["hereditary", "--config", s(&cfg), "--format", "csv"]);
    let text = String::from_utf8(hered.stdout).unwrap();
    assert!(text.starts_with("N,partitions_checked,min_singular_value\n2,10,"));
}
