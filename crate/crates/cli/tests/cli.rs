use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn riesz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riesz"))
        .args(args)
        .env_remove("RIESZ_OUTPUT_DIR")
        .output()
        .expect("riesz runs")
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("riesz-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "{}", stderr(out));
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("schemas/{name}.schema.json"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Walks `schema` alongside `doc` and collects every missing required key.
/// Handles the subset of JSON Schema used in `schemas/`.
fn missing_keys(schema: &Value, doc: &Value, path: &str, out: &mut Vec<String>) {
    if let Some(options) = schema.get("oneOf").and_then(Value::as_array) {
        let mut best: Option<Vec<String>> = None;
        for option in options {
            let mut local = Vec::new();
            if type_matches(option, doc) {
                missing_keys(option, doc, path, &mut local);
                if best.as_ref().is_none_or(|b| local.len() < b.len()) {
                    best = Some(local);
                }
            }
        }
        out.extend(best.unwrap_or_else(|| vec![format!("{path}: no matching variant")]));
        return;
    }
    if let (Some(required), Some(obj)) = (
        schema.get("required").and_then(Value::as_array),
        doc.as_object(),
    ) {
        for key in required.iter().filter_map(Value::as_str) {
            if !obj.contains_key(key) {
                out.push(format!("{path}.{key}"));
            }
        }
    }
    if let (Some(props), Some(obj)) = (
        schema.get("properties").and_then(Value::as_object),
        doc.as_object(),
    ) {
        for (key, sub) in props {
            if let Some(v) = obj.get(key) {
                missing_keys(sub, v, &format!("{path}.{key}"), out);
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), doc.as_array()) {
        for (i, v) in arr.iter().enumerate() {
            missing_keys(items, v, &format!("{path}[{i}]"), out);
        }
    }
}

fn type_matches(schema: &Value, doc: &Value) -> bool {
    match schema.get("type").and_then(Value::as_str) {
        Some("object") => doc.is_object(),
        Some("array") => doc.is_array(),
        Some("null") => doc.is_null(),
        _ => true,
    }
}

fn assert_schema(name: &str, doc: &Value) {
    let mut missing = Vec::new();
    missing_keys(&schema(name), doc, "$", &mut missing);
    assert!(missing.is_empty(), "{name}: missing {missing:?}");
    assert_eq!(doc["tool"], "riesz");
    assert_eq!(doc["command"], name);
}

#[test]
fn phi_csv_is_monotone_and_starts_at_the_small_ball() {
    let out = riesz(&[
        "--format", "csv", "phi", "--dim", "2", "--R", "1", "--Rb", "1", "--points", "64",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["r", "phi", "dphi"]);
    let rows: Vec<(f64, f64, f64)> = reader.deserialize().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 64);
    assert!((rows[0].1 - std::f64::consts::PI).abs() < 1e-12);
    assert!(rows.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 <= w[0].1));
    assert!(rows.iter().all(|r| r.2 <= 0.0));
    assert_eq!(rows.last().unwrap().1, 0.0);
}

#[test]
fn reports_carry_their_schema_keys() {
    let phi = json_stdout(&riesz(&[
        "phi", "--dim", "3", "--R", "1", "--Rb", "0.8", "--points", "16",
    ]));
    assert_schema("phi", &phi);
    let spectrum = json_stdout(&riesz(&[
        "spectrum", "--dim", "3", "--a", "0.5", "--lmax", "20",
    ]));
    assert_schema("spectrum", &spectrum);
    assert!(spectrum["result"]["gap_a"].as_f64().unwrap() < 0.5);
    let constant = json_stdout(&riesz(&["constant", "--dim", "2", "--delta", "0.25"]));
    assert_schema("constant", &constant);
    let verify = json_stdout(&riesz(&[
        "verify", "--dim", "2", "--delta", "0.25", "--count", "5",
    ]));
    assert_schema("verify", &verify);
}

#[test]
fn ball_input_has_no_ratio() {
    let out = riesz(&["verify", "--dim", "2", "--delta", "0.1", "--rho", "ball"]);
    let doc = json_stdout(&out);
    assert_eq!(doc["result"]["ratio_status"], "not_applicable");
    for rec in doc["result"]["summary"]["records"].as_array().unwrap() {
        assert_eq!(rec["deficit"], 0.0);
        assert!(rec["ratio"].is_null());
    }
}

#[test]
fn one_dimension_is_refused() {
    let out = riesz(&["spectrum", "--dim", "1", "--a", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("N >= 2"), "{}", stderr(&out));
}

#[test]
fn inadmissible_radii_exit_with_config_error() {
    let out = riesz(&["phi", "--dim", "2", "--R", "1", "--Rb", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = riesz(&["verify", "--dim", "2", "--delta", "0.6", "--count", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_ledger_entry_blocks_the_final_constant() {
    let out = riesz(&["constant", "--dim", "2", "--delta", "0.1", "--skip", "tau"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("tau"), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
}

#[test]
fn sweep_emits_one_row_per_point() {
    let out = riesz(&[
        "--format", "csv", "constant", "--dims", "2,3", "--deltas", "0.1,0.25",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<(usize, f64, f64)> = reader.deserialize().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.2 > 0.0));
    // Wider margins allow larger constants.
    for dim in [2, 3] {
        let c: Vec<f64> = rows.iter().filter(|r| r.0 == dim).map(|r| r.2).collect();
        assert!(c[0] < c[1], "N={dim}: {c:?}");
    }
}

#[test]
fn table_format_is_limited_to_constant() {
    let out = riesz(&["--format", "table", "spectrum", "--dim", "2", "--a", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = riesz(&[
        "--format", "table", "constant", "--dim", "2", "--delta", "0.25",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("c_final"));
}

#[test]
fn output_dir_from_environment() {
    let dir = scratch_dir("env");
    let out = Command::new(env!("CARGO_BIN_EXE_riesz"))
        .args(["spectrum", "--dim", "4", "--a", "1.5", "--lmax", "10"])
        .env("RIESZ_OUTPUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let doc: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("spectrum.json")).unwrap()).unwrap();
    assert_eq!(doc["config"]["dim"], 4);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "verify", "--dim", "3", "--delta", "0.25", "--count", "4", "--seed", "42",
    ];
    let first = riesz(&args);
    let second = riesz(&args);
    assert!(first.status.success(), "{}", stderr(&first));
    assert_eq!(first.stdout, second.stdout);
}
