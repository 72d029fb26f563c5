use std::fs;

use phaselimit::cli::{run, CURVE_COLUMNS, SCHEMA};
use serde_json::Value;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("phaselimit").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = invoke(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn constants_are_printed_to_twelve_digits() {
    let (code, out, _) = invoke(&["constants"]);
    assert_eq!(code, 0);
    assert!(out.contains("0.559304368351"), "{out}");
    assert!(out.contains("1.376083543344"), "{out}");
    assert!(out.contains("-2.338107410460"), "{out}");
    let v = json(&["constants", "--format", "json"]);
    assert_eq!(v["schema"], SCHEMA);
    assert!((v["k_A"].as_f64().unwrap() - 0.5593043683509975).abs() < 1e-15);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["bounds", "--state", "random:12", "--seed", "7", "--format", "json"][..],
        &["curve", "--means", "0.5,1,2", "--format", "csv"][..],
        &["discriminate", "--K", "5", "--format", "json"][..],
    ] {
        let a = invoke(args);
        let b = invoke(args);
        assert_eq!(a, b);
        assert_eq!(a.0, 0);
    }
}

#[test]
fn curve_csv_header() {
    let (code, out, _) = invoke(&["curve", "--means", "1,2", "--kind", "exact"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), CURVE_COLUMNS.join(","));
    assert_eq!(lines.count(), 2);

    let (code, out, _) = invoke(&["curve", "--means", "1,2"]);
    assert_eq!(code, 0);
    let header = out.lines().next().unwrap();
    assert_eq!(header, format!("kind,{}", CURVE_COLUMNS.join(",")));
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn curve_rows_parse_back() {
    let (_, out, _) = invoke(&["curve", "--means", "0.5,5", "--kind", "exact"]);
    let mut reader = csv::Reader::from_reader(out.as_bytes());
    let products: Vec<f64> = reader
        .records()
        .map(|r| r.unwrap()[5].parse().unwrap())
        .collect();
    assert_eq!(products.len(), 2);
    assert!(products[0] > products[1]);
    assert!(products[1] > phaselimit::k_c());
}

#[test]
fn optimize_json_fields() {
    let v = json(&["optimize", "--mean", "3", "--format", "json"]);
    assert_eq!(v["schema"], SCHEMA);
    let amps = v["amplitudes"].as_array().unwrap();
    let norm: f64 = amps.iter().map(|a| a.as_f64().unwrap().powi(2)).sum();
    assert!((norm - 1.0).abs() < 1e-12);
    assert!((v["achieved_mean"].as_f64().unwrap() - 3.0).abs() < 1e-6);
}

#[test]
fn discriminate_four_phases() {
    let v = json(&["discriminate", "-K", "4", "--format", "json"]);
    assert_eq!(v["schema"], SCHEMA);
    let text = v.to_string();
    assert!(text.contains("1.5"), "{text}");
    let (code, out, _) = invoke(&["discriminate", "--K", "4"]);
    assert_eq!(code, 0);
    assert!(!out.is_empty());
}

#[test]
fn simulate_reads_measurement_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("number.json");
    let pom = phaselimit::EstimatePOM::number_measurement(&[0.0, 1.0, 2.0]).unwrap();
    fs::write(&path, serde_json::to_string(&pom).unwrap()).unwrap();
    let v = json(&["simulate", "--povm", path.to_str().unwrap(), "--state", "[0.6, 0.8, 0]", "--format", "json"]);
    let msd = v["mean_square_deviation"].as_f64().unwrap();
    assert!((msd - std::f64::consts::PI.powi(2) / 3.0).abs() < 1e-12);

    let (code, _, err) = invoke(&["simulate", "--povm", path.to_str().unwrap(), "--state", "[0.6, 0.8]"]);
    assert_eq!(code, 1, "{err}");
}

#[test]
fn out_flag_writes_file_and_nothing_else() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("constants.json");
    let (code, out, _) = invoke(&["constants", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["schema"], SCHEMA);
    let leftovers: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 1);
}

#[test]
fn invalid_input_exits_with_one() {
    for args in [
        &["curve", "--means", "2,1"][..],
        &["optimize", "--mean", "-1"][..],
        &["bounds", "--state", "[0, 0]"][..],
        &["discriminate", "--K", "0"][..],
        &["frobnicate"][..],
        &["optimize"][..],
    ] {
        let (code, out, err) = invoke(args);
        assert_eq!(code, 1, "{args:?}: {out} {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn numerical_failure_exits_with_two() {
    let mut amps = vec!["0"; 41];
    amps[0] = "1";
    amps[40] = "1";
    let state = format!("[{}]", amps.join(","));
    let (code, _, err) = invoke(&["bounds", "--state", &state, "--grid", "64"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, err) = invoke(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("constants"));
    assert!(err.is_empty());
}
