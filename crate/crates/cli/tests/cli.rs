use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use spf_cli::{run, run_with, Oracle, Registry, RunConfig, StatParams, Value};
use spf_core::mechanisms::{laplace_sample, seeded_rng};
use spf_core::stats::{preprocess_ordered, preprocess_variance, OrderedStatKind, OrderedStatSpec};
use spf_core::{FnOracle, Record};
use tempfile::TempDir;

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn spf(args: &[&str], file: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spf"))
        .args(args)
        .arg(file)
        .output()
        .unwrap()
}

fn config(statistic: &str, input: PathBuf) -> RunConfig {
    RunConfig {
        statistic: statistic.into(),
        input,
        delta: Some(1.0),
        delta_file: None,
        mu_hat: None,
        empty_value: None,
        alpha: None,
        epsilon_file: None,
        seed: None,
        json: false,
        general: false,
        max_n: 16,
    }
}

fn json_field<'a>(json: &'a str, key: &str) -> &'a str {
    let start = json.find(&format!("\"{key}\": ")).unwrap() + key.len() + 4;
    let rest = &json[start..];
    rest[..rest.find([',', '}']).unwrap()].trim()
}

#[test]
fn mean_report() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "d.csv", "id,value\na,1\nb,2\nc,3\n");
    let out = spf(&["mean", "--delta", "1", "--mu-hat", "2", "--json"], &data);
    assert_eq!(out.status.code(), Some(0));
    let json = String::from_utf8(out.stdout).unwrap();
    assert_eq!(json_field(&json, "raw_value").parse::<f64>().unwrap(), 2.0);
    assert_eq!(json_field(&json, "g_value").parse::<f64>().unwrap(), 2.0);
    // 27·|x_i − μ|/n − Δ = 8 for the two outer entries.
    assert_eq!(json_field(&json, "error_bound").parse::<f64>().unwrap(), 16.0);
    assert_eq!(json_field(&json, "noise_scale"), "null");
}

#[test]
fn variance_report() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "v.csv", "id,value\na,0\nb,10\n");
    let out = spf(&["variance", "--delta", "1", "--json"], &data);
    assert_eq!(out.status.code(), Some(0));
    let json = String::from_utf8(out.stdout).unwrap();
    assert_eq!(json_field(&json, "raw_value"), "2.5000000000000000e1");
    assert_eq!(json_field(&json, "g_value"), "1.0000000000000000e0");
    assert_eq!(json_field(&json, "error_bound"), "2.2200000000000000e2");
}

#[test]
fn table_output() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "d.csv", "id,value\na,5\n");
    let out = spf(&["median", "--delta", "1"], &data);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("g_value       1\n"), "{text}");
    assert!(text.contains("error_bound   -\n"));
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let no_col = write(&dir, "a.csv", "id\nx\n");
    let out = spf(&["mean", "--delta", "1"], &no_col);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 1, column 2") && err.contains("`value`"), "{err}");

    let bad_num = write(&dir, "b.csv", "id,value\nx,1\ny,abc\n");
    let out = spf(&["mean", "--delta", "1"], &bad_num);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 3, column 2"));

    let dup = write(&dir, "c.csv", "id,value\nx,1\nx,2\n");
    assert_eq!(spf(&["mean", "--delta", "1"], &dup).status.code(), Some(2));
}

#[test]
fn invalid_parameters_exit_3() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "d.csv", "id,value\na,1\nb,2\n");
    assert_eq!(spf(&["mean", "--delta", "-1"], &data).status.code(), Some(3));
    assert_eq!(spf(&["mean"], &data).status.code(), Some(3));
    assert_eq!(spf(&["mode", "--delta", "1"], &data).status.code(), Some(3));
    assert_eq!(spf(&["trimmed-mean", "--delta", "1"], &data).status.code(), Some(3));
    assert_eq!(
        spf(&["trimmed-mean", "--delta", "1", "--alpha", "0.5"], &data)
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        spf(&["median", "--delta", "1", "--alpha", "0.1"], &data).status.code(),
        Some(3)
    );
    let zero = write(&dir, "e.csv", "id,epsilon\na,1\nb,0\n");
    let out = spf(
        &["mean", "--delta", "1", "--epsilon-file", zero.to_str().unwrap()],
        &data,
    );
    assert_eq!(out.status.code(), Some(3));
    let partial = write(&dir, "f.csv", "id,delta\na,1\n");
    let out = spf(&["mean", "--delta-file", partial.to_str().unwrap()], &data);
    assert_eq!(out.status.code(), Some(3));
    let mixed = write(&dir, "g.csv", "id,delta\na,1\nb,2\n");
    let out = spf(&["mean", "--delta-file", mixed.to_str().unwrap()], &data);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn size_cap_exits_4() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "d.csv", "id,value\na,1\nb,2\nc,3\n");
    let out = spf(&["mean", "--delta", "1", "--general", "--max-n", "2"], &data);
    assert_eq!(out.status.code(), Some(4));
    let pts = write(&dir, "p.csv", "id,x1,x2\na,0,0\nb,1,1\nc,2,2\n");
    assert_eq!(
        spf(&["centroid", "--delta", "1", "--max-n", "2"], &pts).status.code(),
        Some(4)
    );
}

#[test]
fn g_matches_library_bit_for_bit() {
    let dir = TempDir::new().unwrap();
    let values = [3.25, -7.5, 11.0, 0.125, 4.0, 100.0];
    let body: String = std::iter::once("id,value\n".to_owned())
        .chain(values.iter().enumerate().map(|(i, v)| format!("r{i},{v}\n")))
        .collect();
    let data = write(&dir, "d.csv", &body);

    let mut c = config("trimmed-mean", data.clone());
    c.alpha = Some(0.2);
    c.empty_value = Some(1.5);
    let report = run(&c).unwrap();
    let spec = OrderedStatSpec::new(OrderedStatKind::TrimmedMean(0.2), 1.5).unwrap();
    let expect = preprocess_ordered(&spec, 1.0, &values).unwrap();
    assert_eq!(report.g_value, Value::Scalar(expect));

    let report = run(&config("variance", data)).unwrap();
    assert_eq!(
        report.g_value,
        Value::Scalar(preprocess_variance(1.0, &values).unwrap())
    );
}

#[test]
fn seeded_noise_reproduces() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "d.csv", "id,value\na,1\nb,2\nc,40\n");
    let eps = write(&dir, "e.csv", "id,epsilon\n*,0.5\nc,2\n");
    let mut c = config("mean", data);
    c.epsilon_file = Some(eps);
    c.seed = Some(17);
    let a = run(&c).unwrap();
    let b = run(&c).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.noise_scale, Some(2.0));
    let Value::Scalar(g) = a.g_value else { panic!() };
    let expect = g + laplace_sample(2.0, &mut seeded_rng(17)).unwrap();
    assert_eq!(a.noised_value, Some(Value::Scalar(expect)));

    c.seed = None;
    let fresh = run(&c).unwrap();
    assert!(fresh.seed.is_some());
}

#[test]
fn user_registered_oracle() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "d.csv", "id,value\na,1\nb,2\nc,30\n");
    let mut registry = Registry::with_builtins();
    registry.register("sum", |p: &StatParams| {
        let f = FnOracle::new(p.empty_value, |rs: &[&Record]| rs.iter().map(|r| r.value).sum::<f64>());
        Ok(Box::new(f) as Oracle)
    });
    let mut c = config("sum", data);
    assert_eq!(run_with(&c, &registry).unwrap_err().exit_code(), 3);
    c.general = true;
    let report = run_with(&c, &registry).unwrap();
    assert_eq!(report.raw_value, Value::Scalar(33.0));
    // Each record can move the sum by at most 1 from ∅ = 0.
    assert_eq!(report.g_value, Value::Scalar(3.0));
    assert!(registry.names().any(|n| n == "sum"));
}

#[test]
fn per_individual_bounds_in_general_mode() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "d.csv", "id,value\na,10\nb,0\n");
    let deltas = write(&dir, "delta.csv", "id,delta\n*,1\na,4\n");
    let mut c = config("mean", data);
    c.delta = None;
    c.delta_file = Some(deltas);
    c.general = true;
    let report = run(&c).unwrap();
    assert_eq!(report.raw_value, Value::Scalar(5.0));
    // g({a}) = 4 and g({b}) = 0, so g({a, b}) ∈ [4 − 1, 0 + 4] and f = 5 clamps to 4.
    assert_eq!(report.g_value, Value::Scalar(4.0));
    c.general = false;
    assert_eq!(run(&c).unwrap_err().exit_code(), 3);
}

#[test]
fn planar_centroid() {
    let dir = TempDir::new().unwrap();
    let pts = write(&dir, "p.csv", "id,x1,x2\na,0,0\nb,4,0\n");
    let out = spf(&["centroid", "--delta", "1", "--json"], &pts);
    assert_eq!(out.status.code(), Some(0));
    let json = String::from_utf8(out.stdout).unwrap();
    assert!(
        json.contains("\"g_value\": [1.0000000000000000e0, 0.0000000000000000e0]"),
        "{json}"
    );
    assert_eq!(spf(&["mean", "--delta", "1"], &pts).status.code(), Some(3));
}
