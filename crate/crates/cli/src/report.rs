use std::fmt::Write;

use spf_core::Point2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Scalar(f64),
    Point(Point2),
}

/// Result of one run. Absent fields are `null` in JSON and `-` in the table.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub statistic: String,
    pub n: usize,
    pub raw_value: Value,
    pub g_value: Value,
    pub error_bound: Option<f64>,
    pub noise_scale: Option<f64>,
    pub noised_value: Option<Value>,
    pub seed: Option<u64>,
}

// 17 significant digits: enough to round-trip any f64.
fn json_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_value(v: &Value) -> String {
    match v {
        Value::Scalar(x) => json_number(*x),
        Value::Point(p) => format!("[{}, {}]", json_number(p.x1), json_number(p.x2)),
    }
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => write!(out, "\\u{:04x}", c as u32).unwrap(),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn or_null<T>(v: Option<T>, f: impl FnOnce(T) -> String) -> String {
    v.map_or_else(|| "null".to_owned(), f)
}

fn plain(v: &Value) -> String {
    match v {
        Value::Scalar(x) => x.to_string(),
        Value::Point(p) => p.to_string(),
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        format!(
            "{{\"statistic\": {}, \"n\": {}, \"raw_value\": {}, \"g_value\": {}, \"error_bound\": {}, \
             \"noise_scale\": {}, \"noised_value\": {}, \"seed\": {}}}",
            json_string(&self.statistic),
            self.n,
            json_value(&self.raw_value),
            json_value(&self.g_value),
            or_null(self.error_bound, json_number),
            or_null(self.noise_scale, json_number),
            or_null(self.noised_value.as_ref(), json_value),
            or_null(self.seed, |s| s.to_string()),
        )
    }

    pub fn to_table(&self) -> String {
        let dash = || "-".to_owned();
        let rows = [
            ("statistic", self.statistic.clone()),
            ("n", self.n.to_string()),
            ("raw_value", plain(&self.raw_value)),
            ("g_value", plain(&self.g_value)),
            ("error_bound", self.error_bound.map_or_else(dash, |b| b.to_string())),
            ("noise_scale", self.noise_scale.map_or_else(dash, |b| b.to_string())),
            ("noised_value", self.noised_value.as_ref().map_or_else(dash, plain)),
            ("seed", self.seed.map_or_else(dash, |s| s.to_string())),
        ];
        rows.iter().map(|(k, v)| format!("{k:<13} {v}\n")).collect()
    }
}
