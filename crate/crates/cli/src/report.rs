use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use solvgeo_core::rational::{format_exact, format_sig};

/// Machine-readable command output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    /// SHA-256 of the inputs and result-relevant options.
    pub inputs_digest: String,
    pub result: Value,
    pub residuals: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

/// What a command produced before it is wrapped into a [`Report`].
#[derive(Debug, Default)]
pub struct Outcome {
    pub result: Value,
    pub residuals: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
    pub exit: i32,
    /// File contents written by `--out`, when the command has a primary artifact.
    pub artifact: Option<String>,
}

impl Outcome {
    pub fn new(result: Value) -> Self {
        Self {
            result,
            ..Self::default()
        }
    }

    pub fn residual(mut self, name: &str, v: f64) -> Self {
        self.residuals.insert(name.to_string(), v);
        self
    }

    pub fn flag(mut self, name: &str, v: bool) -> Self {
        self.flags.insert(name.to_string(), v);
        self
    }
}

/// Digest of `(command, named inputs, options)`.
pub fn digest(command: &str, inputs: &[(&str, &str)], options: &Value) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    for (name, text) in inputs {
        h.update([0u8]);
        h.update(name.as_bytes());
        h.update([0u8]);
        h.update(text.as_bytes());
    }
    h.update([0u8]);
    h.update(options.to_string().as_bytes());
    hex::encode(h.finalize())
}

fn round(x: f64) -> f64 {
    if x.is_finite() {
        format_sig(x).parse().unwrap_or(x)
    } else {
        x
    }
}

/// Rounds every float to 12 significant digits so the printed payload parses
/// back to itself.
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n.as_f64().map(|x| json!(round(x))).unwrap_or(Value::Null),
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

impl Report {
    pub fn rounded(mut self) -> Self {
        self.result = round_value(self.result);
        for v in self.residuals.values_mut() {
            *v = round(*v);
        }
        self.wall_time_s = self.wall_time_s.map(round);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_human(&self) -> String {
        let mut out = format!("command: {}\ninputs: {}\n", self.command, self.inputs_digest);
        out.push_str("result:\n");
        write_value(&mut out, &self.result, 1);
        if !self.residuals.is_empty() {
            out.push_str("residuals:\n");
            for (k, v) in &self.residuals {
                out.push_str(&format!("  {k}: {}\n", format_sig(*v)));
            }
        }
        if !self.flags.is_empty() {
            out.push_str("checks:\n");
            for (k, v) in &self.flags {
                out.push_str(&format!("  {} {k}\n", if *v { "PASS" } else { "FAIL" }));
            }
        }
        if let Some(t) = self.wall_time_s {
            out.push_str(&format!("wall time: {t} s\n"));
        }
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(n) => n.as_f64().map(format_sig).unwrap_or_else(|| n.to_string()),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(o) => {
            for (k, item) in o {
                match item {
                    x if is_scalar(x) => out.push_str(&format!("{pad}{k}: {}\n", scalar(x))),
                    Value::Array(a) if a.iter().all(is_scalar) => {
                        let row: Vec<String> = a.iter().map(scalar).collect();
                        out.push_str(&format!("{pad}{k}: [{}]\n", row.join(", ")));
                    }
                    _ => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        write_value(out, item, depth + 1);
                    }
                }
            }
        }
        Value::Array(a) => {
            for item in a {
                if let Value::Array(row) = item {
                    if row.iter().all(is_scalar) {
                        let row: Vec<String> = row.iter().map(scalar).collect();
                        out.push_str(&format!("{pad}[{}]\n", row.join(", ")));
                        continue;
                    }
                }
                if is_scalar(item) {
                    out.push_str(&format!("{pad}- {}\n", scalar(item)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    write_value(out, item, depth + 1);
                }
            }
        }
        x => out.push_str(&format!("{pad}{}\n", scalar(x))),
    }
}

pub fn matrix(m: &DMatrix<f64>) -> Value {
    json!((0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

pub fn vector(v: &DVector<f64>) -> Value {
    json!(v.iter().copied().collect::<Vec<_>>())
}

pub fn exact_matrix(m: &DMatrix<f64>) -> Value {
    json!((0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| format_exact(m[(i, j)])).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

pub fn exact_list(v: &[f64]) -> Value {
    json!(v.iter().map(|x| format_exact(*x)).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_round_trips() {
        let r = Report {
            command: "x".into(),
            inputs_digest: digest("x", &[("a", "b")], &json!({})),
            result: json!({"v": [1.0 / 3.0, 2e-17, 12345678.123456789], "n": 3}),
            residuals: BTreeMap::from([("r".to_string(), std::f64::consts::PI)]),
            flags: BTreeMap::from([("ok".to_string(), true)]),
            wall_time_s: None,
        }
        .rounded();
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.result["v"][0], json!(0.333333333333));
        assert_eq!(back.result["n"], json!(3));
    }

    #[test]
    fn digest_depends_on_inputs() {
        let a = digest("c", &[("f", "1")], &json!({"seed": 0}));
        assert_ne!(a, digest("c", &[("f", "2")], &json!({"seed": 0})));
        assert_ne!(a, digest("c", &[("f", "1")], &json!({"seed": 1})));
        assert_eq!(a.len(), 64);
    }
}
