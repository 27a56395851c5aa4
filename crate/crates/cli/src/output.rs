use serde::Serialize;
use serde_json::{json, Value};
use starga::scalar::rational_to_string;
use starga::Gaussian;

use crate::Format;

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub check: String,
    pub value: f64,
    pub limit: f64,
}

impl Failure {
    pub fn new(check: impl Into<String>, value: f64, limit: f64) -> Self {
        Failure { check: check.into(), value, limit }
    }

    pub fn list_json(list: &[Failure]) -> String {
        json!({ "failures": list }).to_string()
    }
}

/// A command result: a JSON document, a CSV table, and the failed checks.
pub struct Report {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = self.header.join(",");
                s.push('\n');
                for row in &self.rows {
                    s.push_str(&row.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
                    s.push('\n');
                }
                s
            }
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// 17 significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Real values as `num/den`, complex values as an object of parts.
pub fn exact(g: &Gaussian) -> Value {
    if g.is_real() {
        json!(rational_to_string(&g.re))
    } else {
        json!({ "re": rational_to_string(&g.re), "im": rational_to_string(&g.im) })
    }
}

pub fn exact_str(g: &Gaussian) -> String {
    if g.is_real() {
        rational_to_string(&g.re)
    } else {
        format!("{}{:+}i", g.re, g.im)
    }
}
