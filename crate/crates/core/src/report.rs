//! Machine-readable reports.
//!
//! Rationals are written as exact `"num/den"` strings, `+inf` as `"inf"`,
//! and reals as `{"value", "abs_error"}` pairs of decimal strings.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::ranges::{Extended, PRange, Rational};

/// One named pass/fail check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub tolerance: String,
    pub measured: String,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, tolerance: impl Into<String>, measured: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            tolerance: tolerance.into(),
            measured: measured.into(),
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub outputs: Map<String, Value>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { command: command.into(), inputs: Map::new(), outputs: Map::new(), checks: Vec::new() }
    }

    pub fn input(&mut self, key: &str, value: Value) -> &mut Self {
        self.inputs.insert(key.into(), value);
        self
    }

    pub fn output(&mut self, key: &str, value: Value) -> &mut Self {
        self.outputs.insert(key.into(), value);
        self
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports are plain JSON values");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

pub fn rational(q: &Rational) -> Value {
    Value::String(q.to_string())
}

pub fn extended(e: &Extended) -> Value {
    Value::String(e.to_string())
}

pub fn prange(r: &PRange) -> Value {
    json!({
        "lower": rational(&r.lower),
        "upper": extended(&r.upper),
        "lower_open": r.lower_open,
        "upper_open": r.upper_open,
    })
}

pub fn decimal(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.15e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn real(value: f64, abs_error: f64) -> Value {
    json!({ "value": decimal(value), "abs_error": decimal(abs_error) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranges::rat;

    #[test]
    fn round_trip_is_byte_identical() {
        let mut r = Report::new("ranges");
        r.input("m", json!(1)).input("symbol", json!("boundary:1/4"));
        r.output("range", prange(&PRange { lower: rat(4, 3), upper: Extended::Infinity, lower_open: true, upper_open: true }));
        r.output("volume", real(std::f64::consts::PI.powi(2) / 2.0, 0.0));
        r.checks.push(Check::new("z", true, "exact", "4/3", "ok"));
        r.checks.push(Check::new("a", false, "1e-8", "2e-8", "off"));
        let text = r.to_json();
        let back = Report::from_json(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), text);
        // key order is insertion order, not sorted
        assert!(text.find("\"m\"").unwrap() < text.find("\"symbol\"").unwrap());
        assert!(text.contains("\"4/3\"") && text.contains("\"inf\""));
        assert!(!r.all_pass());
    }

    #[test]
    fn formats() {
        assert_eq!(rational(&rat(4, 1)), json!("4"));
        assert_eq!(rational(&rat(-2, 6)), json!("-1/3"));
        assert_eq!(decimal(0.5), "5.000000000000000e-1");
        assert_eq!(decimal(f64::INFINITY), "inf");
    }
}
