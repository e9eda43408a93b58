//! Run reports and their table / JSON renderings.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

/// Rounds to six significant digits.
pub fn sig6(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.5e}").parse().unwrap_or(v)
}

fn show(v: f64) -> String {
    let r = sig6(v);
    let mag = r.abs();
    if r == 0.0 || (1e-4..1e6).contains(&mag) {
        format!("{r}")
    } else {
        format!("{r:.5e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    Number(f64),
    Vector(Vec<f64>),
    Count(usize),
    Text(String),
}

impl Measure {
    fn to_table(&self) -> String {
        match self {
            Self::Number(v) => show(*v),
            Self::Vector(vs) => {
                let parts: Vec<String> = vs.iter().map(|v| show(*v)).collect();
                format!("({})", parts.join(", "))
            }
            Self::Count(n) => n.to_string(),
            Self::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Self::Number(v) => json!(sig6(*v)),
            Self::Vector(vs) => json!(vs.iter().map(|v| sig6(*v)).collect::<Vec<_>>()),
            Self::Count(n) => json!(n),
            Self::Text(s) => json!(s),
        }
    }
}

/// Everything a subcommand reports. Contains no timestamps, so identical
/// inputs and flags give byte-identical output.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<(String, String)>,
    pub measures: Vec<(String, Measure)>,
    pub verdicts: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn new(command: String) -> Self {
        Self {
            command,
            ..Self::default()
        }
    }

    /// Records the SHA-256 of an input file's bytes.
    pub fn input(&mut self, path: &str, bytes: &[u8]) {
        self.inputs
            .push((path.to_string(), hex::encode(Sha256::digest(bytes))));
    }

    pub fn measure(&mut self, name: &str, value: Measure) {
        self.measures.push((name.to_string(), value));
    }

    pub fn number(&mut self, name: &str, value: f64) {
        self.measure(name, Measure::Number(value));
    }

    pub fn verdict(&mut self, name: &str, value: impl ToString) {
        self.verdicts.push((name.to_string(), value.to_string()));
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn to_json(&self) -> Value {
        let inputs: Vec<Value> = self
            .inputs
            .iter()
            .map(|(path, digest)| json!({ "path": path, "sha256": digest }))
            .collect();
        let measures: Map<String, Value> = self
            .measures
            .iter()
            .map(|(k, v)| (k.clone(), v.to_json()))
            .collect();
        let verdicts: Map<String, Value> = self
            .verdicts
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        json!({
            "command": self.command,
            "inputs": inputs,
            "measures": measures,
            "verdicts": verdicts,
            "warnings": self.warnings,
        })
    }

    pub fn to_table(&self) -> String {
        let width = self
            .measures
            .iter()
            .map(|(k, _)| k.len())
            .chain(self.verdicts.iter().map(|(k, _)| k.len()))
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        for (path, digest) in &self.inputs {
            let _ = writeln!(out, "input:   {path} (sha256 {digest})");
        }
        if !self.measures.is_empty() {
            out.push_str("\nmeasures\n");
            for (k, v) in &self.measures {
                let _ = writeln!(out, "  {k:<width$}  {}", v.to_table());
            }
        }
        if !self.verdicts.is_empty() {
            out.push_str("\nverdicts\n");
            for (k, v) in &self.verdicts {
                let _ = writeln!(out, "  {k:<width$}  {v}");
            }
        }
        if !self.warnings.is_empty() {
            out.push_str("\nwarnings\n");
            for w in &self.warnings {
                let _ = writeln!(out, "  - {w}");
            }
        }
        out
    }
}
