use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: u64,
}

/// Everything a command prints. Apart from `timing`, the JSON form is a
/// function of the inputs and the seed.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub input_digest: String,
    pub results: Value,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub timing: Timing,
}

impl Report {
    pub fn new(command: impl Into<String>, input_digest: String) -> Self {
        Report {
            command: command.into(),
            input_digest,
            results: Value::Null,
            checks: Vec::new(),
            error: None,
            timing: Timing { elapsed_ms: 0 },
        }
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn all_pass(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command  {}", self.command);
        let _ = writeln!(out, "input    sha256:{}", self.input_digest);
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error    {e}");
        }
        let mut rows = Vec::new();
        flatten("", &self.results, &mut rows);
        if !rows.is_empty() {
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            let _ = writeln!(out, "results");
            for (k, v) in rows {
                let _ = writeln!(out, "  {k:<width$}  {v}");
            }
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out, "checks");
            for c in &self.checks {
                let tag = if c.pass { "PASS" } else { "FAIL" };
                if c.detail.is_empty() {
                    let _ = writeln!(out, "  {tag}  {}", c.name);
                } else {
                    let _ = writeln!(out, "  {tag}  {}  ({})", c.name, c.detail);
                }
            }
        }
        let _ = writeln!(out, "time     {} ms", self.timing.elapsed_ms);
        out
    }
}

/// Dotted keys for nested objects; arrays of scalars stay inline.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Null => {}
        Value::Object(map) => {
            for (k, inner) in map {
                flatten(&key(k), inner, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object()) => {
            for (i, inner) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), inner, out);
            }
        }
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// Hex SHA-256 over the given byte strings, each followed by a separator.
pub fn digest<'a>(parts: impl IntoIterator<Item = &'a [u8]>) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
        h.update([0u8]);
    }
    h.finalize().iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}
