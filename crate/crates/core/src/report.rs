//! Check records and the report envelope shared by all commands.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Serialize) -> Self {
        Check { name: name.into(), pass, detail: serde_json::to_value(detail).expect("serializable detail") }
    }

    /// An informational record that never fails.
    pub fn info(name: impl Into<String>, detail: impl Serialize) -> Self {
        Self::new(name, true, detail)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    pub command: String,
    pub input_hash: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Envelope {
    pub fn new(command: impl Into<String>, input_hash: impl Into<String>) -> Self {
        Envelope { command: command.into(), input_hash: input_hash.into(), checks: Vec::new(), pass: true }
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable envelope")
    }

    pub fn to_human(&self) -> String {
        let mut out = format!("{} [{}]\n", self.command, &self.input_hash[..self.input_hash.len().min(12)]);
        for c in &self.checks {
            let mark = if c.pass { "ok  " } else { "FAIL" };
            out.push_str(&format!("{mark} {}\n", c.name));
            out.push_str(&indent(&human_value(&c.detail), 5));
        }
        out.push_str(if self.pass { "result: pass\n" } else { "result: FAIL\n" });
        out
    }
}

fn indent(s: &str, n: usize) -> String {
    let pad = " ".repeat(n);
    s.lines().map(|l| format!("{pad}{l}\n")).collect()
}

fn human_value(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => format!("{s}\n"),
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| match v {
                Value::Array(a) if a.is_empty() => format!("{k}: []\n"),
                Value::Object(_) | Value::Array(_) => format!("{k}:\n{}", indent(&human_value(v), 2)),
                _ => format!("{k}: {}\n", scalar(v)),
            })
            .collect(),
        Value::Array(items) => items
            .iter()
            .map(|v| match v {
                Value::Object(_) => {
                    let line: Vec<String> = v.as_object().unwrap().iter().map(|(k, x)| format!("{k}={}", scalar(x))).collect();
                    format!("- {}\n", line.join(" "))
                }
                _ => format!("- {}\n", scalar(v)),
            })
            .collect(),
        other => format!("{}\n", scalar(other)),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_tracks_failures() {
        let mut e = Envelope::new("validate", "abc");
        e.push(Check::info("points", vec!["{e1}", "{e2}"]));
        assert!(e.pass);
        e.push(Check::new("rank", false, serde_json::json!({"expected": 1, "got": 0})));
        assert!(!e.pass);
        let v: Value = serde_json::from_str(&e.to_json()).unwrap();
        assert_eq!(v["checks"].as_array().unwrap().len(), 2);
        assert!(e.to_human().contains("FAIL rank"));
    }
}
