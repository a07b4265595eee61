//! Report assembly and rendering. The JSON body has sorted keys and numbers
//! rounded to 15 significant digits; `timings` is the only part that varies
//! between identical runs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};
use ssr_core::checks::{CheckKind, CheckResult};
use ssr_core::verify::{CheckSummary, SuiteReport};

pub const SIGNIFICANT_DIGITS: usize = 15;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteSection {
    pub name: String,
    pub trials: usize,
    pub pass: bool,
    pub summary: Vec<CheckSummary>,
    pub notes: Vec<String>,
}

impl From<&SuiteReport> for SuiteSection {
    fn from(r: &SuiteReport) -> Self {
        Self { name: r.name.clone(), trials: r.trials, pass: r.passed(), summary: r.summary(), notes: r.notes.clone() }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub config: BTreeMap<String, Value>,
    pub quantities: BTreeMap<String, f64>,
    pub checks: Vec<CheckResult>,
    pub suites: Vec<SuiteSection>,
    /// Command-specific payload (decomposition tables, reference rows).
    pub details: Option<Value>,
    pub notes: Vec<String>,
    pub timings: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { command: command.to_string(), ..Self::default() }
    }

    pub fn echo(&mut self, key: &str, value: impl Serialize) {
        self.config.insert(key.to_string(), serde_json::to_value(value).expect("config serializes"));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass) && self.suites.iter().all(|s| s.pass)
    }

    /// Everything except timings.
    pub fn body(&self) -> Value {
        let mut m = Map::new();
        m.insert("tool".into(), serde_json::json!({"name": "ssr", "version": env!("CARGO_PKG_VERSION")}));
        m.insert("command".into(), Value::from(self.command.clone()));
        m.insert("config".into(), serde_json::to_value(&self.config).expect("map"));
        m.insert("quantities".into(), serde_json::to_value(&self.quantities).expect("map"));
        m.insert("checks".into(), serde_json::to_value(&self.checks).expect("checks"));
        m.insert("suites".into(), serde_json::to_value(&self.suites).expect("suites"));
        if let Some(d) = &self.details {
            m.insert("details".into(), d.clone());
        }
        m.insert("notes".into(), serde_json::to_value(&self.notes).expect("notes"));
        m.insert("pass".into(), Value::from(self.passed()));
        round_numbers(Value::Object(m))
    }

    pub fn to_json(&self) -> String {
        let mut v = self.body();
        if let Value::Object(m) = &mut v {
            m.insert("timings".into(), round_numbers(serde_json::to_value(&self.timings).expect("map")));
        }
        let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "ssr {} [{}]", self.command, verdict);
        for (k, v) in &self.config {
            let _ = writeln!(out, "  {k}: {v}");
        }
        if !self.quantities.is_empty() {
            let _ = writeln!(out, "\nquantities (bits)");
            for (k, v) in &self.quantities {
                let _ = writeln!(out, "  {:<10} {:>22}", k, fmt_num(*v));
            }
        }
        if let Some(Value::Array(rows)) = self.details.as_ref().and_then(|d| d.get("rows")) {
            let _ = writeln!(out, "\n{:<48} {:>20} {:>20} {:>10}", "row", "computed", "expected", "margin");
            for r in rows {
                let get = |k: &str| r.get(k).and_then(Value::as_f64).map(fmt_num).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{:<48} {:>20} {:>20} {:>10} {}",
                    r.get("name").and_then(Value::as_str).unwrap_or(""),
                    get("computed"),
                    get("expected"),
                    r.get("margin").and_then(Value::as_f64).map(|m| format!("{m:.1e}")).unwrap_or_default(),
                    if r.get("pass").and_then(Value::as_bool).unwrap_or(false) { "ok" } else { "FAIL" }
                );
            }
        } else if let Some(d) = &self.details {
            let _ = writeln!(out, "\n{}", serde_json::to_string_pretty(&round_numbers(d.clone())).expect("value"));
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out, "\nchecks");
            for c in &self.checks {
                let _ = writeln!(
                    out,
                    "  {:<4} {:<52} margin {:>10.2e} tol {:.0e}",
                    if c.pass { "ok" } else { "FAIL" },
                    c.name,
                    c.margin,
                    c.tolerance
                );
            }
        }
        for s in &self.suites {
            let _ = writeln!(out, "\nsuite {} ({} trials) {}", s.name, s.trials, if s.pass { "PASS" } else { "FAIL" });
            for c in &s.summary {
                let label = match c.kind {
                    CheckKind::Equality => "max |diff|",
                    CheckKind::Bound => "min slack",
                };
                let _ = writeln!(
                    out,
                    "  {:<56} n={:<5} fail={:<3} {label} {:>10.2e} tol {:.0e}",
                    c.name, c.count, c.failures, c.worst_margin, c.tolerance
                );
            }
            for n in &s.notes {
                let _ = writeln!(out, "  note: {n}");
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        if !self.timings.is_empty() {
            let _ = writeln!(out, "\ntimings (s)");
            for (k, v) in &self.timings {
                let _ = writeln!(out, "  {k:<24} {v:.3}");
            }
        }
        out
    }
}

fn fmt_num(x: f64) -> String {
    let r = round_sig(x);
    if r != 0.0 && (r.abs() < 1e-4 || r.abs() >= 1e9) {
        format!("{r:.6e}")
    } else {
        format!("{r}")
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`]; the shortest representation of the
/// result then has at most that many digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses")
}

pub fn round_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_numbers).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_numbers(v))).collect()),
        other => other,
    }
}
