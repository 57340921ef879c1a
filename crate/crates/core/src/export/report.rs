//! Machine-checkable JSON reports.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `value < tolerance`
    Below,
    /// `value > tolerance`
    Above,
    /// `|value − expected| < tolerance`
    Near,
    /// A boolean outcome; `value` is 1 or 0 and `tolerance` is unused.
    Holds,
}

/// One numeric claim and the tolerance it is judged against.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, expected: None, tolerance, comparison: Comparison::Below, pass: value < tolerance, note: None }
    }

    pub fn above(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, expected: None, tolerance, comparison: Comparison::Above, pass: value > tolerance, note: None }
    }

    pub fn near(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        let pass = (value - expected).abs() < tolerance;
        Self { name: name.into(), value, expected: Some(expected), tolerance, comparison: Comparison::Near, pass, note: None }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), value: if ok { 1.0 } else { 0.0 }, expected: None, tolerance: 0.0, comparison: Comparison::Holds, pass: ok, note: None }
    }

    /// A check that could not be evaluated because the computation failed.
    pub fn failed(name: impl Into<String>, err: impl std::fmt::Display) -> Self {
        let mut c = Self::holds(name, false);
        c.note = Some(err.to_string());
        c
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub operation: String,
    pub parameters: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub details: BTreeMap<String, Value>,
    pub warnings: Vec<String>,
    pub passed: bool,
}

impl Report {
    pub fn new(operation: impl Into<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            operation: operation.into(),
            parameters: BTreeMap::new(),
            checks: Vec::new(),
            details: BTreeMap::new(),
            warnings: Vec::new(),
            passed: true,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.parameters.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.details.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn check(&mut self, c: Check) -> &mut Self {
        self.passed &= c.pass;
        self.checks.push(c);
        self
    }

    pub fn warn(&mut self, w: impl Into<String>) -> &mut Self {
        self.warnings.push(w.into());
        self
    }

    /// Append the checks of `other` with names prefixed by `prefix.`.
    pub fn absorb(&mut self, prefix: &str, other: Report) -> &mut Self {
        for mut c in other.checks {
            c.name = format!("{prefix}.{}", c.name);
            self.check(c);
        }
        for w in other.warnings {
            self.warnings.push(format!("{prefix}: {w}"));
        }
        if !other.details.is_empty() {
            self.details.insert(prefix.to_string(), serde_json::to_value(other.details).unwrap_or(Value::Null));
        }
        self
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Pretty JSON with a trailing newline. Keys are sorted, so equal
    /// reports serialize to equal bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        let mut r = Report::new("t");
        r.check(Check::below("a", 1e-9, 1e-8)).check(Check::near("b", 0.5, 0.5, 1e-6));
        assert!(r.passed);
        r.check(Check::above("c", 0.0, 1.0));
        assert!(!r.passed);
        assert_eq!(r.failures().count(), 1);
        // NaN never passes
        assert!(!Check::below("n", f64::NAN, 1.0).pass);
        assert!(!Check::near("n", f64::NAN, 0.0, 1.0).pass);
    }

    #[test]
    fn json_is_stable() {
        let build = || {
            let mut r = Report::new("t");
            r.param("z", 1).param("a", "x").detail("k", vec![1.0, 2.0]);
            r.check(Check::below("a", 0.25, 1.0));
            r
        };
        let s = build().to_json();
        assert_eq!(s, build().to_json());
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["checks"][0]["comparison"], "below");
        assert!(s.find("\"a\"").unwrap() < s.find("\"z\"").unwrap());
    }

    #[test]
    fn absorb_prefixes() {
        let mut inner = Report::new("x");
        inner.check(Check::holds("ok", false));
        let mut r = Report::new("all");
        r.absorb("moebius", inner);
        assert_eq!(r.checks[0].name, "moebius.ok");
        assert!(!r.passed);
    }
}
