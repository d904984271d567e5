use std::collections::BTreeMap;

use radflow_core::diagnostics::BoundCheck;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One gated check. `margin` is oriented so that `margin + allowance >= 0` passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub margin: f64,
    pub allowance: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    /// `value <= limit`.
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= limit,
            margin: limit - value,
            allowance: 0.0,
            detail: String::new(),
        }
    }

    /// `value >= limit`.
    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            passed: value >= limit,
            margin: value - limit,
            allowance: 0.0,
            detail: String::new(),
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            margin: if passed { 0.0 } else { -1.0 },
            allowance: 0.0,
            detail: detail.into(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn prefixed(mut self, prefix: &str) -> Self {
        self.name = format!("{prefix}/{}", self.name);
        self
    }
}

impl From<BoundCheck> for Check {
    fn from(c: BoundCheck) -> Self {
        let detail = if c.worst_t.is_finite() {
            if c.worst_r.is_finite() {
                format!("worst at t = {}, r = {}", c.worst_t, c.worst_r)
            } else {
                format!("worst at t = {}", c.worst_t)
            }
        } else {
            String::new()
        };
        Self {
            name: c.name,
            passed: c.passed,
            margin: c.margin,
            allowance: c.allowance,
            detail,
        }
    }
}

/// Outcome of a run, preset or sweep cell.
///
/// `logged` holds measured quantities that are reported but not gated.
/// `errors` lists failures that prevented a check from running.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub logged: BTreeMap<String, Value>,
    pub errors: Vec<String>,
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: true,
            ..Self::default()
        }
    }

    pub fn push(&mut self, check: impl Into<Check>) {
        let c = check.into();
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn extend<C: Into<Check>>(&mut self, checks: impl IntoIterator<Item = C>) {
        for c in checks {
            self.push(c);
        }
    }

    pub fn error(&mut self, e: impl std::fmt::Display) {
        self.passed = false;
        self.errors.push(format!("{e:#}"));
    }

    pub fn log(&mut self, key: impl Into<String>, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.logged.insert(key.into(), v);
    }

    /// Merges `other` with its check names prefixed by `other.name`.
    pub fn absorb(&mut self, other: Report) {
        let prefix = other.name.clone();
        for c in other.checks {
            self.push(c.prefixed(&prefix));
        }
        for (k, v) in other.logged {
            self.logged.insert(format!("{prefix}/{k}"), v);
        }
        for e in other.errors {
            self.error(format!("{prefix}: {e}"));
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_discipline() {
        let mut r = Report::new("x");
        assert!(r.passed);
        r.push(Check::at_most("a", 1.0, 2.0));
        assert!(r.passed);
        r.log("measured", 3.5);
        assert!(r.passed);
        r.push(Check::at_least("b", 1.0, 2.0));
        assert!(!r.passed);
        assert_eq!(r.failed_checks().count(), 1);
        assert_eq!(r.exit_code(), 1);

        let mut outer = Report::new("outer");
        outer.absorb(r);
        assert!(!outer.passed);
        assert_eq!(outer.checks[1].name, "x/b");
        assert!(outer.logged.contains_key("x/measured"));

        let mut e = Report::new("e");
        e.error("boom");
        assert!(!e.passed);
    }

    #[test]
    fn bound_check_conversion() {
        let c: Check = BoundCheck {
            name: "w_sup".into(),
            passed: true,
            margin: 0.0,
            allowance: 1e-4,
            worst_t: 0.5,
            worst_r: 2.0,
        }
        .into();
        assert!(c.passed);
        assert!(c.detail.contains("r = 2"));
    }
}
