//! Check reports shared by the validators and the CLI.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub violations: Vec<Violation>,
    /// Informational entries that never affect validity.
    pub info: BTreeMap<String, serde_json::Value>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, kind: &str, message: impl Into<String>) {
        self.violations.push(Violation { kind: kind.into(), message: message.into() });
    }

    pub fn note(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.info.insert(key.into(), value.into());
    }

    pub fn merge(&mut self, other: Report) {
        self.violations.extend(other.violations);
        self.info.extend(other.info);
    }

    pub fn has(&self, kind: &str) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn summary(&self) -> String {
        self.violations.iter().map(|v| format!("{}: {}", v.kind, v.message)).collect::<Vec<_>>().join("; ")
    }
}
