//! Machine-readable check reports with deterministic serialization.
//!
//! JSON key order is fixed (sorted maps everywhere), rationals render as
//! "p/q" strings, and timing is opt-in so that identical invocations give
//! byte-identical output.

use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub check: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub status: Status,
    pub details: serde_json::Value,
    pub version: &'static str,
    pub runtime_ms: Option<u128>,
}

impl Report {
    pub fn new(
        check: impl Into<String>,
        params: BTreeMap<String, serde_json::Value>,
        status: Status,
        details: serde_json::Value,
    ) -> Self {
        Report {
            check: check.into(),
            params,
            status,
            details,
            version: env!("CARGO_PKG_VERSION"),
            runtime_ms: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "check": self.check,
            "details": self.details,
            "params": self.params,
            "status": self.status.as_str(),
            "version": self.version,
        });
        if let Some(ms) = self.runtime_ms {
            v["runtime_ms"] = serde_json::json!(ms as u64);
        }
        v
    }

    pub fn to_text(&self) -> String {
        let params = self
            .params
            .iter()
            .map(|(k, v)| match v {
                serde_json::Value::String(s) => format!("{k}={s}"),
                other => format!("{k}={other}"),
            })
            .collect::<Vec<_>>()
            .join(" ");
        let header = if params.is_empty() {
            format!("[{}] {}", self.status.as_str().to_uppercase(), self.check)
        } else {
            format!(
                "[{}] {} ({})",
                self.status.as_str().to_uppercase(),
                self.check,
                params
            )
        };
        let body = serde_json::to_string_pretty(&self.details).unwrap_or_default();
        let indented: String = body
            .lines()
            .map(|l| format!("  {l}\n"))
            .collect();
        match self.runtime_ms {
            Some(ms) => format!("{header} [{ms} ms]\n{indented}"),
            None => format!("{header}\n{indented}"),
        }
    }
}

/// Helper for the common `params` construction.
pub fn params_from<const K: usize>(pairs: [(&str, serde_json::Value); K]) -> BTreeMap<String, serde_json::Value> {
    pairs
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}
