//! Check reports: one record per executed check plus the environment it ran in.
//!
//! `checks` and `environment` are reproducible for a fixed scenario and seed;
//! wall-clock data lives only in `timings`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: String,
    /// `None` when not measured or not finite.
    pub residual: Option<f64>,
    pub bound: Option<f64>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
}

impl CheckRecord {
    pub fn measured(name: impl Into<String>, anchor: impl Into<String>, residual: f64, bound: f64) -> Self {
        let status = if residual <= bound { Status::Pass } else { Status::Fail };
        let finite = |x: f64| x.is_finite().then_some(x);
        Self {
            name: name.into(),
            anchor: anchor.into(),
            residual: finite(residual),
            bound: finite(bound),
            status,
            details: BTreeMap::new(),
        }
    }

    pub fn skipped(name: impl Into<String>, anchor: impl Into<String>, reason: impl Into<String>) -> Self {
        let mut details = BTreeMap::new();
        details.insert("reason".to_string(), Value::String(reason.into()));
        Self { name: name.into(), anchor: anchor.into(), residual: None, bound: None, status: Status::Skipped, details }
    }

    pub fn with_detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub label: String,
    pub seed: u64,
    pub truncation: usize,
    pub eta_norm: Option<f64>,
    pub left_dimension: Option<f64>,
    pub algebra: Vec<usize>,
    pub representation: Vec<usize>,
    pub dim_h: usize,
    pub fock_dim: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
    pub checks_ms: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: u32,
    pub crate_version: String,
    pub environments: Vec<Environment>,
    pub checks: Vec<CheckRecord>,
    pub timings: Timings,
}

impl Default for Report {
    fn default() -> Self {
        Self::new()
    }
}

impl Report {
    pub fn new() -> Self {
        Self {
            version: REPORT_VERSION,
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            environments: Vec::new(),
            checks: Vec::new(),
            timings: Timings::default(),
        }
    }

    pub fn push(&mut self, record: CheckRecord, elapsed_ms: f64) {
        self.checks.push(record);
        self.timings.checks_ms.push(elapsed_ms);
    }

    pub fn extend(&mut self, other: Report) {
        self.environments.extend(other.environments);
        self.checks.extend(other.checks);
        self.timings.checks_ms.extend(other.timings.checks_ms);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckRecord::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn render_human(&self) -> String {
        let mut out = String::new();
        for env in &self.environments {
            let norm = env.eta_norm.map(|n| format!("{n:.3}")).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "# {}: N={} seed={} ‖η‖={} blocks={:?} mult={:?} dim H={} dim F_N⊗H={}",
                env.label, env.truncation, env.seed, norm, env.algebra, env.representation, env.dim_h, env.fock_dim
            );
        }
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            if c.status == Status::Skipped {
                let reason = c.details.get("reason").and_then(Value::as_str).unwrap_or("");
                let _ = writeln!(out, "{tag}  {:<width$}  {reason}", c.name);
            } else {
                let fmt = |x: Option<f64>| x.map(|v| format!("{v:>10.3e}")).unwrap_or_else(|| format!("{:>10}", "n/a"));
                let _ = writeln!(
                    out,
                    "{tag}  {:<width$}  residual {}  bound {}  {}",
                    c.name,
                    fmt(c.residual),
                    fmt(c.bound),
                    c.anchor
                );
            }
        }
        let _ = writeln!(
            out,
            "{} passed, {} failed, {} skipped in {:.1} ms",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skipped),
            self.timings.total_ms
        );
        out
    }
}
