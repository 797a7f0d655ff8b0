use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::ScenarioConfig;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Established by an argument outside the computation; recorded, not checked.
    Trusted,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Trusted => "trusted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub claim: String,
    pub metrics: BTreeMap<String, Value>,
    pub locations: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub schema_version: u32,
    pub scenario: String,
    pub config: ScenarioConfig,
    pub overall: Status,
    pub checks: Vec<Check>,
    /// Serialized nerves, bundles and summaries.
    pub artifacts: BTreeMap<String, Value>,
    pub scope: String,
}

impl CertificateReport {
    pub fn new(scenario: &str, config: &ScenarioConfig, scope: &str) -> Self {
        CertificateReport {
            schema_version: SCHEMA_VERSION,
            scenario: scenario.to_string(),
            config: config.clone(),
            overall: Status::Pass,
            checks: Vec::new(),
            artifacts: BTreeMap::new(),
            scope: scope.to_string(),
        }
    }

    pub fn push(&mut self, check: Check) {
        debug_assert!(self.check(&check.name).is_none(), "duplicate check {}", check.name);
        if check.status == Status::Fail {
            self.overall = Status::Fail;
        }
        self.checks.push(check);
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self) -> bool {
        self.overall == Status::Pass
    }

    pub fn artifact<T: Serialize>(&mut self, key: &str, value: &T) {
        let v = serde_json::to_value(value).unwrap_or_else(|e| Value::String(format!("unserializable: {e}")));
        self.artifacts.insert(key.to_string(), v);
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario {}  (schema v{})", self.scenario, self.schema_version);
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(4);
        for c in &self.checks {
            let _ = writeln!(out, "  {:<width$}  {:<7}  {}", c.name, c.status.as_str().to_uppercase(), c.claim);
            if c.status == Status::Fail {
                if let Some(e) = c.metrics.get("error") {
                    let _ = writeln!(out, "  {:<width$}           error: {}", "", e);
                }
            }
        }
        let _ = writeln!(out, "overall: {}", self.overall.as_str().to_uppercase());
        let _ = writeln!(out, "scope: {}", self.scope);
        out
    }
}

/// One step in progress. Failed steps never abort the pipeline.
pub struct CheckBuilder {
    check: Check,
}

impl CheckBuilder {
    pub fn new(name: &str, claim: &str) -> Self {
        CheckBuilder {
            check: Check {
                name: name.to_string(),
                status: Status::Pass,
                claim: claim.to_string(),
                metrics: BTreeMap::new(),
                locations: Vec::new(),
                note: None,
            },
        }
    }

    pub fn metric<T: Serialize>(&mut self, key: &str, value: T) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.check.metrics.insert(key.to_string(), v);
        self
    }

    pub fn location<T: Serialize>(&mut self, value: T) -> &mut Self {
        if let Ok(v) = serde_json::to_value(value) {
            self.check.locations.push(v);
        }
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.check.note = Some(note.into());
        self
    }

    /// Records a sub-condition; any false requirement fails the check.
    pub fn require(&mut self, key: &str, ok: bool) -> &mut Self {
        self.metric(key, ok);
        if !ok {
            self.check.status = Status::Fail;
        }
        self
    }

    pub fn finish(self) -> Check {
        self.check
    }

    /// Runs `body`; an error fails the check and is recorded under `error`.
    pub fn run(name: &str, claim: &str, body: impl FnOnce(&mut CheckBuilder) -> Result<()>) -> Check {
        let mut b = CheckBuilder::new(name, claim);
        if let Err(e) = body(&mut b) {
            b.metric("error", e.to_string());
            b.check.status = Status::Fail;
        }
        b.finish()
    }

    pub fn trusted(name: &str, claim: &str, note: &str) -> Check {
        let mut b = CheckBuilder::new(name, claim);
        b.check.status = Status::Trusted;
        b.note(note);
        b.finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Text,
}

impl ReportFormat {
    pub fn render(self, rep: &CertificateReport) -> Result<String> {
        match self {
            ReportFormat::Json => rep.to_json(),
            ReportFormat::Text => Ok(rep.to_text()),
        }
    }
}

/// Writes the report to `path`.
pub fn emit_report(rep: &CertificateReport, path: &Path, format: ReportFormat) -> Result<()> {
    let s = format.render(rep)?;
    std::fs::write(path, s).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Stand-in for a missing upstream product.
pub fn missing(what: &str) -> Error {
    Error::Precondition(format!("{what} unavailable (an earlier step failed)"))
}
