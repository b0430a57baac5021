//! The machine-readable report printed by every subcommand.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}

/// Size of a residual: exact (a rational or a formatted element) or a
/// floating magnitude.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Magnitude {
    Exact(String),
    Float(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub location: String,
    pub value: Magnitude,
}

impl Residual {
    pub fn exact(location: impl Into<String>, value: impl Into<String>) -> Self {
        Residual { location: location.into(), value: Magnitude::Exact(value.into()) }
    }

    pub fn float(location: impl Into<String>, value: f64) -> Self {
        Residual { location: location.into(), value: Magnitude::Float(value) }
    }
}

/// Field order is fixed by declaration; `result` holds command-specific
/// data with sorted keys. Timing is only included on request so that
/// reports are byte-identical across runs.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub residuals: Vec<Residual>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl Report {
    /// `pass` iff no residual survives.
    pub fn from_residuals(command: &str, residuals: Vec<Residual>, result: Option<Value>) -> Self {
        let status = if residuals.is_empty() { Status::Pass } else { Status::Fail };
        Report { command: command.to_string(), status, residuals, result, error: None, timing_ms: None }
    }

    pub fn error(command: &str, msg: String) -> Self {
        Report {
            command: command.to_string(),
            status: Status::Error,
            residuals: Vec::new(),
            result: None,
            error: Some(msg),
            timing_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Short human-readable rendering.
    pub fn to_text(&self) -> String {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        };
        let mut out = format!("{} {}", self.command, status);
        if let Some(e) = &self.error {
            out.push_str(&format!(": {e}"));
        }
        out.push('\n');
        if let Some(Value::Object(map)) = &self.result {
            for (k, v) in map {
                out.push_str(&format!("  {k}: {v}\n"));
            }
        }
        for r in &self.residuals {
            let v = match &r.value {
                Magnitude::Exact(s) => s.clone(),
                Magnitude::Float(x) => format!("{x:e}"),
            };
            out.push_str(&format!("  residual at {}: {v}\n", r.location));
        }
        if let Some(t) = self.timing_ms {
            out.push_str(&format!("  time: {t:.3} ms\n"));
        }
        out
    }
}
