use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use super::config::Format;

pub const CSV_HEADER: &str = "quantity,computed,reference,residual,tolerance,pass";

/// One checked quantity. `pass` is always `residual <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub quantity: String,
    pub computed: f64,
    pub reference: f64,
    /// Where the reference value comes from.
    pub reference_label: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Criterion {
    pub fn new(
        quantity: impl Into<String>,
        computed: f64,
        reference: f64,
        reference_label: impl Into<String>,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        Criterion {
            quantity: quantity.into(),
            computed,
            reference,
            reference_label: reference_label.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }

    /// Residual `|computed - reference|`.
    pub fn absolute(
        quantity: impl Into<String>,
        computed: f64,
        reference: f64,
        reference_label: impl Into<String>,
        tolerance: f64,
    ) -> Self {
        Criterion::new(quantity, computed, reference, reference_label, (computed - reference).abs(), tolerance)
    }

    /// Residual `|computed - reference| / |reference|`.
    pub fn relative(
        quantity: impl Into<String>,
        computed: f64,
        reference: f64,
        reference_label: impl Into<String>,
        tolerance: f64,
    ) -> Self {
        let residual = (computed - reference).abs() / reference.abs();
        Criterion::new(quantity, computed, reference, reference_label, residual, tolerance)
    }

    /// Exact equality, tolerance zero.
    pub fn exact(
        quantity: impl Into<String>,
        computed: f64,
        reference: f64,
        reference_label: impl Into<String>,
    ) -> Self {
        Criterion::absolute(quantity, computed, reference, reference_label, 0.0)
    }
}

/// A labelled computed number that is reported but not checked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Value64 {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub inputs: BTreeMap<String, Value>,
    pub values: Vec<Value64>,
    pub criteria: Vec<Criterion>,
    pub pass: bool,
    /// Numeric failure that stopped the run; `pass` is false when set.
    pub error: Option<String>,
    /// Only filled in on request, so that reports stay byte-reproducible.
    pub wall_time_seconds: Option<f64>,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>) -> Self {
        ExperimentReport {
            experiment: experiment.into(),
            inputs: BTreeMap::new(),
            values: Vec::new(),
            criteria: Vec::new(),
            pass: true,
            error: None,
            wall_time_seconds: None,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) {
        self.inputs.insert(key.to_string(), value.into());
    }

    pub fn value(&mut self, label: impl Into<String>, value: f64) {
        self.values.push(Value64 { label: label.into(), value });
    }

    pub fn check(&mut self, criterion: Criterion) {
        self.criteria.push(criterion);
        self.refresh();
    }

    pub fn fail(&mut self, error: impl Into<String>) {
        self.error = Some(error.into());
        self.refresh();
    }

    fn refresh(&mut self) {
        self.pass = self.error.is_none() && self.criteria.iter().all(|c| c.pass);
    }
}

fn number(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_csv(report: &ExperimentReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for c in &report.criteria {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            csv_field(&c.quantity),
            number(c.computed),
            number(c.reference),
            number(c.residual),
            number(c.tolerance),
            c.pass
        );
    }
    out
}

pub fn render_json(report: &ExperimentReport) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("report serializes");
    out.push('\n');
    out
}

pub fn render(report: &ExperimentReport, format: Format) -> String {
    match format {
        Format::Csv => render_csv(report),
        Format::Json => render_json(report),
    }
}

#[derive(Debug, Error)]
#[error("cannot write report to {destination}: {source}")]
pub struct EmitError {
    pub destination: String,
    #[source]
    pub source: io::Error,
}

/// Writes to `destination`, or to stdout when it is `None`.
pub fn emit_report(report: &ExperimentReport, format: Format, destination: Option<&Path>) -> Result<(), EmitError> {
    let text = render(report, format);
    match destination {
        Some(path) => {
            std::fs::write(path, text).map_err(|source| EmitError { destination: path.display().to_string(), source })
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(|source| EmitError { destination: "stdout".into(), source })
        }
    }
}
