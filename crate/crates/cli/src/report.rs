use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

pub const CSV_HEADER: &str = "field,quantity,params,value,main_term,ratio,checks,elapsed_ms";

/// One grid point of a sweep. The CSV projection keeps the fixed 8-column
/// header; status and the main-term formula tag ride along in JSON (a
/// skipped or failed point folds its status into the checks column of the
/// CSV so the grid shape is preserved either way).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Row {
    pub field: String,
    pub quantity: String,
    pub params: String,
    pub value: String,
    pub main_term: String,
    pub ratio: String,
    pub checks: String,
    pub elapsed_ms: u64,
    pub status: String,
    pub method: String,
    pub formula: String,
    /// Structured extras (JSON only; the CSV projection keeps its fixed
    /// schema). Bilinear rows carry value_re/value_im/abs/trivial_bound.
    #[serde(default)]
    pub extra: Vec<(String, String)>,
}

impl Row {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BoundReport {
    pub quantity: String,
    pub seed: u64,
    pub weight_generator: String,
    pub workers_label: String,
    pub rows: Vec<Row>,
    pub hard_failures: u64,
}

impl BoundReport {
    pub fn all_hard_checks_passed(&self) -> bool {
        self.hard_failures == 0
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn emit_csv(report: &BoundReport) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &report.rows {
        let checks = if row.is_ok() {
            row.checks.clone()
        } else if row.checks.is_empty() {
            format!("status={}", row.status)
        } else {
            format!("status={}|{}", row.status, row.checks)
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            csv_field(&row.field),
            csv_field(&row.quantity),
            csv_field(&row.params),
            csv_field(&row.value),
            csv_field(&row.main_term),
            csv_field(&row.ratio),
            csv_field(&checks),
            row.elapsed_ms
        );
    }
    out
}

pub fn emit_json(report: &BoundReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes") + "\n"
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Result<ReportFormat> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => anyhow::bail!("unknown format '{other}' (csv|json)"),
        }
    }
}

pub fn write_report(report: &BoundReport, path: &Path, format: ReportFormat) -> Result<()> {
    let text = match format {
        ReportFormat::Csv => emit_csv(report),
        ReportFormat::Json => emit_json(report),
    };
    std::fs::write(path, text).with_context(|| format!("writing report to {}", path.display()))
}

pub fn load_json(path: &Path) -> Result<BoundReport> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading report {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}

/// Formats a float for report columns: fixed precision scientific notation,
/// deterministic for a given value.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if x.is_finite() && x.abs() >= 1e-3 && x.abs() < 1e15 {
        let s = format!("{x:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{x:.6e}")
    }
}

/// Check outcomes rendered as "name=pass|name=FAIL".
pub fn render_checks(checks: &[(String, bool)]) -> String {
    checks
        .iter()
        .map(|(name, ok)| format!("{name}={}", if *ok { "pass" } else { "FAIL" }))
        .collect::<Vec<_>>()
        .join("|")
}
