//! Corpus file formats: JSONL (one object per line) and RFC-4180 CSV, both
//! carrying the same column set. Loading is lenient row by row -- bad rows
//! are counted, never silently dropped -- and strict about the file itself.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use bugassign_core::corpus::{BugReport, Corpus, TimeWindow, Timestamp, MISSING};
use chrono::{DateTime, NaiveDate, NaiveDateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};

pub const PRIORITIES: [&str; 5] = ["P1", "P2", "P3", "P4", "P5"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl CorpusFormat {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_lowercase().as_str() {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "csv" => Ok(CorpusFormat::Csv),
            other => bail!("unknown corpus format: {other} (expected jsonl or csv)"),
        }
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => Ok(CorpusFormat::Jsonl),
            Some("csv") => Ok(CorpusFormat::Csv),
            _ => bail!(
                "cannot infer corpus format from {}; use a .jsonl or .csv path",
                path.display()
            ),
        }
    }
}

/// The wire row. Key names are fixed: `op_sys` on disk maps to the
/// `operating_system` model field. The REST client builds these directly
/// from remote bug objects so files and live fetches share one validation
/// path.
#[derive(Debug, Default, Serialize, Deserialize)]
pub(crate) struct Row {
    #[serde(default)]
    pub(crate) id: Option<u64>,
    #[serde(default)]
    pub(crate) summary: String,
    #[serde(default)]
    pub(crate) component: String,
    #[serde(default)]
    pub(crate) op_sys: String,
    #[serde(default)]
    pub(crate) priority: String,
    #[serde(default)]
    pub(crate) severity: String,
    #[serde(default)]
    pub(crate) reporter: String,
    #[serde(default)]
    pub(crate) assignee: String,
    #[serde(default)]
    pub(crate) status: String,
    #[serde(default)]
    pub(crate) resolution: String,
    #[serde(default)]
    pub(crate) created_at: String,
    #[serde(default)]
    pub(crate) modified_at: String,
    #[serde(default)]
    pub(crate) product: String,
}

/// Per-reason counts of rows that did not make it into the corpus.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct LoadDiagnostics {
    /// Unparseable row or unparseable timestamps.
    pub malformed: usize,
    pub missing_id: usize,
    pub missing_assignee: usize,
    pub duplicate_id: usize,
    pub invalid_priority: usize,
    /// Valid rows outside the configured time window (not an error).
    pub excluded_by_window: usize,
}

impl LoadDiagnostics {
    /// Rows rejected as bad input; window exclusions are counted apart.
    pub fn skipped(&self) -> usize {
        self.malformed
            + self.missing_id
            + self.missing_assignee
            + self.duplicate_id
            + self.invalid_priority
    }
}

#[derive(Debug, Default, Clone)]
pub struct LoadOptions {
    /// Inferred from the file extension when absent.
    pub format: Option<CorpusFormat>,
    pub window: Option<TimeWindow>,
    /// Fail the whole load when more than this many rows are skipped.
    /// `None` (the default) skips and counts without a limit.
    pub max_skipped: Option<usize>,
    /// Provenance label; defaults to the file name.
    pub source_label: Option<String>,
}

/// Accepts RFC 3339 plus the common tracker spellings
/// (`2012-12-22T03:01:00`, `2012-12-22 03:01:00`, `2012-12-22`), all UTC.
pub fn parse_timestamp(text: &str) -> Option<Timestamp> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(text) {
        return Some(Timestamp(dt.timestamp()));
    }
    for pattern in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(text, pattern) {
            return Some(Timestamp(naive.and_utc().timestamp()));
        }
    }
    if let Ok(date) = NaiveDate::parse_from_str(text, "%Y-%m-%d") {
        return Some(Timestamp(date.and_hms_opt(0, 0, 0)?.and_utc().timestamp()));
    }
    None
}

pub fn format_timestamp(t: Timestamp) -> String {
    match Utc.timestamp_opt(t.0, 0) {
        chrono::LocalResult::Single(dt) => dt.format("%Y-%m-%dT%H:%M:%SZ").to_string(),
        _ => format!("@{}", t.0),
    }
}

fn or_missing(value: &str) -> String {
    let trimmed = value.trim();
    if trimmed.is_empty() {
        MISSING.to_string()
    } else {
        trimmed.to_string()
    }
}

/// Validates and converts one wire row, updating diagnostics on rejection.
pub(crate) fn convert_row(
    row: Row,
    window: Option<TimeWindow>,
    seen: &mut BTreeSet<u64>,
    diag: &mut LoadDiagnostics,
) -> Option<BugReport> {
    let id = match row.id {
        Some(id) if id > 0 => id,
        _ => {
            diag.missing_id += 1;
            return None;
        }
    };
    if row.assignee.trim().is_empty() {
        diag.missing_assignee += 1;
        return None;
    }
    let created_at = match parse_timestamp(&row.created_at) {
        Some(t) => t,
        None => {
            diag.malformed += 1;
            return None;
        }
    };
    let modified_at = match parse_timestamp(&row.modified_at) {
        Some(t) => t,
        None => {
            diag.malformed += 1;
            return None;
        }
    };
    let priority = {
        let raw = row.priority.trim();
        if raw.is_empty() || raw == MISSING {
            MISSING.to_string()
        } else {
            let upper = raw.to_uppercase();
            if PRIORITIES.contains(&upper.as_str()) {
                upper
            } else {
                diag.invalid_priority += 1;
                return None;
            }
        }
    };
    if let Some(w) = window {
        if !w.contains(created_at) {
            diag.excluded_by_window += 1;
            return None;
        }
    }
    if !seen.insert(id) {
        diag.duplicate_id += 1;
        return None;
    }
    Some(BugReport {
        id,
        summary: row.summary,
        component: or_missing(&row.component),
        operating_system: or_missing(&row.op_sys),
        priority,
        severity: or_missing(&row.severity),
        reporter: or_missing(&row.reporter),
        assignee: row.assignee.trim().to_string(),
        status: or_missing(&row.status),
        resolution: or_missing(&row.resolution),
        created_at,
        modified_at,
        product: or_missing(&row.product),
    })
}

pub fn load_corpus(path: &Path, opts: &LoadOptions) -> Result<(Corpus, LoadDiagnostics)> {
    let format = match opts.format {
        Some(f) => f,
        None => CorpusFormat::from_path(path)?,
    };
    let mut diag = LoadDiagnostics::default();
    let mut seen = BTreeSet::new();
    let mut reports = Vec::new();

    match format {
        CorpusFormat::Jsonl => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read corpus file {}", path.display()))?;
            for line in text.lines().filter(|l| !l.trim().is_empty()) {
                match serde_json::from_str::<Row>(line) {
                    Ok(row) => {
                        if let Some(report) = convert_row(row, opts.window, &mut seen, &mut diag) {
                            reports.push(report);
                        }
                    }
                    Err(_) => diag.malformed += 1,
                }
            }
        }
        CorpusFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new()
                .flexible(false)
                .from_path(path)
                .with_context(|| format!("cannot read corpus file {}", path.display()))?;
            for record in reader.deserialize::<Row>() {
                match record {
                    Ok(row) => {
                        if let Some(report) = convert_row(row, opts.window, &mut seen, &mut diag) {
                            reports.push(report);
                        }
                    }
                    Err(_) => diag.malformed += 1,
                }
            }
        }
    }

    if let Some(max) = opts.max_skipped {
        if diag.skipped() > max {
            bail!(
                "{} rows were skipped as malformed or invalid, above the limit of {max}",
                diag.skipped()
            );
        }
    }

    let source = opts
        .source_label
        .clone()
        .or_else(|| path.file_name().map(|n| n.to_string_lossy().into_owned()))
        .unwrap_or_else(|| path.display().to_string());
    Ok((Corpus::new(reports, &source, opts.window), diag))
}

fn report_to_row(report: &BugReport) -> Row {
    Row {
        id: Some(report.id),
        summary: report.summary.clone(),
        component: report.component.clone(),
        op_sys: report.operating_system.clone(),
        priority: report.priority.clone(),
        severity: report.severity.clone(),
        reporter: report.reporter.clone(),
        assignee: report.assignee.clone(),
        status: report.status.clone(),
        resolution: report.resolution.clone(),
        created_at: format_timestamp(report.created_at),
        modified_at: format_timestamp(report.modified_at),
        product: report.product.clone(),
    }
}

pub fn save_corpus(corpus: &Corpus, path: &Path, format: CorpusFormat) -> Result<()> {
    match format {
        CorpusFormat::Jsonl => {
            let mut out = String::new();
            for report in corpus.reports() {
                out.push_str(&serde_json::to_string(&report_to_row(report))?);
                out.push('\n');
            }
            fs::write(path, out)
                .with_context(|| format!("cannot write corpus file {}", path.display()))?;
        }
        CorpusFormat::Csv => {
            let mut writer = csv::Writer::from_path(path)
                .with_context(|| format!("cannot write corpus file {}", path.display()))?;
            for report in corpus.reports() {
                writer.serialize(report_to_row(report))?;
            }
            writer.flush()?;
        }
    }
    Ok(())
}
