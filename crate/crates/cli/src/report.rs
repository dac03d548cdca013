//! Result-table rendering in the shape of the comparison table (one row per
//! project/method with four metric columns), plus the per-prediction JSONL
//! export.

use anyhow::{bail, Result};
use bugassign_core::eval::{f_score, MetricsReport, PredictionLog};
use bugassign_core::features::Method;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

impl OutputFormat {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_lowercase().as_str() {
            "table" => Ok(OutputFormat::Table),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => bail!("unknown output format: {other} (expected table, json, or csv)"),
        }
    }
}

/// Row order of the comparison table.
const METHOD_ORDER: [Method; 3] = [Method::Chi2, Method::Tram, Method::Cf];

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

fn ordered(rows: &[(Method, MetricsReport)]) -> Vec<(Method, &MetricsReport)> {
    let mut out = Vec::new();
    for method in METHOD_ORDER {
        for (m, report) in rows {
            if *m == method {
                // The rendered F must be the harmonic mean of the rendered
                // aggregates; a report violating that is a computation bug.
                assert!(
                    (report.f_score - f_score(report.precision, report.recall)).abs() <= 1e-9,
                    "aggregate F-score is not the harmonic mean of P and R"
                );
                out.push((method, report));
            }
        }
    }
    out
}

/// Renders the comparison rows for one project. Metrics are rounded to
/// three decimals in every format; the JSON form parses back to exactly the
/// rendered numbers.
pub fn render_report(
    project: &str,
    rows: &[(Method, MetricsReport)],
    format: OutputFormat,
) -> String {
    let rows = ordered(rows);
    match format {
        OutputFormat::Table => {
            let mut out = format!(
                "{:<12} {:<7} {:>9} {:>7} {:>8} {:>6}\n",
                "Project", "Method", "Precision", "Recall", "F-Score", "AUC"
            );
            for (method, r) in rows {
                out.push_str(&format!(
                    "{:<12} {:<7} {:>9.3} {:>7.3} {:>8.3} {:>6.3}\n",
                    project,
                    method.name(),
                    round3(r.precision),
                    round3(r.recall),
                    round3(r.f_score),
                    round3(r.auc),
                ));
            }
            out
        }
        OutputFormat::Csv => {
            let mut out = String::from("project,method,precision,recall,f_score,auc\n");
            for (method, r) in rows {
                out.push_str(&format!(
                    "{},{},{:.3},{:.3},{:.3},{:.3}\n",
                    project,
                    method.name(),
                    round3(r.precision),
                    round3(r.recall),
                    round3(r.f_score),
                    round3(r.auc),
                ));
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(method, r)| {
                    json!({
                        "project": project,
                        "method": method.name(),
                        "precision": round3(r.precision),
                        "recall": round3(r.recall),
                        "f_score": round3(r.f_score),
                        "auc": round3(r.auc),
                    })
                })
                .collect();
            let mut text = serde_json::to_string_pretty(&json!({ "rows": rows }))
                .expect("report serialization cannot fail");
            text.push('\n');
            text
        }
    }
}

/// One JSON object per held-out prediction: report id, truth, prediction,
/// the full posterior, and the fold.
pub fn predictions_jsonl(log: &PredictionLog) -> String {
    let mut out = String::new();
    for entry in &log.entries {
        let scores: serde_json::Map<String, Value> = entry
            .scores
            .iter()
            .map(|(class, p)| (class.clone(), json!(p)))
            .collect();
        let line = json!({
            "report_id": entry.report_id,
            "fold": entry.fold,
            "true": entry.true_class,
            "predicted": entry.predicted,
            "scores": scores,
        });
        out.push_str(&serde_json::to_string(&line).expect("prediction serialization"));
        out.push('\n');
    }
    out
}
