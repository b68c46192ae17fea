//! Report emission: JSON (full precision, machine readable), CSV, and
//! markdown tables (two decimals, human readable).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::protocol::{report_cells, top_models, ExperimentReport, VerificationReport};
use crate::select::GroupName;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Csv,
    MarkdownTable,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown-table" => Ok(ReportFormat::MarkdownTable),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidArgument(format!(
                "unknown format `{other}` (expected csv, markdown-table, or json)"
            ))),
        }
    }
}

/// Write the report in the requested format; returns the files written.
pub fn emit_report(
    report: &ExperimentReport,
    format: ReportFormat,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, Error> {
    std::fs::create_dir_all(out_dir)?;
    match format {
        ReportFormat::Json => {
            let path = out_dir.join("report.json");
            std::fs::write(&path, to_json(report)?)?;
            Ok(vec![path])
        }
        ReportFormat::Csv => {
            let runs = out_dir.join("runs.csv");
            std::fs::write(&runs, render_runs_csv(report))?;
            let stats = out_dir.join("summary.csv");
            std::fs::write(&stats, render_summary_csv(report))?;
            Ok(vec![runs, stats])
        }
        ReportFormat::MarkdownTable => {
            let path = out_dir.join("report.md");
            std::fs::write(&path, render_markdown(report))?;
            Ok(vec![path])
        }
    }
}

/// Full-precision JSON serialization.
pub fn to_json(report: &ExperimentReport) -> Result<String, Error> {
    Ok(serde_json::to_string_pretty(report)?)
}

/// Reload a JSON report; structural fields are validated on deserialize.
pub fn load_report(path: &Path) -> Result<ExperimentReport, Error> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    validate_report_json(&value)?;
    Ok(serde_json::from_value(value)?)
}

/// Required top-level fields of the machine-readable report.
pub const REPORT_REQUIRED_FIELDS: [&str; 8] = [
    "version",
    "seed",
    "config",
    "runs",
    "group_stats",
    "t_tests",
    "notes",
    "cv_executions",
];

pub fn validate_report_json(value: &serde_json::Value) -> Result<(), Error> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Json(serde::de::Error::custom("report is not an object")))?;
    for field in REPORT_REQUIRED_FIELDS {
        if !obj.contains_key(field) {
            return Err(Error::Json(serde::de::Error::custom(format!(
                "report is missing required field `{field}`"
            ))));
        }
    }
    Ok(())
}

fn render_runs_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("target,model,group,mean_f1,skipped,per_fold_f1\n");
    for r in &report.runs {
        let (mean, folds) = match &r.cv {
            Some(cv) => (
                format!("{:.2}", cv.mean_f1),
                cv.per_fold_f1
                    .iter()
                    .map(|v| format!("{v:.4}"))
                    .collect::<Vec<_>>()
                    .join(";"),
            ),
            None => (String::new(), String::new()),
        };
        let skipped = r.skipped.as_deref().unwrap_or("");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.target,
            escape_csv(&r.model),
            r.group,
            mean,
            escape_csv(skipped),
            folds
        );
    }
    out
}

fn render_summary_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("group,n,mean_f1,sd_f1\n");
    for g in &report.group_stats {
        let _ = writeln!(out, "{},{},{:.2},{:.2}", g.group, g.n, g.mean_f1, g.sd_f1);
    }
    out.push_str("\ncomparison,kind,t,df,p_two_sided\n");
    for t in &report.t_tests {
        let _ = writeln!(
            out,
            "{},{:?},{:.4},{:.1},{:.4}",
            escape_csv(&t.comparison),
            t.result.kind,
            t.result.t,
            t.result.df,
            t.result.p_two_sided
        );
    }
    out
}

fn escape_csv(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn render_markdown(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Experiment report\n");
    let _ = writeln!(out, "- version: {}", report.version);
    let _ = writeln!(out, "- seed: {}", report.seed);
    let _ = writeln!(out, "- folds: {}", report.config.folds);
    let _ = writeln!(out, "- cross-validation cells executed: {}\n", report.cv_executions);

    let mut targets: Vec<&String> = Vec::new();
    for r in &report.runs {
        if !targets.contains(&&r.target) {
            targets.push(&r.target);
        }
    }
    for target in &targets {
        let _ = writeln!(out, "## {target}\n");
        let mut header = String::from("| Model |");
        let mut rule = String::from("| --- |");
        for g in GroupName::ORDER {
            let _ = write!(header, " {} |", g.heading());
            rule.push_str(" --- |");
        }
        let _ = writeln!(out, "{header}");
        let _ = writeln!(out, "{rule}");
        let mut models: Vec<&String> = Vec::new();
        for r in report.runs.iter().filter(|r| &r.target == *target) {
            if !models.contains(&&r.model) {
                models.push(&r.model);
            }
        }
        for model in models {
            let mut line = format!("| {model} |");
            for g in GroupName::ORDER {
                let cell = report
                    .runs
                    .iter()
                    .find(|r| &r.target == *target && &r.model == model && r.group == g);
                match cell.and_then(|r| r.cv.as_ref()) {
                    Some(cv) => {
                        let _ = write!(line, " {:.2} |", cv.mean_f1);
                    }
                    None => line.push_str(" - |"),
                }
            }
            let _ = writeln!(out, "{line}");
        }
        out.push('\n');
    }

    let _ = writeln!(out, "## Group summary\n");
    let _ = writeln!(out, "| Group | N | Mean F1 | SD |");
    let _ = writeln!(out, "| --- | --- | --- | --- |");
    for g in &report.group_stats {
        let _ = writeln!(
            out,
            "| {} | {} | {:.2} | {:.2} |",
            g.group.heading(),
            g.n,
            g.mean_f1,
            g.sd_f1
        );
    }
    out.push('\n');

    if !report.t_tests.is_empty() {
        let _ = writeln!(out, "## Paired comparisons\n");
        let _ = writeln!(out, "| Comparison | t | df | p (two-sided) |");
        let _ = writeln!(out, "| --- | --- | --- | --- |");
        for t in &report.t_tests {
            let _ = writeln!(
                out,
                "| {} | {:.3} | {:.0} | {:.4} |",
                t.comparison, t.result.t, t.result.df, t.result.p_two_sided
            );
        }
        out.push('\n');
    }

    let top = top_models(&report_cells(report), 3);
    let _ = writeln!(out, "## Top models per target\n");
    let _ = writeln!(out, "| Target | Group | Model | F1 |");
    let _ = writeln!(out, "| --- | --- | --- | --- |");
    for (target, entries) in &top {
        for e in entries {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {:.2} |",
                target,
                e.group.heading(),
                e.model,
                e.f1
            );
        }
    }
    out.push('\n');

    if !report.notes.is_empty() {
        let _ = writeln!(out, "## Notes\n");
        for n in &report.notes {
            let _ = writeln!(out, "- {n}");
        }
    }
    out
}

/// Human-readable rendering of a verification run.
pub fn render_verification(v: &VerificationReport) -> String {
    let mut out = String::new();
    for c in &v.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "[{status}] {}: {}", c.name, c.detail);
    }
    for t in &v.recomputed_t {
        let _ = writeln!(
            out,
            "[t] {}: t = {:.4}, df = {:.2}, p = {:.4}",
            t.comparison, t.result.t, t.result.df, t.result.p_two_sided
        );
    }
    if v.discrepancies.is_empty() {
        let _ = writeln!(out, "no discrepancies against the published values");
    } else {
        for d in &v.discrepancies {
            let _ = writeln!(out, "[DISCREPANCY] {d}");
        }
    }
    out
}
