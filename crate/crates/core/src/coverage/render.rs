//! Table and JSON renderings of coverage and delta reports. The JSON shape
//! is described by `docs/report-schema.json`.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{json, Value};

use super::{CoverageReport, CoverageRow, DeltaReport, LifecycleDistribution};
use crate::drift::DriftFinding;
use crate::timestamp;
use crate::vcs::RevisionRef;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(Self::Table),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown report format {other:?} (expected table or json)")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Report<'a> {
    Coverage(&'a CoverageReport),
    Delta(&'a DeltaReport),
}

impl Report<'_> {
    fn rows(&self) -> &[CoverageRow] {
        match self {
            Self::Coverage(r) => &r.rows,
            Self::Delta(r) => &r.rows,
        }
    }

    fn distribution(&self) -> &LifecycleDistribution {
        match self {
            Self::Coverage(r) => &r.lifecycle_distribution,
            Self::Delta(r) => &r.lifecycle_distribution,
        }
    }

    fn revision(&self) -> &RevisionRef {
        match self {
            Self::Coverage(r) => &r.revision,
            Self::Delta(r) => &r.branch,
        }
    }

    fn set_filter(&self) -> Option<&str> {
        match self {
            Self::Coverage(r) => r.set_filter.as_deref(),
            Self::Delta(r) => r.set_filter.as_deref(),
        }
    }

    fn is_delta(&self) -> bool {
        matches!(self, Self::Delta(_))
    }
}

/// Renders a report. `drift` is `None` when drift detection was switched off.
pub fn render(report: Report<'_>, drift: Option<&[DriftFinding]>, format: Format) -> String {
    match format {
        Format::Table => table(report, drift),
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&to_json(report, drift)).expect("values serialize");
            text.push('\n');
            text
        }
    }
}

fn revision_json(r: &RevisionRef) -> Value {
    json!({ "name": r.name, "resolved_id": r.resolved_id })
}

pub fn to_json(report: Report<'_>, drift: Option<&[DriftFinding]>) -> Value {
    let delta = report.is_delta();
    let rows: Vec<Value> = report
        .rows()
        .iter()
        .map(|r| {
            json!({
                "traceable": r.traceable,
                "constant_name": r.constant_name,
                "requirement_id": r.requirement_id,
                "implementation_references": r.impl_count,
                "test_references": r.test_count,
                "status": r.state.to_string(),
                "delta": delta,
            })
        })
        .collect();
    let d = report.distribution();
    let drift = drift.map(|findings| {
        findings
            .iter()
            .map(|f| {
                json!({
                    "requirement_id": f.requirement_id,
                    "traceable": f.traceable,
                    "direction": f.direction.to_string(),
                    "requirement_time": timestamp::format(&f.requirement_time),
                    "code_time": timestamp::format(&f.code_time),
                    "evidence_files": f.evidence_files,
                })
            })
            .collect::<Vec<_>>()
    });
    json!({
        "kind": if delta { "delta" } else { "coverage" },
        "revision": revision_json(report.revision()),
        "baseline": match report {
            Report::Delta(r) => revision_json(&r.baseline),
            Report::Coverage(_) => Value::Null,
        },
        "set_filter": report.set_filter(),
        "rows": rows,
        "lifecycle_distribution": {
            "active": d.active,
            "deprecated": d.deprecated,
            "implementation_references_to_deprecated": d.implementation_references_to_deprecated,
        },
        "drift": drift,
    })
}

/// Pipe table with every column padded to its widest cell.
fn pipe_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("| {} |\n", padded.join(" | "))
    };
    let mut out = line(header.to_vec());
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&format!("|-{}-|\n", rule.join("-|-")));
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn table(report: Report<'_>, drift: Option<&[DriftFinding]>) -> String {
    let mut out = String::new();
    match report {
        Report::Coverage(r) => {
            let _ = writeln!(out, "Coverage at {}", r.revision.name);
        }
        Report::Delta(r) => {
            let _ = writeln!(out, "Delta of {} against {}", r.branch.name, r.baseline.name);
        }
    }
    if let Some(set) = report.set_filter() {
        let _ = writeln!(out, "Set: {set}");
    }
    out.push('\n');

    let header: [&str; 4] = if report.is_delta() {
        [
            "Traceable",
            "Implementation References (delta)",
            "Test References (delta)",
            "Status",
        ]
    } else {
        ["Traceable", "Implementation References", "Test References", "Status"]
    };
    let rows: Vec<Vec<String>> = report
        .rows()
        .iter()
        .map(|r| {
            vec![
                r.traceable.clone(),
                r.impl_count.to_string(),
                r.test_count.to_string(),
                r.state.to_string(),
            ]
        })
        .collect();
    out.push_str(&pipe_table(&header, &rows));

    let d = report.distribution();
    let _ = writeln!(
        out,
        "\nLifecycle: {} active, {} deprecated, {} implementation references to deprecated",
        d.active, d.deprecated, d.implementation_references_to_deprecated
    );

    if let Some(findings) = drift {
        out.push('\n');
        if findings.is_empty() {
            out.push_str("Drift: none\n");
        } else {
            out.push_str("Drift:\n");
            let rows: Vec<Vec<String>> = findings
                .iter()
                .map(|f| {
                    vec![
                        f.traceable.clone(),
                        f.direction.to_string(),
                        timestamp::format(&f.requirement_time),
                        timestamp::format(&f.code_time),
                        f.evidence_files.join(", "),
                    ]
                })
                .collect();
            out.push_str(&pipe_table(
                &[
                    "Traceable",
                    "Direction",
                    "Requirement Modified",
                    "Code Committed",
                    "Files",
                ],
                &rows,
            ));
        }
    }
    out
}

/// Data cells of a rendered table, one vector per row (header excluded).
/// Used by tests and by anyone post-processing table output.
pub fn parse_table_cells(table: &str) -> Vec<Vec<String>> {
    table
        .lines()
        .skip_while(|l| !l.starts_with("| Traceable"))
        .skip(2)
        .take_while(|l| l.starts_with('|'))
        .map(|l| l.trim_matches('|').split('|').map(|c| c.trim().to_string()).collect())
        .collect()
}
