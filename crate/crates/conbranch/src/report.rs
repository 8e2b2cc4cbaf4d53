//! Text and JSON rendering of pipeline reports.

use std::fmt::Write;

use crate::pipeline::PipelineReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Json,
}

const HEADER: [&str; 9] = [
    "Instance",
    "Pure LP",
    "Bound Inc",
    "Branches",
    "Degree",
    "Root ms",
    "Children ms",
    "Combine ms",
    "Total ms",
];

fn value(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_owned(), |v| format!("{v:.2}"))
}

pub fn emit_report(reports: &[PipelineReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(reports).expect("reports serialize"),
        ReportFormat::Table => {
            let rows: Vec<[String; 9]> = reports
                .iter()
                .map(|r| {
                    [
                        r.instance.clone(),
                        value(r.pure_lp),
                        format!("{:.2}", r.bound_inc),
                        r.branches.to_string(),
                        format!("{:.2}", r.degree),
                        format!("{:.2}", r.timings.root_ms),
                        format!("{:.2}", r.timings.children_ms),
                        format!("{:.2}", r.timings.combining_ms),
                        format!("{:.2}", r.timings.total_ms),
                    ]
                })
                .collect();
            let widths: Vec<usize> = (0..HEADER.len())
                .map(|c| rows.iter().map(|r| r[c].len()).chain([HEADER[c].len()]).max().unwrap_or(0))
                .collect();
            let mut out = String::new();
            let mut line = |cells: &[&str]| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .enumerate()
                    .map(|(c, (cell, &w))| if c == 0 { format!("{cell:<w$}") } else { format!("{cell:>w$}") })
                    .collect();
                writeln!(out, "{}", padded.join("  ").trim_end()).unwrap();
            };
            line(&HEADER);
            for row in &rows {
                line(&row.iter().map(String::as_str).collect::<Vec<_>>());
            }
            out
        }
    }
}
