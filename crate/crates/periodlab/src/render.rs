//! JSON, CSV and Markdown output.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{CliError, Result};
use crate::report::{Report, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => Err(CliError::UnsupportedFormat(s.to_string())),
        }
    }
}

/// Pretty JSON with keys in sorted order.
pub fn to_json(report: &Report) -> Result<String> {
    // `serde_json::Value` keeps object keys in a BTreeMap.
    let value = serde_json::to_value(report).map_err(|e| CliError::Internal(e.to_string()))?;
    let mut text = serde_json::to_string_pretty(&value).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn from_json(text: &str) -> Result<Report> {
    Ok(serde_json::from_str(text)?)
}

/// The first table of the report, with a header row.
pub fn to_csv(report: &Report) -> Result<String> {
    let table = report.tables().into_iter().next().ok_or_else(|| CliError::UnsupportedFormat("csv".into()))?;
    let mut writer = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| CliError::Internal(e.to_string());
    writer.write_record(&table.headers).map_err(internal)?;
    for row in &table.rows {
        writer.write_record(row).map_err(internal)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

fn markdown_table(out: &mut String, headers: &[&str], rows: &[Vec<String>]) {
    let cell = |s: &str| s.replace('|', "\\|");
    let _ = writeln!(out, "| {} |", headers.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(headers.len()));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| cell(c)).collect();
        let _ = writeln!(out, "| {} |", cells.join(" | "));
    }
}

pub fn to_markdown(report: &Report) -> String {
    let mut out = format!("# {}\n", report.title());
    let summary = report.summary();
    if !summary.is_empty() {
        out.push('\n');
        let rows: Vec<Vec<String>> = summary.into_iter().map(|(k, v)| vec![k.to_string(), v]).collect();
        markdown_table(&mut out, &["field", "value"], &rows);
    }
    for Table { name, headers, rows } in report.tables() {
        let _ = write!(out, "\n## {name}\n\n");
        markdown_table(&mut out, &headers, &rows);
    }
    out
}

pub fn emit(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => to_csv(report),
        Format::Markdown => Ok(to_markdown(report)),
    }
}
