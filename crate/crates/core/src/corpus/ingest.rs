//! CSV ingestion for the seven-column bug-report schema.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{
    map_severity, BugReport, Corpus, ExcludedRow, ExclusionLedger, SeverityPolicy,
};
use crate::error::{Error, Result};

/// Column-name mapping from logical fields to CSV header names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SchemaConfig {
    pub project: String,
    pub bug_id: String,
    pub resolution_status: String,
    pub short_description: String,
    pub bug_type: String,
    pub priority_label: String,
    pub severity_label: String,
}

impl Default for SchemaConfig {
    fn default() -> Self {
        Self {
            project: "Project".into(),
            bug_id: "Bug_ID".into(),
            resolution_status: "Resolution_Status".into(),
            short_description: "Short_Description".into(),
            bug_type: "Bug_Type".into(),
            priority_label: "Priority_Label".into(),
            severity_label: "Severity_Label".into(),
        }
    }
}

struct ColumnIndex {
    project: usize,
    bug_id: usize,
    resolution_status: usize,
    short_description: usize,
    bug_type: usize,
    priority_label: usize,
    severity_label: usize,
}

impl ColumnIndex {
    fn resolve(headers: &csv::StringRecord, schema: &SchemaConfig) -> Result<Self> {
        let mut positions = BTreeMap::new();
        for (i, name) in headers.iter().enumerate() {
            positions.entry(name.trim().to_string()).or_insert(i);
        }
        let find = |column: &str| -> Result<usize> {
            positions.get(column).copied().ok_or_else(|| Error::Schema {
                column: column.to_string(),
            })
        };
        Ok(Self {
            project: find(&schema.project)?,
            bug_id: find(&schema.bug_id)?,
            resolution_status: find(&schema.resolution_status)?,
            short_description: find(&schema.short_description)?,
            bug_type: find(&schema.bug_type)?,
            priority_label: find(&schema.priority_label)?,
            severity_label: find(&schema.severity_label)?,
        })
    }
}

fn optional_cell(record: &csv::StringRecord, idx: usize) -> Option<String> {
    let value = record.get(idx).unwrap_or("").trim();
    if value.is_empty() {
        None
    } else {
        Some(value.to_string())
    }
}

/// Parse a bug-report CSV file into a labelled corpus.
///
/// Rows whose severity the policy excludes or does not cover are recorded in
/// the exclusion ledger rather than dropped silently. Structural problems
/// (missing columns, malformed quoting, non-integer ids) are hard errors.
pub fn parse_csv(
    path: impl AsRef<Path>,
    schema: &SchemaConfig,
    policy: &SeverityPolicy,
) -> Result<Corpus> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    parse_csv_reader(file, &path.display().to_string(), schema, policy)
}

/// As [`parse_csv`] but over any reader; `source` is recorded in the ledger.
pub fn parse_csv_reader(
    reader: impl Read,
    source: &str,
    schema: &SchemaConfig,
    policy: &SeverityPolicy,
) -> Result<Corpus> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);

    let headers = csv_reader
        .headers()
        .map_err(|e| row_error(&e))?
        .clone();
    let columns = ColumnIndex::resolve(&headers, schema)?;

    let mut reports = Vec::new();
    let mut labels = Vec::new();
    let mut ledger = ExclusionLedger {
        source: source.to_string(),
        ..ExclusionLedger::default()
    };
    let mut seen_ids = std::collections::HashSet::new();

    for record in csv_reader.records() {
        let record = record.map_err(|e| row_error(&e))?;
        ledger.total_rows += 1;
        let line = record
            .position()
            .map(|p| p.line())
            .unwrap_or(ledger.total_rows as u64 + 1);

        let raw_id = record.get(columns.bug_id).unwrap_or("").trim();
        let bug_id: u64 = raw_id.parse().map_err(|_| Error::Row {
            line,
            message: format!("non-integer Bug_ID `{raw_id}`"),
        })?;

        let raw_severity = record
            .get(columns.severity_label)
            .unwrap_or("")
            .trim()
            .to_string();

        if !seen_ids.insert(bug_id) {
            ledger.excluded.push(ExcludedRow {
                line,
                bug_id: Some(bug_id),
                raw_severity: Some(raw_severity),
                reason: "duplicate bug_id".to_string(),
            });
            continue;
        }

        let label = match map_severity(&raw_severity, policy) {
            Ok(Some(class)) => class,
            Ok(None) => {
                ledger.excluded.push(ExcludedRow {
                    line,
                    bug_id: Some(bug_id),
                    raw_severity: Some(raw_severity),
                    reason: "severity excluded by policy".to_string(),
                });
                continue;
            }
            Err(_) => {
                ledger.excluded.push(ExcludedRow {
                    line,
                    bug_id: Some(bug_id),
                    raw_severity: Some(raw_severity),
                    reason: "severity label not covered by policy".to_string(),
                });
                continue;
            }
        };

        reports.push(BugReport {
            project: record.get(columns.project).unwrap_or("").trim().to_string(),
            bug_id,
            resolution_status: record
                .get(columns.resolution_status)
                .unwrap_or("")
                .trim()
                .to_string(),
            short_description: record
                .get(columns.short_description)
                .unwrap_or("")
                .trim()
                .to_string(),
            bug_type: optional_cell(&record, columns.bug_type),
            priority_label: optional_cell(&record, columns.priority_label),
            raw_severity,
        });
        labels.push(label);
    }

    ledger.kept_rows = reports.len();
    Corpus::new(reports, labels, ledger)
}

fn row_error(err: &csv::Error) -> Error {
    let line = match err.position() {
        Some(pos) => pos.line(),
        None => 0,
    };
    Error::Row {
        line,
        message: err.to_string(),
    }
}
