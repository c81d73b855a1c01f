//! Bug-report corpus: parsing, severity labels, splits, and fold plans.

mod ingest;
mod severity;
mod split;

pub use ingest::{parse_csv, parse_csv_reader, SchemaConfig};
pub use severity::{map_severity, MappedSeverity, SeverityPolicy};
pub use split::{make_folds, stratified_split, FoldPlan};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One parsed bug report row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugReport {
    pub project: String,
    pub bug_id: u64,
    pub resolution_status: String,
    /// Raw short description; empty when the source cell was blank.
    pub short_description: String,
    pub bug_type: Option<String>,
    pub priority_label: Option<String>,
    pub raw_severity: String,
}

/// Binary severity target. HIGH is the positive class everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SeverityClass {
    High,
    Low,
}

impl SeverityClass {
    pub fn is_high(self) -> bool {
        matches!(self, SeverityClass::High)
    }

    /// 1.0 for HIGH, 0.0 for LOW.
    pub fn as_f64(self) -> f64 {
        if self.is_high() {
            1.0
        } else {
            0.0
        }
    }

    /// +1.0 for HIGH, -1.0 for LOW (margin-based learners).
    pub fn as_sign(self) -> f64 {
        if self.is_high() {
            1.0
        } else {
            -1.0
        }
    }
}

impl std::fmt::Display for SeverityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeverityClass::High => write!(f, "HIGH"),
            SeverityClass::Low => write!(f, "LOW"),
        }
    }
}

/// One excluded input row and why it was dropped.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExcludedRow {
    /// 1-based line number in the source file.
    pub line: u64,
    pub bug_id: Option<u64>,
    pub raw_severity: Option<String>,
    pub reason: String,
}

/// Row-count ledger for an ingest: nothing is dropped silently.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ExclusionLedger {
    pub source: String,
    pub total_rows: usize,
    pub kept_rows: usize,
    pub excluded: Vec<ExcludedRow>,
}

/// Parsed reports with parallel labels and ingest provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Corpus {
    reports: Vec<BugReport>,
    labels: Vec<SeverityClass>,
    ledger: ExclusionLedger,
}

impl Corpus {
    pub fn new(
        reports: Vec<BugReport>,
        labels: Vec<SeverityClass>,
        ledger: ExclusionLedger,
    ) -> Result<Self> {
        if reports.len() != labels.len() {
            return Err(Error::DegenerateLabels(format!(
                "{} reports but {} labels",
                reports.len(),
                labels.len()
            )));
        }
        Ok(Self {
            reports,
            labels,
            ledger,
        })
    }

    pub fn reports(&self) -> &[BugReport] {
        &self.reports
    }

    pub fn labels(&self) -> &[SeverityClass] {
        &self.labels
    }

    pub fn ledger(&self) -> &ExclusionLedger {
        &self.ledger
    }

    pub fn len(&self) -> usize {
        self.reports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reports.is_empty()
    }

    pub fn high_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_high()).count()
    }

    pub fn low_count(&self) -> usize {
        self.len() - self.high_count()
    }

    /// Fraction of HIGH rows; 0 for an empty corpus.
    pub fn prevalence(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.high_count() as f64 / self.len() as f64
        }
    }

    /// A corpus with two or more rows must contain both classes to be usable
    /// for supervised training.
    pub fn is_degenerate(&self) -> bool {
        self.len() >= 2 && (self.high_count() == 0 || self.low_count() == 0)
    }

    /// Sub-corpus at the given row indices (provenance carried over).
    pub fn select(&self, indices: &[usize]) -> Corpus {
        let reports = indices.iter().map(|&i| self.reports[i].clone()).collect();
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Corpus {
            reports,
            labels,
            ledger: ExclusionLedger {
                source: self.ledger.source.clone(),
                total_rows: indices.len(),
                kept_rows: indices.len(),
                excluded: Vec::new(),
            },
        }
    }
}
