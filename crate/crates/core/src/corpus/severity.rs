//! Raw severity label to binary HIGH/LOW mapping.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::SeverityClass;
use crate::error::{Error, Result};

/// Outcome of mapping one raw severity label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MappedSeverity {
    High,
    Low,
    /// Not a defect severity (e.g. enhancement requests); row is dropped
    /// into the exclusion ledger.
    Excluded,
}

/// Case-insensitive raw-label -> {HIGH, LOW, EXCLUDED} table.
///
/// The default table sends blocker/critical/major to HIGH, the
/// normal/minor/trivial tail to LOW, and excludes enhancement requests.
/// It is a configuration knob, not ground truth for any particular tracker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeverityPolicy {
    /// Keys are stored lower-cased.
    map: BTreeMap<String, MappedSeverity>,
}

impl Default for SeverityPolicy {
    fn default() -> Self {
        let mut map = BTreeMap::new();
        for label in ["blocker", "critical", "major"] {
            map.insert(label.to_string(), MappedSeverity::High);
        }
        for label in ["normal", "minor", "trivial"] {
            map.insert(label.to_string(), MappedSeverity::Low);
        }
        map.insert("enhancement".to_string(), MappedSeverity::Excluded);
        Self { map }
    }
}

impl SeverityPolicy {
    pub fn new(entries: impl IntoIterator<Item = (String, MappedSeverity)>) -> Self {
        let map = entries
            .into_iter()
            .map(|(k, v)| (k.to_lowercase(), v))
            .collect();
        Self { map }
    }

    pub fn lookup(&self, raw: &str) -> Option<MappedSeverity> {
        self.map.get(raw.trim().to_lowercase().as_str()).copied()
    }
}

/// Map one raw label through the policy.
///
/// `Ok(Some(class))` for mapped rows, `Ok(None)` for configured exclusions,
/// and an error for labels the policy does not cover at all.
pub fn map_severity(raw: &str, policy: &SeverityPolicy) -> Result<Option<SeverityClass>> {
    match policy.lookup(raw) {
        Some(MappedSeverity::High) => Ok(Some(SeverityClass::High)),
        Some(MappedSeverity::Low) => Ok(Some(SeverityClass::Low)),
        Some(MappedSeverity::Excluded) => Ok(None),
        None => Err(Error::UnmappedSeverity {
            label: raw.to_string(),
        }),
    }
}
