//! One-hot encoding for categorical metadata and standardization for
//! optional numeric columns. Imputation statistics come from training rows
//! only.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::features::SparseVector;

/// Fitted categorical column: known categories plus a reserved UNKNOWN slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoricalColumn {
    pub name: String,
    /// Category -> slot index; the UNKNOWN slot sits after all categories.
    categories: BTreeMap<String, usize>,
    /// Most frequent training value, used to impute missing cells.
    /// None when every training cell was missing.
    mode: Option<String>,
}

impl CategoricalColumn {
    /// Fit from training values; ties on the mode break toward the
    /// lexicographically smaller category.
    pub fn fit(name: &str, values: &[Option<&str>]) -> Self {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for value in values.iter().flatten() {
            *counts.entry(value).or_insert(0) += 1;
        }
        let mode = counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(v, _)| v.to_string());
        let categories = counts
            .keys()
            .enumerate()
            .map(|(i, v)| (v.to_string(), i))
            .collect();
        Self {
            name: name.to_string(),
            categories,
            mode,
        }
    }

    /// Width of this column's one-hot block (categories + UNKNOWN).
    pub fn width(&self) -> usize {
        self.categories.len() + 1
    }

    fn unknown_slot(&self) -> usize {
        self.categories.len()
    }

    pub fn mode(&self) -> Option<&str> {
        self.mode.as_deref()
    }

    /// Slot for a value: missing cells impute the mode, unseen categories
    /// land in the UNKNOWN slot. Exactly one slot is ever hot.
    pub fn encode(&self, value: Option<&str>) -> usize {
        let value = match value {
            Some(v) => v,
            None => match &self.mode {
                Some(mode) => mode.as_str(),
                None => return self.unknown_slot(),
            },
        };
        self.categories
            .get(value)
            .copied()
            .unwrap_or_else(|| self.unknown_slot())
    }
}

/// Fitted numeric column: impute with the training mean of observed values,
/// then standardize against the imputed training column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericColumn {
    pub name: String,
    impute_value: f64,
    mean: f64,
    /// Population standard deviation; zero-deviation columns encode to 0.
    std_dev: f64,
}

impl NumericColumn {
    pub fn fit(name: &str, values: &[Option<f64>]) -> Self {
        let observed: Vec<f64> = values.iter().flatten().copied().collect();
        let impute_value = if observed.is_empty() {
            0.0
        } else {
            observed.iter().sum::<f64>() / observed.len() as f64
        };
        let imputed: Vec<f64> = values
            .iter()
            .map(|v| v.unwrap_or(impute_value))
            .collect();
        let n = imputed.len().max(1) as f64;
        let mean = imputed.iter().sum::<f64>() / n;
        let variance = imputed.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Self {
            name: name.to_string(),
            impute_value,
            mean,
            std_dev: variance.sqrt(),
        }
    }

    pub fn encode(&self, value: Option<f64>) -> f64 {
        let value = value.unwrap_or(self.impute_value);
        if self.std_dev == 0.0 {
            0.0
        } else {
            (value - self.mean) / self.std_dev
        }
    }
}

/// Encoder over a fixed set of categorical and numeric columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetadataEncoder {
    categorical: Vec<CategoricalColumn>,
    numeric: Vec<NumericColumn>,
}

impl MetadataEncoder {
    pub fn new(categorical: Vec<CategoricalColumn>, numeric: Vec<NumericColumn>) -> Self {
        Self {
            categorical,
            numeric,
        }
    }

    pub fn dimension(&self) -> usize {
        self.categorical.iter().map(|c| c.width()).sum::<usize>() + self.numeric.len()
    }

    pub fn categorical(&self) -> &[CategoricalColumn] {
        &self.categorical
    }

    /// Encode one row of raw values. `categorical_values` and
    /// `numeric_values` must match the fitted column order.
    pub fn encode(
        &self,
        categorical_values: &[Option<&str>],
        numeric_values: &[Option<f64>],
    ) -> SparseVector {
        debug_assert_eq!(categorical_values.len(), self.categorical.len());
        debug_assert_eq!(numeric_values.len(), self.numeric.len());
        let mut pairs = Vec::with_capacity(self.categorical.len() + self.numeric.len());
        let mut offset = 0usize;
        for (column, value) in self.categorical.iter().zip(categorical_values) {
            pairs.push((offset + column.encode(*value), 1.0));
            offset += column.width();
        }
        for (column, value) in self.numeric.iter().zip(numeric_values) {
            let encoded = column.encode(*value);
            if encoded != 0.0 {
                pairs.push((offset, encoded));
            }
            offset += 1;
        }
        SparseVector::from_pairs(self.dimension(), pairs)
    }
}
