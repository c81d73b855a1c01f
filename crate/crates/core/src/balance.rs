//! Class-imbalance correction: balanced class weights and SMOTE
//! oversampling. Both operate on training rows only.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::SeverityClass;
use crate::error::{Error, Result};
use crate::features::{DesignMatrix, SparseVector};

/// Balanced per-class loss weights: `w_c = N / (2 * n_c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassWeights {
    pub high: f64,
    pub low: f64,
}

impl ClassWeights {
    pub fn uniform() -> Self {
        Self {
            high: 1.0,
            low: 1.0,
        }
    }

    pub fn weight_for(&self, label: SeverityClass) -> f64 {
        match label {
            SeverityClass::High => self.high,
            SeverityClass::Low => self.low,
        }
    }

    /// Expand to one weight per row.
    pub fn per_row(&self, labels: &[SeverityClass]) -> Vec<f64> {
        labels.iter().map(|&l| self.weight_for(l)).collect()
    }
}

/// Balanced scheme: the weighted mass of each class equals N/2.
pub fn compute_class_weights(labels: &[SeverityClass]) -> Result<ClassWeights> {
    let n = labels.len();
    let n_high = labels.iter().filter(|l| l.is_high()).count();
    let n_low = n - n_high;
    if n_high == 0 || n_low == 0 {
        return Err(Error::DegenerateLabels(
            "class weights need both classes present".to_string(),
        ));
    }
    Ok(ClassWeights {
        high: n as f64 / (2.0 * n_high as f64),
        low: n as f64 / (2.0 * n_low as f64),
    })
}

/// SMOTE parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmoteConfig {
    pub k_neighbors: usize,
    /// Desired minority/majority ratio after resampling, in (0, 1].
    pub target_ratio: f64,
    pub seed: u64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        Self {
            k_neighbors: 5,
            target_ratio: 1.0,
            seed: 0,
        }
    }
}

impl SmoteConfig {
    fn validate(&self) -> Result<()> {
        if self.k_neighbors < 1 {
            return Err(Error::Config("SMOTE k_neighbors must be >= 1".into()));
        }
        if !(self.target_ratio > 0.0 && self.target_ratio <= 1.0) {
            return Err(Error::Config(format!(
                "SMOTE target_ratio must lie in (0, 1], got {}",
                self.target_ratio
            )));
        }
        Ok(())
    }
}

/// `k` nearest minority neighbors per minority row by Euclidean distance,
/// ties broken by lower row index, self excluded. Brute force: minority
/// counts stay small.
fn nearest_neighbors(rows: &[&SparseVector], k: usize) -> Vec<Vec<usize>> {
    let mut neighbors = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let mut dists: Vec<(f64, usize)> = rows
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(j, other)| (row.squared_distance(other), j))
            .collect();
        dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        neighbors.push(dists.iter().take(k).map(|&(_, j)| j).collect());
    }
    neighbors
}

/// Oversample the minority class with synthetic rows interpolated between
/// minority nearest-neighbor pairs.
///
/// Original rows are preserved first and in order; synthetic rows follow,
/// all carrying the minority label. After resampling the minority count is
/// `floor(target_ratio * n_majority)` (never below the original count).
/// `k_neighbors` is clamped to `n_minority - 1` when necessary.
pub fn smote_resample(
    rows: &DesignMatrix,
    labels: &[SeverityClass],
    config: &SmoteConfig,
) -> Result<(DesignMatrix, Vec<SeverityClass>)> {
    config.validate()?;
    if rows.n_rows() != labels.len() {
        return Err(Error::Resample(format!(
            "{} rows but {} labels",
            rows.n_rows(),
            labels.len()
        )));
    }

    let n_high = labels.iter().filter(|l| l.is_high()).count();
    let n_low = labels.len() - n_high;
    let minority_label = if n_high <= n_low {
        SeverityClass::High
    } else {
        SeverityClass::Low
    };
    let (n_minority, n_majority) = if minority_label.is_high() {
        (n_high, n_low)
    } else {
        (n_low, n_high)
    };

    if n_minority < 2 {
        return Err(Error::Resample(format!(
            "minority class has {n_minority} rows; need at least 2"
        )));
    }

    let target_minority = (config.target_ratio * n_majority as f64).floor() as usize;
    let n_synthetic = target_minority.saturating_sub(n_minority);

    let mut out_labels = labels.to_vec();
    if n_synthetic == 0 {
        return Ok((rows.clone(), out_labels));
    }

    let minority_rows: Vec<&SparseVector> = labels
        .iter()
        .zip(rows.rows())
        .filter(|(l, _)| **l == minority_label)
        .map(|(_, r)| r)
        .collect();

    let k = config.k_neighbors.min(n_minority - 1);
    let neighbors = nearest_neighbors(&minority_rows, k);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut synthetic = Vec::with_capacity(n_synthetic);
    for _ in 0..n_synthetic {
        let base = rng.gen_range(0..minority_rows.len());
        let neighbor = neighbors[base][rng.gen_range(0..neighbors[base].len())];
        let gap: f64 = rng.gen();
        synthetic.push(minority_rows[base].interpolate(minority_rows[neighbor], gap));
        out_labels.push(minority_label);
    }

    Ok((rows.with_extra_rows(synthetic)?, out_labels))
}
