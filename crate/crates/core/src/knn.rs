//! K-nearest-neighbors classifier with cosine distance, the standard choice
//! for L2-normalized text rows.

use serde::{Deserialize, Serialize};

use crate::corpus::SeverityClass;
use crate::error::{Error, Result};
use crate::features::{DesignMatrix, SparseVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    rows: DesignMatrix,
    labels: Vec<SeverityClass>,
    /// Precomputed row norms.
    norms: Vec<f64>,
    pub k: usize,
}

/// `1 - cos(a, b)`; zero vectors sit at distance 1 from everything.
pub fn cosine_distance(a: &SparseVector, norm_a: f64, b: &SparseVector, norm_b: f64) -> f64 {
    if norm_a == 0.0 || norm_b == 0.0 {
        return 1.0;
    }
    1.0 - a.dot(b) / (norm_a * norm_b)
}

/// Store the training rows. `k` is clamped to the number of rows so the
/// model invariant `1 <= k <= n_rows` always holds.
pub fn fit_knn(x: &DesignMatrix, y: &[SeverityClass], k: usize) -> Result<KnnModel> {
    if x.n_rows() == 0 {
        return Err(Error::Fit("knn needs at least one stored row".into()));
    }
    if x.n_rows() != y.len() {
        return Err(Error::Fit(format!(
            "mismatched fit inputs: {} rows, {} labels",
            x.n_rows(),
            y.len()
        )));
    }
    if k == 0 {
        return Err(Error::Config("knn k must be >= 1".into()));
    }
    let norms = x.rows().iter().map(SparseVector::norm).collect();
    Ok(KnnModel {
        rows: x.clone(),
        labels: y.to_vec(),
        norms,
        k: k.min(x.n_rows()),
    })
}

/// HIGH fraction among the `k` nearest stored rows; distance ties break
/// toward the lower row index.
pub fn knn_predict(model: &KnnModel, x: &SparseVector) -> Result<f64> {
    if model.rows.n_rows() == 0 {
        return Err(Error::Predict("knn model stores no rows".into()));
    }
    if x.dim() != model.rows.dim() {
        return Err(Error::Predict(format!(
            "input dimension {} does not match model dimension {}",
            x.dim(),
            model.rows.dim()
        )));
    }
    let norm_x = x.norm();
    let mut distances: Vec<(f64, usize)> = model
        .rows
        .rows()
        .iter()
        .zip(&model.norms)
        .enumerate()
        .map(|(i, (row, &norm))| (cosine_distance(x, norm_x, row, norm), i))
        .collect();
    distances.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let votes = distances
        .iter()
        .take(model.k)
        .filter(|&&(_, i)| model.labels[i].is_high())
        .count();
    Ok(votes as f64 / model.k as f64)
}
