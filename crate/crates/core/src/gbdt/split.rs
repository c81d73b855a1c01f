//! Split search: second-order gain, exact greedy enumeration, and
//! histogram bins quantized from the root distribution.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::features::DesignMatrix;

/// Optimal leaf weight `-G / (H + lambda)` for summed gradients G and
/// hessians H.
pub fn leaf_weight(grad_sum: f64, hess_sum: f64, lambda: f64) -> Result<f64> {
    let denom = hess_sum + lambda;
    if denom <= 0.0 {
        return Err(Error::Fit(format!(
            "degenerate leaf: hessian mass {hess_sum} + lambda {lambda} is not positive"
        )));
    }
    Ok(-grad_sum / denom)
}

/// Gain of splitting (G, H) into left/right halves, minus the split
/// penalty `gamma`. Splits are accepted only when the gain is positive.
pub fn split_gain(
    grad_left: f64,
    hess_left: f64,
    grad_right: f64,
    hess_right: f64,
    lambda: f64,
    gamma: f64,
) -> f64 {
    let score = |g: f64, h: f64| g * g / (h + lambda);
    0.5 * (score(grad_left, hess_left) + score(grad_right, hess_right)
        - score(grad_left + grad_right, hess_left + hess_right))
        - gamma
}

/// Winning split for one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
    pub grad_left: f64,
    pub hess_left: f64,
}

/// Read access to one node's gathered per-feature (value, grad, hess)
/// lists. Touched features come back in ascending order, so candidate
/// scans are deterministic and ties resolve to the lowest
/// (feature, threshold) pair.
pub(crate) trait NodeView {
    fn grad_sum(&self) -> f64;
    fn hess_sum(&self) -> f64;
    fn n_rows(&self) -> usize;
    fn touched(&self) -> &[usize];
    /// Nonzero (value, grad, hess) triples of one feature, unsorted.
    fn list(&self, feature: usize) -> &[(f64, f64, f64)];
}

/// Owned gather result; used where several nodes must stay alive at once
/// (the oblivious level scan) and by tests.
pub(crate) struct NodeStats {
    grad_sum: f64,
    hess_sum: f64,
    n_rows: usize,
    touched: Vec<usize>,
    per_feature: HashMap<usize, Vec<(f64, f64, f64)>>,
}

impl NodeView for NodeStats {
    fn grad_sum(&self) -> f64 {
        self.grad_sum
    }
    fn hess_sum(&self) -> f64 {
        self.hess_sum
    }
    fn n_rows(&self) -> usize {
        self.n_rows
    }
    fn touched(&self) -> &[usize] {
        &self.touched
    }
    fn list(&self, feature: usize) -> &[(f64, f64, f64)] {
        self.per_feature
            .get(&feature)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

pub(crate) fn gather_node_stats(
    x: &DesignMatrix,
    rows: &[usize],
    grad: &[f64],
    hess: &[f64],
) -> NodeStats {
    let mut per_feature: HashMap<usize, Vec<(f64, f64, f64)>> = HashMap::new();
    let mut grad_sum = 0.0;
    let mut hess_sum = 0.0;
    for &row in rows {
        grad_sum += grad[row];
        hess_sum += hess[row];
        for &(feature, value) in x.row(row).entries() {
            per_feature
                .entry(feature)
                .or_default()
                .push((value, grad[row], hess[row]));
        }
    }
    let mut touched: Vec<usize> = per_feature.keys().copied().collect();
    touched.sort_unstable();
    NodeStats {
        grad_sum,
        hess_sum,
        n_rows: rows.len(),
        touched,
        per_feature,
    }
}

/// Reusable gather buffers for the depth-wise growers: one flat list per
/// feature, cleared between nodes so a whole boosting run allocates the
/// column index once.
pub(crate) struct SplitWorkspace {
    lists: Vec<Vec<(f64, f64, f64)>>,
    touched: Vec<usize>,
    grad_sum: f64,
    hess_sum: f64,
    n_rows: usize,
}

impl SplitWorkspace {
    pub fn new(dim: usize) -> Self {
        Self {
            lists: vec![Vec::new(); dim],
            touched: Vec::new(),
            grad_sum: 0.0,
            hess_sum: 0.0,
            n_rows: 0,
        }
    }

    /// Fill the buffers for one node, replacing the previous node's data.
    pub fn gather(&mut self, x: &DesignMatrix, rows: &[usize], grad: &[f64], hess: &[f64]) {
        for &feature in &self.touched {
            self.lists[feature].clear();
        }
        self.touched.clear();
        self.grad_sum = 0.0;
        self.hess_sum = 0.0;
        self.n_rows = rows.len();
        for &row in rows {
            self.grad_sum += grad[row];
            self.hess_sum += hess[row];
            for &(feature, value) in x.row(row).entries() {
                if self.lists[feature].is_empty() {
                    self.touched.push(feature);
                }
                self.lists[feature].push((value, grad[row], hess[row]));
            }
        }
        self.touched.sort_unstable();
    }
}

impl NodeView for SplitWorkspace {
    fn grad_sum(&self) -> f64 {
        self.grad_sum
    }
    fn hess_sum(&self) -> f64 {
        self.hess_sum
    }
    fn n_rows(&self) -> usize {
        self.n_rows
    }
    fn touched(&self) -> &[usize] {
        &self.touched
    }
    fn list(&self, feature: usize) -> &[(f64, f64, f64)] {
        &self.lists[feature]
    }
}

/// Sorted (value, grad_sum, hess_sum) groups for one feature, including the
/// zero group when any node row lacks the feature.
fn value_groups<V: NodeView>(view: &V, feature: usize) -> Vec<(f64, f64, f64)> {
    let nonzero = view.list(feature);
    let mut sorted: Vec<(f64, f64, f64)> = nonzero.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

    let n_zero = view.n_rows() - nonzero.len();
    let zero_grad = view.grad_sum() - nonzero.iter().map(|t| t.1).sum::<f64>();
    let zero_hess = view.hess_sum() - nonzero.iter().map(|t| t.2).sum::<f64>();

    let mut groups: Vec<(f64, f64, f64)> = Vec::new();
    let mut zero_inserted = n_zero == 0;
    for (value, g, h) in sorted {
        if !zero_inserted && value > 0.0 {
            groups.push((0.0, zero_grad, zero_hess));
            zero_inserted = true;
        }
        match groups.last_mut() {
            Some(last) if last.0 == value => {
                last.1 += g;
                last.2 += h;
            }
            _ => groups.push((value, g, h)),
        }
    }
    if !zero_inserted {
        groups.push((0.0, zero_grad, zero_hess));
    }
    groups
}

fn better(candidate: &SplitCandidate, best: &Option<SplitCandidate>) -> bool {
    match best {
        None => true,
        // Strict improvement only: scanning ascending (feature, threshold)
        // makes ties resolve to the lowest pair.
        Some(b) => candidate.gain > b.gain,
    }
}

/// Exact greedy search: scan midpoints between consecutive distinct values
/// of every feature the node touches.
pub(crate) fn best_split_exact<V: NodeView>(
    view: &V,
    lambda: f64,
    gamma: f64,
    min_child_weight: f64,
) -> Option<SplitCandidate> {
    let mut best: Option<SplitCandidate> = None;
    for &feature in view.touched() {
        let groups = value_groups(view, feature);
        let mut grad_left = 0.0;
        let mut hess_left = 0.0;
        for window in 0..groups.len().saturating_sub(1) {
            grad_left += groups[window].1;
            hess_left += groups[window].2;
            let grad_right = view.grad_sum() - grad_left;
            let hess_right = view.hess_sum() - hess_left;
            if hess_left < min_child_weight || hess_right < min_child_weight {
                continue;
            }
            let gain = split_gain(grad_left, hess_left, grad_right, hess_right, lambda, gamma);
            if gain <= 0.0 {
                continue;
            }
            let candidate = SplitCandidate {
                feature,
                threshold: (groups[window].0 + groups[window + 1].0) / 2.0,
                gain,
                grad_left,
                hess_left,
            };
            if better(&candidate, &best) {
                best = Some(candidate);
            }
        }
    }
    best
}

/// Per-feature candidate thresholds quantized once at the root.
#[derive(Debug, Clone)]
pub struct HistogramBins {
    /// `boundaries[feature]` is ascending; bin `b` holds values in
    /// `[boundaries[b-1], boundaries[b])`.
    pub boundaries: Vec<Vec<f64>>,
}

impl HistogramBins {
    /// Equal-frequency boundaries from the full training distribution
    /// (zeros included), at most `max_bins` bins per feature.
    pub fn from_root(x: &DesignMatrix, max_bins: usize) -> Self {
        let n = x.n_rows();
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); x.dim()];
        for row in x.rows() {
            for &(feature, value) in row.entries() {
                columns[feature].push(value);
            }
        }
        let boundaries = columns
            .into_iter()
            .map(|mut nonzero| {
                nonzero.sort_by(f64::total_cmp);
                let n_zero = n - nonzero.len();
                let negatives = nonzero.iter().take_while(|v| **v < 0.0).count();
                // Virtual sorted column with the zero block in place.
                let value_at = |i: usize| -> f64 {
                    if i < negatives {
                        nonzero[i]
                    } else if i < negatives + n_zero {
                        0.0
                    } else {
                        nonzero[i - n_zero]
                    }
                };
                let mut bounds = Vec::new();
                for b in 1..max_bins {
                    let pos = b * n / max_bins;
                    if pos == 0 || pos >= n {
                        continue;
                    }
                    let prev = value_at(pos - 1);
                    let here = value_at(pos);
                    if here > prev {
                        bounds.push((prev + here) / 2.0);
                    }
                }
                bounds.dedup();
                bounds
            })
            .collect();
        Self { boundaries }
    }

    fn bin(&self, feature: usize, value: f64) -> usize {
        self.boundaries[feature].partition_point(|&t| t <= value)
    }

    /// Per-bin (grad, hess) histogram for one feature over the node rows.
    pub(crate) fn node_histogram<V: NodeView>(
        &self,
        view: &V,
        feature: usize,
    ) -> (Vec<f64>, Vec<f64>) {
        let n_bins = self.boundaries[feature].len() + 1;
        let mut grad_hist = vec![0.0; n_bins];
        let mut hess_hist = vec![0.0; n_bins];
        let nonzero = view.list(feature);
        let mut zero_grad = view.grad_sum();
        let mut zero_hess = view.hess_sum();
        for &(value, g, h) in nonzero {
            let b = self.bin(feature, value);
            grad_hist[b] += g;
            hess_hist[b] += h;
            zero_grad -= g;
            zero_hess -= h;
        }
        if view.n_rows() > nonzero.len() {
            let b = self.bin(feature, 0.0);
            grad_hist[b] += zero_grad;
            hess_hist[b] += zero_hess;
        }
        (grad_hist, hess_hist)
    }
}

/// Histogram search: scan the root-level bin boundaries of every feature
/// the node touches.
pub(crate) fn best_split_histogram<V: NodeView>(
    view: &V,
    bins: &HistogramBins,
    lambda: f64,
    gamma: f64,
    min_child_weight: f64,
) -> Option<SplitCandidate> {
    let mut best: Option<SplitCandidate> = None;
    for &feature in view.touched() {
        let bounds = &bins.boundaries[feature];
        if bounds.is_empty() {
            continue;
        }
        let (grad_hist, hess_hist) = bins.node_histogram(view, feature);
        let mut grad_left = 0.0;
        let mut hess_left = 0.0;
        for (b, &threshold) in bounds.iter().enumerate() {
            grad_left += grad_hist[b];
            hess_left += hess_hist[b];
            let grad_right = view.grad_sum() - grad_left;
            let hess_right = view.hess_sum() - hess_left;
            if hess_left < min_child_weight || hess_right < min_child_weight {
                continue;
            }
            let gain = split_gain(grad_left, hess_left, grad_right, hess_right, lambda, gamma);
            if gain <= 0.0 {
                continue;
            }
            let candidate = SplitCandidate {
                feature,
                threshold,
                gain,
                grad_left,
                hess_left,
            };
            if better(&candidate, &best) {
                best = Some(candidate);
            }
        }
    }
    best
}
