//! Gradient-boosted decision trees with logistic loss.
//!
//! One engine, three presets: `ExactGreedy` scans every distinct feature
//! value, `Histogram` scans root-level quantile bins, and `Oblivious` grows
//! level-synchronous trees whose depths share a single split.

mod split;
mod tree;

pub use split::{leaf_weight, split_gain, HistogramBins, SplitCandidate};
pub use tree::{RegressionTree, TreeNode};

use serde::{Deserialize, Serialize};

use crate::corpus::SeverityClass;
use crate::error::{Error, Result};
use crate::features::{DesignMatrix, SparseVector};
use crate::linear::sigmoid;
use split::{
    best_split_exact, best_split_histogram, gather_node_stats, NodeView, SplitWorkspace,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GbdtPreset {
    ExactGreedy,
    Histogram,
    Oblivious,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbdtConfig {
    pub preset: GbdtPreset,
    pub rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    /// L2 leaf regularization.
    pub lambda: f64,
    /// Flat penalty subtracted from every split gain.
    pub gamma: f64,
    /// Minimum hessian mass per child.
    pub min_child_weight: f64,
    /// Histogram and oblivious presets only.
    pub max_bins: usize,
    pub seed: u64,
}

impl Default for GbdtConfig {
    fn default() -> Self {
        Self {
            preset: GbdtPreset::ExactGreedy,
            rounds: 200,
            learning_rate: 0.1,
            max_depth: 6,
            lambda: 1.0,
            gamma: 0.0,
            min_child_weight: 1.0,
            max_bins: 256,
            seed: 0,
        }
    }
}

impl GbdtConfig {
    fn validate(&self) -> Result<()> {
        if self.learning_rate < 0.0 {
            return Err(Error::Config("learning_rate must be >= 0".into()));
        }
        if self.max_bins < 2 {
            return Err(Error::Config("max_bins must be >= 2".into()));
        }
        if self.lambda < 0.0 || self.gamma < 0.0 || self.min_child_weight < 0.0 {
            return Err(Error::Config(
                "lambda, gamma, and min_child_weight must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Additive model over regression trees:
/// `margin(x) = base_score + learning_rate * sum(tree(x))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtModel {
    pub base_score: f64,
    pub trees: Vec<RegressionTree>,
    pub config: GbdtConfig,
    pub dim: usize,
    /// Weighted training log-loss after each round; entry 0 is the
    /// prior-only loss.
    pub training_loss: Vec<f64>,
}

impl GbdtModel {
    pub fn margin(&self, x: &SparseVector) -> f64 {
        self.base_score
            + self.config.learning_rate * self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }
}

/// Gradient and hessian of the weighted logistic loss at one margin:
/// `g = w * (sigmoid(margin) - y)`, `h = w * p * (1 - p)`.
pub fn logloss_grad_hess(y: f64, margin: f64, sample_weight: f64) -> (f64, f64) {
    let p = sigmoid(margin);
    (sample_weight * (p - y), sample_weight * p * (1.0 - p))
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn weighted_logloss(y: &[SeverityClass], margins: &[f64], sample_weights: &[f64]) -> f64 {
    let total: f64 = sample_weights.iter().sum();
    y.iter()
        .zip(margins)
        .zip(sample_weights)
        .map(|((label, &z), &w)| w * (softplus(z) - label.as_f64() * z))
        .sum::<f64>()
        / total
}

fn partition_rows(
    x: &DesignMatrix,
    rows: &[usize],
    feature: usize,
    threshold: f64,
) -> (Vec<usize>, Vec<usize>) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for &row in rows {
        if x.row(row).get(feature) < threshold {
            left.push(row);
        } else {
            right.push(row);
        }
    }
    (left, right)
}

/// Depth-wise growth shared by the exact and histogram presets. The
/// workspace carries the per-feature gather buffers across nodes and
/// rounds.
fn grow_depthwise(
    x: &DesignMatrix,
    grad: &[f64],
    hess: &[f64],
    config: &GbdtConfig,
    bins: Option<&HistogramBins>,
    workspace: &mut SplitWorkspace,
) -> Result<RegressionTree> {
    struct Pending {
        node: usize,
        rows: Vec<usize>,
        depth: usize,
    }

    let mut nodes = vec![TreeNode::Leaf { weight: 0.0 }];
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(Pending {
        node: 0,
        rows: (0..x.n_rows()).collect(),
        depth: 0,
    });

    while let Some(pending) = queue.pop_front() {
        workspace.gather(x, &pending.rows, grad, hess);
        let splittable = pending.depth < config.max_depth
            && pending.rows.len() >= 2
            && workspace.hess_sum() >= 2.0 * config.min_child_weight;
        let candidate = if splittable {
            match bins {
                Some(bins) => best_split_histogram(
                    workspace,
                    bins,
                    config.lambda,
                    config.gamma,
                    config.min_child_weight,
                ),
                None => best_split_exact(
                    workspace,
                    config.lambda,
                    config.gamma,
                    config.min_child_weight,
                ),
            }
        } else {
            None
        };

        match candidate {
            Some(split) => {
                let (left_rows, right_rows) =
                    partition_rows(x, &pending.rows, split.feature, split.threshold);
                let left = nodes.len();
                let right = nodes.len() + 1;
                nodes.push(TreeNode::Leaf { weight: 0.0 });
                nodes.push(TreeNode::Leaf { weight: 0.0 });
                nodes[pending.node] = TreeNode::Branch {
                    feature: split.feature,
                    threshold: split.threshold,
                    left,
                    right,
                };
                queue.push_back(Pending {
                    node: left,
                    rows: left_rows,
                    depth: pending.depth + 1,
                });
                queue.push_back(Pending {
                    node: right,
                    rows: right_rows,
                    depth: pending.depth + 1,
                });
            }
            None => {
                nodes[pending.node] = TreeNode::Leaf {
                    weight: leaf_weight(
                        workspace.grad_sum(),
                        workspace.hess_sum(),
                        config.lambda,
                    )?,
                };
            }
        }
    }

    Ok(RegressionTree {
        nodes,
        oblivious: false,
    })
}

/// Level-synchronous growth: every node at a depth splits on one shared
/// (feature, threshold) chosen to maximize the summed gain. Children that
/// would fall below `min_child_weight` contribute no gain for that node
/// but still exist structurally; empty leaves weigh zero.
fn grow_oblivious(
    x: &DesignMatrix,
    grad: &[f64],
    hess: &[f64],
    config: &GbdtConfig,
    bins: &HistogramBins,
) -> Result<RegressionTree> {
    struct Level {
        node: usize,
        rows: Vec<usize>,
    }

    let mut nodes = vec![TreeNode::Leaf { weight: 0.0 }];
    let mut level = vec![Level {
        node: 0,
        rows: (0..x.n_rows()).collect(),
    }];

    for _ in 0..config.max_depth {
        let stats: Vec<_> = level
            .iter()
            .map(|l| gather_node_stats(x, &l.rows, grad, hess))
            .collect();

        // Shared candidate maximizing total gain across the level.
        let mut features: Vec<usize> = stats
            .iter()
            .flat_map(|s| s.touched().iter().copied())
            .collect();
        features.sort_unstable();
        features.dedup();

        let mut best: Option<(f64, usize, f64)> = None;
        for feature in features {
            let bounds = &bins.boundaries[feature];
            if bounds.is_empty() {
                continue;
            }
            let histograms: Vec<_> = stats
                .iter()
                .map(|s| bins.node_histogram(s, feature))
                .collect();
            let mut left_accumulators = vec![(0.0f64, 0.0f64); stats.len()];
            for (b, &threshold) in bounds.iter().enumerate() {
                let mut total_gain = 0.0;
                for (i, stat) in stats.iter().enumerate() {
                    left_accumulators[i].0 += histograms[i].0[b];
                    left_accumulators[i].1 += histograms[i].1[b];
                    let (grad_left, hess_left) = left_accumulators[i];
                    let grad_right = stat.grad_sum() - grad_left;
                    let hess_right = stat.hess_sum() - hess_left;
                    if hess_left < config.min_child_weight
                        || hess_right < config.min_child_weight
                    {
                        continue;
                    }
                    total_gain += split_gain(
                        grad_left,
                        hess_left,
                        grad_right,
                        hess_right,
                        config.lambda,
                        0.0,
                    );
                }
                total_gain -= config.gamma;
                let improves = match best {
                    None => total_gain > 0.0,
                    Some((gain, _, _)) => total_gain > gain,
                };
                if improves {
                    best = Some((total_gain, feature, threshold));
                }
            }
        }

        let (_, feature, threshold) = match best {
            Some(found) => found,
            None => break,
        };

        let mut next_level = Vec::with_capacity(level.len() * 2);
        for entry in level {
            let (left_rows, right_rows) = partition_rows(x, &entry.rows, feature, threshold);
            let left = nodes.len();
            let right = nodes.len() + 1;
            nodes.push(TreeNode::Leaf { weight: 0.0 });
            nodes.push(TreeNode::Leaf { weight: 0.0 });
            nodes[entry.node] = TreeNode::Branch {
                feature,
                threshold,
                left,
                right,
            };
            next_level.push(Level {
                node: left,
                rows: left_rows,
            });
            next_level.push(Level {
                node: right,
                rows: right_rows,
            });
        }
        level = next_level;
    }

    for entry in &level {
        let grad_sum: f64 = entry.rows.iter().map(|&r| grad[r]).sum();
        let hess_sum: f64 = entry.rows.iter().map(|&r| hess[r]).sum();
        nodes[entry.node] = TreeNode::Leaf {
            weight: leaf_weight(grad_sum, hess_sum, config.lambda)?,
        };
    }

    Ok(RegressionTree {
        nodes,
        oblivious: true,
    })
}

/// Fit a boosted ensemble. The base score is the weighted prior log-odds;
/// each round fits one tree to the current gradients and hessians.
/// Fully deterministic: no subsampling is performed.
pub fn fit_gbdt(
    x: &DesignMatrix,
    y: &[SeverityClass],
    sample_weights: &[f64],
    config: &GbdtConfig,
) -> Result<GbdtModel> {
    config.validate()?;
    if x.n_rows() == 0 || x.n_rows() != y.len() || y.len() != sample_weights.len() {
        return Err(Error::Fit(format!(
            "mismatched fit inputs: {} rows, {} labels, {} weights",
            x.n_rows(),
            y.len(),
            sample_weights.len()
        )));
    }
    let total_weight: f64 = sample_weights.iter().sum();
    let positive_weight: f64 = y
        .iter()
        .zip(sample_weights)
        .filter(|(label, _)| label.is_high())
        .map(|(_, &w)| w)
        .sum();
    if positive_weight == 0.0 || positive_weight == total_weight {
        return Err(Error::DegenerateLabels(
            "boosting needs both classes present".to_string(),
        ));
    }
    let prior = positive_weight / total_weight;
    let base_score = (prior / (1.0 - prior)).ln();

    let bins = match config.preset {
        GbdtPreset::ExactGreedy => None,
        GbdtPreset::Histogram | GbdtPreset::Oblivious => {
            Some(HistogramBins::from_root(x, config.max_bins))
        }
    };

    let n = x.n_rows();
    let mut margins = vec![base_score; n];
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    let mut workspace = SplitWorkspace::new(x.dim());
    let mut trees = Vec::with_capacity(config.rounds);
    let mut training_loss = Vec::with_capacity(config.rounds + 1);
    training_loss.push(weighted_logloss(y, &margins, sample_weights));

    for _ in 0..config.rounds {
        for i in 0..n {
            let (g, h) = logloss_grad_hess(y[i].as_f64(), margins[i], sample_weights[i]);
            grad[i] = g;
            hess[i] = h;
        }
        let tree = match config.preset {
            GbdtPreset::ExactGreedy => {
                grow_depthwise(x, &grad, &hess, config, None, &mut workspace)?
            }
            GbdtPreset::Histogram => {
                grow_depthwise(x, &grad, &hess, config, bins.as_ref(), &mut workspace)?
            }
            GbdtPreset::Oblivious => {
                grow_oblivious(x, &grad, &hess, config, bins.as_ref().unwrap())?
            }
        };
        for (margin, row) in margins.iter_mut().zip(x.rows()) {
            *margin += config.learning_rate * tree.predict(row);
        }
        trees.push(tree);
        training_loss.push(weighted_logloss(y, &margins, sample_weights));
    }

    Ok(GbdtModel {
        base_score,
        trees,
        config: *config,
        dim: x.dim(),
        training_loss,
    })
}

/// Probability of HIGH for one row.
pub fn gbdt_predict(model: &GbdtModel, x: &SparseVector) -> f64 {
    sigmoid(model.margin(x))
}
