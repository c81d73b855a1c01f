//! Regression-tree arena shared by all boosting presets.

use serde::{Deserialize, Serialize};

use crate::features::SparseVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Branch {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        weight: f64,
    },
}

/// Binary regression tree; the root is node 0. Rows route left when the
/// feature value is strictly below the threshold, so absent (zero) sparse
/// features fall left whenever thresholds are positive, as they are for
/// TF-IDF and one-hot blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<TreeNode>,
    /// All branches at one depth share a single (feature, threshold).
    pub oblivious: bool,
}

impl RegressionTree {
    pub fn leaf(weight: f64) -> Self {
        Self {
            nodes: vec![TreeNode::Leaf { weight }],
            oblivious: false,
        }
    }

    pub fn predict(&self, x: &SparseVector) -> f64 {
        let mut index = 0usize;
        loop {
            match &self.nodes[index] {
                TreeNode::Branch {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    index = if x.get(*feature) < *threshold {
                        *left
                    } else {
                        *right
                    };
                }
                TreeNode::Leaf { weight } => return *weight,
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }

    /// Depth of every node, indexed like `nodes`.
    fn node_depths(&self) -> Vec<usize> {
        let mut depths = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if let TreeNode::Branch { left, right, .. } = node {
                depths[*left] = depths[i] + 1;
                depths[*right] = depths[i] + 1;
            }
        }
        depths
    }

    pub fn depth(&self) -> usize {
        self.node_depths().into_iter().max().unwrap_or(0)
    }

    /// Distinct (feature, threshold) pairs used by branches at each depth.
    /// An oblivious tree has exactly one pair per populated level.
    pub fn splits_per_level(&self) -> Vec<Vec<(usize, f64)>> {
        let depths = self.node_depths();
        let max_depth = self.depth();
        let mut levels: Vec<Vec<(usize, f64)>> = vec![Vec::new(); max_depth + 1];
        for (i, node) in self.nodes.iter().enumerate() {
            if let TreeNode::Branch {
                feature, threshold, ..
            } = node
            {
                let level = &mut levels[depths[i]];
                if !level
                    .iter()
                    .any(|&(f, t)| f == *feature && t == *threshold)
                {
                    level.push((*feature, *threshold));
                }
            }
        }
        levels.retain(|level| !level.is_empty());
        levels
    }
}
