//! Deterministic stratified train/test splits and fold plans.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, SeverityClass};
use crate::error::{Error, Result};

/// Stratified fold assignment for cross-validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    /// Fold index per row, each in `0..k`.
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn fold_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f != fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

fn class_indices(labels: &[SeverityClass]) -> (Vec<usize>, Vec<usize>) {
    let mut high = Vec::new();
    let mut low = Vec::new();
    for (i, label) in labels.iter().enumerate() {
        if label.is_high() {
            high.push(i);
        } else {
            low.push(i);
        }
    }
    (high, low)
}

/// Per-class test counts by largest-remainder rounding.
///
/// Total test size is `round(n * fraction)`; floors are handed out first and
/// the leftover seats (at most two with two classes) go to the largest
/// fractional remainders, ties broken toward the majority class.
fn largest_remainder_counts(n_high: usize, n_low: usize, fraction: f64) -> (usize, usize) {
    let n = n_high + n_low;
    let total = ((n as f64) * fraction).round() as usize;
    let quota_high = n_high as f64 * fraction;
    let quota_low = n_low as f64 * fraction;
    let mut take_high = quota_high.floor() as usize;
    let mut take_low = quota_low.floor() as usize;
    let remaining = total.saturating_sub(take_high + take_low);

    let rem_high = quota_high - quota_high.floor();
    let rem_low = quota_low - quota_low.floor();
    let high_first = rem_high > rem_low || (rem_high == rem_low && n_high >= n_low);
    match remaining {
        0 => {}
        1 => {
            if high_first {
                take_high += 1;
            } else {
                take_low += 1;
            }
        }
        _ => {
            take_high += 1;
            take_low += 1;
        }
    }
    (take_high.min(n_high), take_low.min(n_low))
}

/// Split a corpus into train and test parts preserving class proportions.
///
/// Deterministic for a fixed `(corpus, test_fraction, seed)`; the two parts
/// partition the input rows exactly.
pub fn stratified_split(
    corpus: &Corpus,
    test_fraction: f64,
    seed: u64,
) -> Result<(Corpus, Corpus)> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::Config(format!(
            "test_fraction must lie in [0, 1), got {test_fraction}"
        )));
    }
    if corpus.is_degenerate() {
        return Err(Error::DegenerateLabels(
            "corpus does not contain both classes".to_string(),
        ));
    }

    let (mut high, mut low) = class_indices(corpus.labels());
    let (take_high, take_low) = largest_remainder_counts(high.len(), low.len(), test_fraction);

    if test_fraction > 0.0 {
        let train_high = high.len() - take_high;
        let train_low = low.len() - take_low;
        if take_high == 0 || take_low == 0 || train_high == 0 || train_low == 0 {
            return Err(Error::DegenerateSplit(format!(
                "fraction {test_fraction} leaves a side without both classes \
                 (test {take_high}H/{take_low}L, train {train_high}H/{train_low}L)"
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    high.shuffle(&mut rng);
    low.shuffle(&mut rng);

    let mut test_idx: Vec<usize> = high[..take_high]
        .iter()
        .chain(low[..take_low].iter())
        .copied()
        .collect();
    let mut train_idx: Vec<usize> = high[take_high..]
        .iter()
        .chain(low[take_low..].iter())
        .copied()
        .collect();
    test_idx.sort_unstable();
    train_idx.sort_unstable();

    Ok((corpus.select(&train_idx), corpus.select(&test_idx)))
}

/// Build a stratified `k`-fold plan over the labels.
///
/// Fold sizes differ by at most one row and each fold's HIGH count stays
/// within one of its proportional share.
pub fn make_folds(labels: &[SeverityClass], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::Config(format!("fold count must be >= 2, got {k}")));
    }
    let (high, low) = class_indices(labels);
    for (name, class) in [("HIGH", &high), ("LOW", &low)] {
        if class.len() < k {
            return Err(Error::Stratification(format!(
                "class {name} has {} members, fewer than k={k}",
                class.len()
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = vec![0usize; labels.len()];
    let mut fold_loads = vec![0usize; k];

    // Larger class first so the smaller class can still even the loads out.
    let mut classes = [high, low];
    classes.sort_by_key(|c| std::cmp::Reverse(c.len()));

    for class in classes.iter_mut() {
        class.shuffle(&mut rng);
        let base = class.len() / k;
        let extras = class.len() % k;

        // The extra rows go to the lightest folds, lowest index first.
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&f| (fold_loads[f], f));
        let mut counts = vec![base; k];
        for &f in order.iter().take(extras) {
            counts[f] += 1;
        }

        let mut cursor = 0;
        for (fold, &count) in counts.iter().enumerate() {
            for &row in &class[cursor..cursor + count] {
                assignments[row] = fold;
            }
            fold_loads[fold] += count;
            cursor += count;
        }
    }

    Ok(FoldPlan {
        k,
        assignments,
        seed,
    })
}
