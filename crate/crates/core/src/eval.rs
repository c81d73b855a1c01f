//! Evaluation: confusion matrices, the four headline metrics, AUC,
//! cross-validation, learning curves, and the all-models benchmark.
//! HIGH is the positive class throughout.

mod benchmark;
mod harness;

pub use benchmark::{benchmark, BenchmarkReport, CorpusSummary, ModelOutcome};
pub use harness::{
    cross_validate, evaluate_model, learning_curve, CurvePoint, CvResult, LearningCurve,
    MetricSummary,
};

use serde::{Deserialize, Serialize};

use crate::corpus::SeverityClass;
use crate::error::{Error, Result};

/// Four-cell confusion matrix with HIGH as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }
}

/// Headline metrics plus flags for the division-by-zero cases, which are
/// reported as 0 so result tables stay rectangular.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Filled by evaluation paths that have scores; `metrics` leaves it
    /// empty.
    pub auc: Option<f64>,
    pub precision_undefined: bool,
    pub recall_undefined: bool,
    pub confusion: ConfusionMatrix,
}

/// Count the four cells from parallel label/prediction lists.
pub fn confusion(
    labels: &[SeverityClass],
    predictions: &[SeverityClass],
) -> Result<ConfusionMatrix> {
    if labels.is_empty() || labels.len() != predictions.len() {
        return Err(Error::Eval(format!(
            "confusion needs equal non-empty lists, got {} labels and {} predictions",
            labels.len(),
            predictions.len()
        )));
    }
    let mut cm = ConfusionMatrix::default();
    for (&label, &prediction) in labels.iter().zip(predictions) {
        match (label.is_high(), prediction.is_high()) {
            (true, true) => cm.true_pos += 1,
            (false, true) => cm.false_pos += 1,
            (false, false) => cm.true_neg += 1,
            (true, false) => cm.false_neg += 1,
        }
    }
    Ok(cm)
}

/// Accuracy, precision, recall, and F1 from the four cells.
pub fn metrics(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Eval("empty confusion matrix".into()));
    }
    let tp = cm.true_pos as f64;
    let predicted_pos = cm.true_pos + cm.false_pos;
    let actual_pos = cm.true_pos + cm.false_neg;

    let accuracy = (cm.true_pos + cm.true_neg) as f64 / total as f64;
    let precision_undefined = predicted_pos == 0;
    let recall_undefined = actual_pos == 0;
    let precision = if precision_undefined {
        0.0
    } else {
        tp / predicted_pos as f64
    };
    let recall = if recall_undefined {
        0.0
    } else {
        tp / actual_pos as f64
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };

    Ok(MetricsReport {
        accuracy,
        precision,
        recall,
        f1,
        auc: None,
        precision_undefined,
        recall_undefined,
        confusion: *cm,
    })
}

/// Mann-Whitney AUC: the fraction of (HIGH, LOW) pairs where the HIGH row
/// scores strictly higher, ties counting one half. Computed by rank sums,
/// which matches pairwise enumeration exactly.
pub fn roc_auc(labels: &[SeverityClass], scores: &[f64]) -> Result<f64> {
    if labels.len() != scores.len() {
        return Err(Error::Eval(format!(
            "{} labels vs {} scores",
            labels.len(),
            scores.len()
        )));
    }
    let n_pos = labels.iter().filter(|l| l.is_high()).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Eval(
            "AUC undefined: both classes must be present".into(),
        ));
    }

    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Average ranks over tied score groups, 1-based.
    let mut rank_sum_pos = 0.0f64;
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && scores[order[end + 1]] == scores[order[start]] {
            end += 1;
        }
        let average_rank = (start + 1 + end + 1) as f64 / 2.0;
        for &i in &order[start..=end] {
            if labels[i].is_high() {
                rank_sum_pos += average_rank;
            }
        }
        start = end + 1;
    }

    let numerator = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(numerator / (n_pos as f64 * n_neg as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SeverityClass::{High, Low};

    #[test]
    fn perfect_prediction_fills_the_diagonal() {
        let cm = confusion(&[High, Low], &[High, Low]).unwrap();
        assert_eq!(cm.true_pos, 1);
        assert_eq!(cm.true_neg, 1);
        assert_eq!(cm.false_pos, 0);
        assert_eq!(cm.false_neg, 0);
    }

    #[test]
    fn all_low_predictor_has_zero_recall() {
        let labels: Vec<_> = (0..1000)
            .map(|i| if i < 128 { High } else { Low })
            .collect();
        let predictions = vec![Low; 1000];
        let cm = confusion(&labels, &predictions).unwrap();
        assert_eq!(cm.true_pos, 0);
        let report = metrics(&cm).unwrap();
        assert_eq!(report.recall, 0.0);
        assert!(report.precision_undefined);
        assert!(!report.recall_undefined);
    }

    #[test]
    fn cells_partition_the_rows() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let n = rng.gen_range(1..60);
            let labels: Vec<_> = (0..n)
                .map(|_| if rng.gen_bool(0.3) { High } else { Low })
                .collect();
            let predictions: Vec<_> = (0..n)
                .map(|_| if rng.gen_bool(0.5) { High } else { Low })
                .collect();
            let cm = confusion(&labels, &predictions).unwrap();
            assert_eq!(cm.total(), n);
        }
    }

    #[test]
    fn reference_precision_recall_pair_gives_f1() {
        // Harmonic mean of 0.440 and 0.627 lands on 0.517.
        let f1: f64 = 2.0 * 0.440 * 0.627 / (0.440 + 0.627);
        assert!((f1 - 0.517).abs() < 0.0005);
    }

    #[test]
    fn metric_formulas_by_hand() {
        let cm = ConfusionMatrix {
            true_pos: 50,
            false_neg: 10,
            false_pos: 5,
            true_neg: 935,
        };
        let report = metrics(&cm).unwrap();
        assert!((report.accuracy - 0.985).abs() < 1e-12);
        assert!((report.precision - 0.909).abs() < 5e-4);
        assert!((report.recall - 0.833).abs() < 5e-4);
        assert!((report.f1 - 0.870).abs() < 5e-4);
        assert!(!report.precision_undefined);
    }

    #[test]
    fn undefined_precision_is_flagged_zero() {
        let cm = ConfusionMatrix {
            true_pos: 0,
            false_pos: 0,
            true_neg: 5,
            false_neg: 5,
        };
        let report = metrics(&cm).unwrap();
        assert_eq!(report.precision, 0.0);
        assert!(report.precision_undefined);
        assert_eq!(report.f1, 0.0);
    }

    #[test]
    fn undefined_recall_is_flagged_zero() {
        // No HIGH rows at all in the evaluated set.
        let cm = ConfusionMatrix {
            true_pos: 0,
            false_pos: 3,
            true_neg: 7,
            false_neg: 0,
        };
        let report = metrics(&cm).unwrap();
        assert_eq!(report.recall, 0.0);
        assert!(report.recall_undefined);
        assert!(!report.precision_undefined);
    }

    #[test]
    fn metrics_match_brute_force_on_random_instances() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let n = rng.gen_range(1..50);
            let labels: Vec<_> = (0..n)
                .map(|_| if rng.gen_bool(0.4) { High } else { Low })
                .collect();
            let predictions: Vec<_> = (0..n)
                .map(|_| if rng.gen_bool(0.5) { High } else { Low })
                .collect();
            let report = metrics(&confusion(&labels, &predictions).unwrap()).unwrap();

            // Brute force straight from the pair lists.
            let correct = labels
                .iter()
                .zip(&predictions)
                .filter(|(a, b)| a == b)
                .count();
            assert_eq!(report.accuracy, correct as f64 / n as f64);
            let tp = labels
                .iter()
                .zip(&predictions)
                .filter(|(l, p)| l.is_high() && p.is_high())
                .count();
            let pred_pos = predictions.iter().filter(|p| p.is_high()).count();
            let act_pos = labels.iter().filter(|l| l.is_high()).count();
            if pred_pos > 0 {
                assert_eq!(report.precision, tp as f64 / pred_pos as f64);
            }
            if act_pos > 0 {
                assert_eq!(report.recall, tp as f64 / act_pos as f64);
            }
        }
    }

    #[test]
    fn auc_perfect_separation_is_one() {
        let labels = [High, High, Low, Low];
        let scores = [0.9, 0.8, 0.1, 0.2];
        assert_eq!(roc_auc(&labels, &scores).unwrap(), 1.0);
    }

    #[test]
    fn auc_all_ties_is_half() {
        let labels = [High, Low, High, Low];
        let scores = [0.5; 4];
        assert_eq!(roc_auc(&labels, &scores).unwrap(), 0.5);
    }

    #[test]
    fn auc_mixed_case_by_hand() {
        // Pairs: (0.8 vs 0.5) win, (0.8 vs 0.1) win, (0.3 vs 0.5) loss,
        // (0.3 vs 0.1) win -> 3/4.
        let labels = [High, High, Low, Low];
        let scores = [0.8, 0.3, 0.5, 0.1];
        assert_eq!(roc_auc(&labels, &scores).unwrap(), 0.75);
    }

    #[test]
    fn auc_single_class_errors() {
        assert!(roc_auc(&[High, High], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn auc_matches_pair_enumeration_exactly() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let n = rng.gen_range(2..200);
            let labels: Vec<_> = (0..n)
                .map(|_| if rng.gen_bool(0.35) { High } else { Low })
                .collect();
            if labels.iter().all(|l| l.is_high()) || labels.iter().all(|l| !l.is_high()) {
                continue;
            }
            // Coarse scores force plenty of ties.
            let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0..12) as f64 / 4.0).collect();

            let got = roc_auc(&labels, &scores).unwrap();

            let mut wins = 0u64;
            let mut ties = 0u64;
            let mut pairs = 0u64;
            for (i, li) in labels.iter().enumerate() {
                if !li.is_high() {
                    continue;
                }
                for (j, lj) in labels.iter().enumerate() {
                    if lj.is_high() {
                        continue;
                    }
                    pairs += 1;
                    if scores[i] > scores[j] {
                        wins += 1;
                    } else if scores[i] == scores[j] {
                        ties += 1;
                    }
                }
            }
            let expected = (wins as f64 + 0.5 * ties as f64) / pairs as f64;
            assert_eq!(got, expected, "rank-sum and pair enumeration disagree");
        }
    }
}
