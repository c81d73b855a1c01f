//! Cross-validation and learning curves.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{derive_seed, RunConfig};
use crate::corpus::{make_folds, Corpus, SeverityClass};
use crate::error::{Error, Result};
use crate::eval::{confusion, metrics, roc_auc, MetricsReport};
use crate::model::{train_model, ModelKind, TrainedModel};

/// Score a trained model on labelled reports: headline metrics plus AUC
/// over the predicted probabilities.
pub fn evaluate_model(
    model: &TrainedModel,
    reports: &[crate::corpus::BugReport],
    labels: &[SeverityClass],
) -> Result<MetricsReport> {
    let mut predictions = Vec::with_capacity(reports.len());
    let mut probabilities = Vec::with_capacity(reports.len());
    for report in reports {
        let prediction = model.predict_report(report)?;
        predictions.push(prediction.class);
        probabilities.push(prediction.probability);
    }
    let mut report = metrics(&confusion(labels, &predictions)?)?;
    report.auc = Some(roc_auc(labels, &probabilities)?);
    Ok(report)
}

/// Mean or deviation of each metric across folds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc: f64,
}

impl MetricSummary {
    fn from_reports(reports: &[MetricsReport]) -> (MetricSummary, MetricSummary) {
        let n = reports.len() as f64;
        let pick = |f: &dyn Fn(&MetricsReport) -> f64| -> (f64, f64) {
            let values: Vec<f64> = reports.iter().map(f).collect();
            let mean = values.iter().sum::<f64>() / n;
            let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            (mean, variance.sqrt())
        };
        let (acc_m, acc_s) = pick(&|r| r.accuracy);
        let (pre_m, pre_s) = pick(&|r| r.precision);
        let (rec_m, rec_s) = pick(&|r| r.recall);
        let (f1_m, f1_s) = pick(&|r| r.f1);
        let (auc_m, auc_s) = pick(&|r| r.auc.unwrap_or(0.0));
        (
            MetricSummary {
                accuracy: acc_m,
                precision: pre_m,
                recall: rec_m,
                f1: f1_m,
                auc: auc_m,
            },
            MetricSummary {
                accuracy: acc_s,
                precision: pre_s,
                recall: rec_s,
                f1: f1_s,
                auc: auc_s,
            },
        )
    }
}

/// Stratified k-fold result: per-fold metrics with mean and population
/// standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub k: usize,
    pub fold_seed: u64,
    pub per_fold: Vec<MetricsReport>,
    pub mean: MetricSummary,
    pub std_dev: MetricSummary,
}

/// Stratified k-fold cross-validation. Each fold fits the entire pipeline
/// (features, balancing, classifier) on the other folds only, so nothing
/// fitted ever sees held-out rows.
///
/// The fold plan depends only on the run seed, so every model evaluated
/// under one config shares the same partition.
pub fn cross_validate(corpus: &Corpus, config: &RunConfig, kind: ModelKind) -> Result<CvResult> {
    let k = config.folds;
    let fold_seed = derive_seed(config.seed, "folds");
    let plan = make_folds(corpus.labels(), k, fold_seed)?;

    let mut per_fold = Vec::with_capacity(k);
    for fold in 0..k {
        let train_idx = plan.train_indices(fold);
        let test_idx = plan.fold_indices(fold);
        let train = corpus.select(&train_idx);
        let test = corpus.select(&test_idx);

        let mut fold_config = config.clone();
        fold_config.seed = derive_seed(config.seed, &format!("cv/{}/fold{fold}", kind.name()));
        let model = train_model(kind, train.reports(), train.labels(), &fold_config)
            .map_err(|e| Error::Eval(format!("fold {fold}: {e}")))?;
        let report = evaluate_model(&model, test.reports(), test.labels())
            .map_err(|e| Error::Eval(format!("fold {fold}: {e}")))?;
        per_fold.push(report);
    }

    let (mean, std_dev) = MetricSummary::from_reports(&per_fold);
    Ok(CvResult {
        k,
        fold_seed,
        per_fold,
        mean,
        std_dev,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub fraction: f64,
    pub train_accuracy: f64,
    pub validation_accuracy: f64,
}

/// Training-size sweep: train vs validation accuracy per fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub points: Vec<CurvePoint>,
    /// Fractions skipped because a class would have had zero rows.
    pub skipped: Vec<f64>,
}

/// Sweep nested stratified subsets of the training split and record
/// accuracy on the subset and on the fixed validation split.
///
/// Subsets are per-class prefixes of one seeded shuffle, so the subset at
/// a smaller fraction is contained in every larger one.
pub fn learning_curve(
    train: &Corpus,
    validation: &Corpus,
    config: &RunConfig,
    kind: ModelKind,
    fractions: &[f64],
) -> Result<LearningCurve> {
    for pair in fractions.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::Config(
                "learning-curve fractions must be strictly increasing".into(),
            ));
        }
    }
    if fractions.iter().any(|f| !(*f > 0.0 && *f <= 1.0)) {
        return Err(Error::Config(
            "learning-curve fractions must lie in (0, 1]".into(),
        ));
    }

    let mut high_idx: Vec<usize> = Vec::new();
    let mut low_idx: Vec<usize> = Vec::new();
    for (i, label) in train.labels().iter().enumerate() {
        if label.is_high() {
            high_idx.push(i);
        } else {
            low_idx.push(i);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
        config.seed,
        &format!("curve/{}", kind.name()),
    ));
    high_idx.shuffle(&mut rng);
    low_idx.shuffle(&mut rng);

    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for &fraction in fractions {
        let take_high = (fraction * high_idx.len() as f64).round() as usize;
        let take_low = (fraction * low_idx.len() as f64).round() as usize;
        if take_high == 0 || take_low == 0 {
            skipped.push(fraction);
            continue;
        }
        let mut subset: Vec<usize> = high_idx[..take_high]
            .iter()
            .chain(low_idx[..take_low].iter())
            .copied()
            .collect();
        subset.sort_unstable();
        let sub_corpus = train.select(&subset);

        let mut point_config = config.clone();
        point_config.seed = derive_seed(config.seed, &format!("curve/{}/{fraction}", kind.name()));
        let model = train_model(kind, sub_corpus.reports(), sub_corpus.labels(), &point_config)?;
        let train_report = evaluate_model(&model, sub_corpus.reports(), sub_corpus.labels())?;
        let validation_report = evaluate_model(&model, validation.reports(), validation.labels())?;
        points.push(CurvePoint {
            fraction,
            train_accuracy: train_report.accuracy,
            validation_accuracy: validation_report.accuracy,
        });
    }

    Ok(LearningCurve { points, skipped })
}
