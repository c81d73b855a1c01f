//! Uniform train/predict surface over the nine model families.

use serde::{Deserialize, Serialize};

use crate::balance::{compute_class_weights, smote_resample, SmoteConfig};
use crate::config::{derive_seed, RunConfig};
use crate::corpus::{BugReport, SeverityClass};
use crate::error::{Error, Result};
use crate::features::{DesignMatrix, FeaturePipeline, SparseVector};
use crate::gbdt::{fit_gbdt, gbdt_predict, GbdtModel, GbdtPreset};
use crate::knn::{fit_knn, knn_predict, KnnModel};
use crate::linear::{
    fit_linear_svm, fit_logistic, fit_passive_aggressive, fit_sgd_logloss, linear_predict,
    Calibrator, LinearModel, Prediction,
};
use crate::naive_bayes::{fit_multinomial_nb, nb_predict, NaiveBayesModel};

/// The nine supported classifier kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Logreg,
    LinearSvm,
    PassiveAggressive,
    Sgd,
    GbdtExact,
    GbdtHistogram,
    GbdtOblivious,
    NaiveBayes,
    Knn,
}

impl ModelKind {
    pub const ALL: [ModelKind; 9] = [
        ModelKind::Logreg,
        ModelKind::LinearSvm,
        ModelKind::PassiveAggressive,
        ModelKind::Sgd,
        ModelKind::GbdtExact,
        ModelKind::GbdtHistogram,
        ModelKind::GbdtOblivious,
        ModelKind::NaiveBayes,
        ModelKind::Knn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Logreg => "logreg",
            ModelKind::LinearSvm => "linear-svm",
            ModelKind::PassiveAggressive => "passive-aggressive",
            ModelKind::Sgd => "sgd",
            ModelKind::GbdtExact => "gbdt-exact",
            ModelKind::GbdtHistogram => "gbdt-histogram",
            ModelKind::GbdtOblivious => "gbdt-oblivious",
            ModelKind::NaiveBayes => "naive-bayes",
            ModelKind::Knn => "knn",
        }
    }

    /// Human-readable label for report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            ModelKind::Logreg => "Logistic Regression",
            ModelKind::LinearSvm => "Linear SVM",
            ModelKind::PassiveAggressive => "Passive Aggressive",
            ModelKind::Sgd => "SGD",
            ModelKind::GbdtExact => "GBDT (exact)",
            ModelKind::GbdtHistogram => "GBDT (histogram)",
            ModelKind::GbdtOblivious => "GBDT (oblivious)",
            ModelKind::NaiveBayes => "Naive Bayes",
            ModelKind::Knn => "KNN",
        }
    }

    pub fn parse(name: &str) -> Option<ModelKind> {
        let normalized = name.trim().to_lowercase().replace('_', "-");
        match normalized.as_str() {
            "logreg" | "logistic" | "logistic-regression" => Some(ModelKind::Logreg),
            "linear-svm" | "svm" => Some(ModelKind::LinearSvm),
            "passive-aggressive" | "pa" => Some(ModelKind::PassiveAggressive),
            "sgd" | "sgd-log" => Some(ModelKind::Sgd),
            "gbdt-exact" | "xgboost" => Some(ModelKind::GbdtExact),
            "gbdt-histogram" | "lightgbm" => Some(ModelKind::GbdtHistogram),
            "gbdt-oblivious" | "catboost" => Some(ModelKind::GbdtOblivious),
            "naive-bayes" | "nb" => Some(ModelKind::NaiveBayes),
            "knn" => Some(ModelKind::Knn),
            _ => None,
        }
    }

    pub fn valid_names() -> Vec<&'static str> {
        Self::ALL.iter().map(|k| k.name()).collect()
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Fitted parameters of one classifier family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FittedClassifier {
    Linear {
        model: LinearModel,
        calibrator: Option<Calibrator>,
    },
    NaiveBayes(NaiveBayesModel),
    Knn(KnnModel),
    Gbdt(GbdtModel),
}

impl FittedClassifier {
    pub fn predict(&self, x: &SparseVector) -> Result<Prediction> {
        match self {
            FittedClassifier::Linear { model, calibrator } => {
                linear_predict(model, calibrator.as_ref(), x)
            }
            FittedClassifier::NaiveBayes(model) => {
                let probability = nb_predict(model, x)?;
                Ok(Prediction::from_probability(probability, probability))
            }
            FittedClassifier::Knn(model) => {
                let probability = knn_predict(model, x)?;
                Ok(Prediction::from_probability(probability, probability))
            }
            FittedClassifier::Gbdt(model) => {
                if x.dim() != model.dim {
                    return Err(Error::Predict(format!(
                        "input dimension {} does not match model dimension {}",
                        x.dim(),
                        model.dim
                    )));
                }
                let margin = model.margin(x);
                Ok(Prediction::from_probability(margin, gbdt_predict(model, x)))
            }
        }
    }
}

/// Fit one classifier family on an already-built design matrix.
/// Stochastic trainers take their seeds from `config` via fixed labels.
pub fn fit_classifier(
    kind: ModelKind,
    x: &DesignMatrix,
    y: &[SeverityClass],
    sample_weights: &[f64],
    config: &RunConfig,
) -> Result<FittedClassifier> {
    let params = &config.models;
    match kind {
        ModelKind::Logreg => {
            let model = fit_logistic(x, y, sample_weights, &params.logistic)?;
            Ok(FittedClassifier::Linear {
                model,
                calibrator: None,
            })
        }
        ModelKind::LinearSvm => {
            let mut svm = params.svm;
            svm.seed = derive_seed(config.seed, "fit/linear-svm");
            let (model, calibrator) = fit_linear_svm(x, y, sample_weights, &svm)?;
            Ok(FittedClassifier::Linear {
                model,
                calibrator: Some(calibrator),
            })
        }
        ModelKind::PassiveAggressive => {
            let mut pa = params.passive_aggressive;
            pa.seed = derive_seed(config.seed, "fit/passive-aggressive");
            let model = fit_passive_aggressive(x, y, sample_weights, &pa)?;
            Ok(FittedClassifier::Linear {
                model,
                calibrator: None,
            })
        }
        ModelKind::Sgd => {
            let mut sgd = params.sgd;
            sgd.seed = derive_seed(config.seed, "fit/sgd");
            let model = fit_sgd_logloss(x, y, sample_weights, &sgd)?;
            Ok(FittedClassifier::Linear {
                model,
                calibrator: None,
            })
        }
        ModelKind::GbdtExact | ModelKind::GbdtHistogram | ModelKind::GbdtOblivious => {
            let mut gbdt = params.gbdt;
            gbdt.preset = match kind {
                ModelKind::GbdtExact => GbdtPreset::ExactGreedy,
                ModelKind::GbdtHistogram => GbdtPreset::Histogram,
                _ => GbdtPreset::Oblivious,
            };
            gbdt.seed = derive_seed(config.seed, &format!("fit/{}", kind.name()));
            Ok(FittedClassifier::Gbdt(fit_gbdt(x, y, sample_weights, &gbdt)?))
        }
        ModelKind::NaiveBayes => Ok(FittedClassifier::NaiveBayes(fit_multinomial_nb(
            x,
            y,
            params.naive_bayes.alpha,
        )?)),
        ModelKind::Knn => Ok(FittedClassifier::Knn(fit_knn(x, y, params.knn.k)?)),
    }
}

/// A fitted model bundled with the feature pipeline that feeds it, enough
/// to score raw reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub kind: ModelKind,
    pub pipeline: FeaturePipeline,
    pub classifier: FittedClassifier,
    /// Configuration echo from training time.
    pub config: RunConfig,
}

impl TrainedModel {
    pub fn predict_row(&self, x: &SparseVector) -> Result<Prediction> {
        self.classifier.predict(x)
    }

    pub fn predict_report(&self, report: &BugReport) -> Result<Prediction> {
        let row = self.pipeline.transform_one(report)?;
        self.classifier.predict(&row)
    }
}

/// Full training path on raw reports: fit the feature pipeline, apply the
/// configured balancing, then fit the classifier.
///
/// SMOTE (when enabled) runs on the vectorized training rows only; class
/// weights (when enabled) are computed on the labels the learner actually
/// sees, i.e. after resampling.
pub fn train_model(
    kind: ModelKind,
    reports: &[BugReport],
    labels: &[SeverityClass],
    config: &RunConfig,
) -> Result<TrainedModel> {
    if reports.len() != labels.len() {
        return Err(Error::Fit(format!(
            "{} reports but {} labels",
            reports.len(),
            labels.len()
        )));
    }
    let policy = crate::corpus::SeverityPolicy::default();
    let pipeline = FeaturePipeline::fit(reports, &config.features, &policy)?;
    let matrix = pipeline.transform(reports)?;

    let (matrix, labels) = if config.balance.smote {
        let smote = SmoteConfig {
            k_neighbors: config.balance.smote_k_neighbors,
            target_ratio: config.balance.smote_target_ratio,
            seed: derive_seed(config.seed, &format!("smote/{}", kind.name())),
        };
        smote_resample(&matrix, labels, &smote)?
    } else {
        (matrix, labels.to_vec())
    };

    let sample_weights = if config.balance.class_weights {
        compute_class_weights(&labels)?.per_row(&labels)
    } else {
        vec![1.0; labels.len()]
    };

    let classifier = fit_classifier(kind, &matrix, &labels, &sample_weights, config)?;
    Ok(TrainedModel {
        kind,
        pipeline,
        classifier,
        config: config.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn names_round_trip_and_aliases_resolve() {
        for kind in ModelKind::ALL {
            assert_eq!(ModelKind::parse(kind.name()), Some(kind));
        }
        assert_eq!(ModelKind::parse("XGBoost"), Some(ModelKind::GbdtExact));
        assert_eq!(ModelKind::parse("lightgbm"), Some(ModelKind::GbdtHistogram));
        assert_eq!(ModelKind::parse("catboost"), Some(ModelKind::GbdtOblivious));
        assert_eq!(ModelKind::parse("distilbert"), None);
        assert_eq!(ModelKind::valid_names().len(), 9);
    }

    #[test]
    fn every_kind_trains_and_scores_raw_reports() {
        let corpus = synth::separable_corpus(40, 11);
        let config = RunConfig {
            features: crate::features::FeatureConfig {
                min_df: 1,
                ..Default::default()
            },
            models: crate::config::ModelParams {
                gbdt: crate::gbdt::GbdtConfig {
                    rounds: 20,
                    max_depth: 3,
                    ..Default::default()
                },
                ..Default::default()
            },
            ..RunConfig::default()
        };
        for kind in ModelKind::ALL {
            let model = train_model(kind, corpus.reports(), corpus.labels(), &config)
                .unwrap_or_else(|e| panic!("{kind} failed: {e}"));
            let prediction = model.predict_report(&corpus.reports()[0]).unwrap();
            assert!(
                (0.0..=1.0).contains(&prediction.probability),
                "{kind} probability out of range"
            );
        }
    }

    #[test]
    fn training_is_deterministic_for_a_fixed_seed() {
        let corpus = synth::imbalanced_corpus(120, 0.25, 0.9, 2);
        let config = RunConfig {
            features: crate::features::FeatureConfig {
                min_df: 1,
                ..Default::default()
            },
            ..RunConfig::default()
        };
        let a = train_model(ModelKind::Sgd, corpus.reports(), corpus.labels(), &config).unwrap();
        let b = train_model(ModelKind::Sgd, corpus.reports(), corpus.labels(), &config).unwrap();
        for report in corpus.reports().iter().take(20) {
            let pa = a.predict_report(report).unwrap();
            let pb = b.predict_report(report).unwrap();
            assert_eq!(pa.probability.to_bits(), pb.probability.to_bits());
        }
    }
}
