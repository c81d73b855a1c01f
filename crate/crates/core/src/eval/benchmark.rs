//! The all-models benchmark: one shared split and fold plan, nine models,
//! JSON and Markdown reports.

use serde::{Deserialize, Serialize};

use crate::config::{derive_seed, RunConfig};
use crate::corpus::{stratified_split, Corpus};
use crate::error::{Error, Result};
use crate::eval::harness::{cross_validate, evaluate_model, learning_curve};
use crate::eval::{CvResult, LearningCurve, MetricsReport};
use crate::model::{train_model, ModelKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub source: String,
    pub rows: usize,
    pub high: usize,
    pub low: usize,
    pub prevalence: f64,
}

/// Everything measured for one model. A failed model keeps its row with
/// the error recorded instead of results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelOutcome {
    pub model: String,
    pub display_name: String,
    pub error: Option<String>,
    pub holdout: Option<MetricsReport>,
    pub cv: Option<CvResult>,
    pub learning_curve: Option<LearningCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub seed: u64,
    pub corpus: CorpusSummary,
    pub config: RunConfig,
    /// Ranked by held-out accuracy, best first; failed models last.
    pub models: Vec<ModelOutcome>,
}

impl BenchmarkReport {
    pub fn has_failures(&self) -> bool {
        self.models.iter().any(|m| m.error.is_some())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Metric-by-model table: one column per model in ranked order.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str("| Metric |");
        for model in &self.models {
            out.push_str(&format!(" {} |", model.display_name));
        }
        out.push('\n');
        out.push_str("|---|");
        for _ in &self.models {
            out.push_str("---|");
        }
        out.push('\n');

        fn format_cell(outcome: &ModelOutcome, metric: &str) -> String {
            let report = match &outcome.holdout {
                Some(report) => report,
                None => return "failed".to_string(),
            };
            match metric {
                "Accuracy" => format!("{:.2}%", report.accuracy * 100.0),
                "Precision" => format!("{:.3}", report.precision),
                "Recall" => format!("{:.3}", report.recall),
                "F1 Score" => format!("{:.3}", report.f1),
                _ => report
                    .auc
                    .map(|a| format!("{a:.3}"))
                    .unwrap_or_else(|| "-".into()),
            }
        }
        for metric in ["Accuracy", "Precision", "Recall", "F1 Score", "AUC"] {
            out.push_str(&format!("| {metric} |"));
            for model in &self.models {
                out.push_str(&format!(" {} |", format_cell(model, metric)));
            }
            out.push('\n');
        }
        out
    }
}

/// Run every model under one shared 80/20 split and fold plan. Individual
/// model failures are recorded in their rows without aborting the run.
pub fn benchmark(corpus: &Corpus, config: &RunConfig) -> Result<BenchmarkReport> {
    if corpus.is_degenerate() || corpus.len() < 2 {
        return Err(Error::DegenerateLabels(
            "benchmark needs a corpus with both classes".into(),
        ));
    }
    let split_seed = derive_seed(config.seed, "split");
    let (train, test) = stratified_split(corpus, config.test_fraction, split_seed)?;

    let mut outcomes = Vec::with_capacity(ModelKind::ALL.len());
    for kind in ModelKind::ALL {
        let result = run_one(kind, &train, &test, corpus, config);
        outcomes.push(match result {
            Ok(outcome) => outcome,
            Err(e) => ModelOutcome {
                model: kind.name().to_string(),
                display_name: kind.display_name().to_string(),
                error: Some(e.to_string()),
                holdout: None,
                cv: None,
                learning_curve: None,
            },
        });
    }

    // Rank by held-out accuracy, best first; failures sink to the bottom.
    outcomes.sort_by(|a, b| {
        let acc = |m: &ModelOutcome| m.holdout.as_ref().map(|h| h.accuracy);
        acc(b)
            .partial_cmp(&acc(a))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    Ok(BenchmarkReport {
        seed: config.seed,
        corpus: CorpusSummary {
            source: corpus.ledger().source.clone(),
            rows: corpus.len(),
            high: corpus.high_count(),
            low: corpus.low_count(),
            prevalence: corpus.prevalence(),
        },
        config: config.clone(),
        models: outcomes,
    })
}

fn run_one(
    kind: ModelKind,
    train: &Corpus,
    test: &Corpus,
    corpus: &Corpus,
    config: &RunConfig,
) -> Result<ModelOutcome> {
    let mut train_config = config.clone();
    train_config.seed = derive_seed(config.seed, &format!("benchmark/{}", kind.name()));
    let model = train_model(kind, train.reports(), train.labels(), &train_config)?;
    let holdout = evaluate_model(&model, test.reports(), test.labels())?;
    let cv = cross_validate(corpus, config, kind)?;
    let curve = learning_curve(
        train,
        test,
        config,
        kind,
        &config.learning_curve_fractions,
    )?;
    Ok(ModelOutcome {
        model: kind.name().to_string(),
        display_name: kind.display_name().to_string(),
        error: None,
        holdout: Some(holdout),
        cv: Some(cv),
        learning_curve: Some(curve),
    })
}
