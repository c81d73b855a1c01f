//! End-to-end feature pipeline: raw reports in, design matrix out.

use serde::{Deserialize, Serialize};

use crate::corpus::{BugReport, SeverityPolicy};
use crate::error::Result;
use crate::features::{
    extract_ngrams, preprocess_text, CategoricalColumn, DesignMatrix, MetadataEncoder,
    SparseVector, TfidfModel,
};

/// Feature-construction knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub min_df: usize,
    /// Off by default: priority labels are assigned during triage and may
    /// leak the outcome being predicted.
    pub use_priority: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            ngram_min: 1,
            ngram_max: 2,
            min_df: 2,
            use_priority: false,
        }
    }
}

/// Fitted pipeline: TF-IDF over description n-grams plus one-hot bug type
/// (and optionally priority). Immutable once fitted; transforms are pure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturePipeline {
    config: FeatureConfig,
    tfidf: TfidfModel,
    metadata: MetadataEncoder,
    /// Policy the training labels were derived with, kept for provenance.
    severity_policy: SeverityPolicy,
}

impl FeaturePipeline {
    /// Fit on training reports only.
    pub fn fit(
        reports: &[BugReport],
        config: &FeatureConfig,
        severity_policy: &SeverityPolicy,
    ) -> Result<Self> {
        let docs = reports
            .iter()
            .map(|r| Self::ngrams_for(config, &r.short_description))
            .collect::<Result<Vec<_>>>()?;
        let tfidf = TfidfModel::fit(&docs, (config.ngram_min, config.ngram_max), config.min_df)?;

        let bug_types: Vec<Option<&str>> =
            reports.iter().map(|r| r.bug_type.as_deref()).collect();
        let mut categorical = vec![CategoricalColumn::fit("bug_type", &bug_types)];
        if config.use_priority {
            let priorities: Vec<Option<&str>> =
                reports.iter().map(|r| r.priority_label.as_deref()).collect();
            categorical.push(CategoricalColumn::fit("priority_label", &priorities));
        }
        let metadata = MetadataEncoder::new(categorical, vec![]);

        Ok(Self {
            config: config.clone(),
            tfidf,
            metadata,
            severity_policy: severity_policy.clone(),
        })
    }

    fn ngrams_for(config: &FeatureConfig, text: &str) -> Result<Vec<String>> {
        let tokens = preprocess_text(text);
        extract_ngrams(&tokens, (config.ngram_min, config.ngram_max))
    }

    fn metadata_values<'a>(&self, report: &'a BugReport) -> Vec<Option<&'a str>> {
        let mut values = vec![report.bug_type.as_deref()];
        if self.config.use_priority {
            values.push(report.priority_label.as_deref());
        }
        values
    }

    /// Transform one report into a full-width sparse row.
    pub fn transform_one(&self, report: &BugReport) -> Result<SparseVector> {
        let doc = Self::ngrams_for(&self.config, &report.short_description)?;
        let text = self.tfidf.transform(&doc);
        let meta = self.metadata.encode(&self.metadata_values(report), &[]);
        let dim = self.dimension();
        let mut pairs: Vec<(usize, f64)> =
            text.entries().to_vec();
        let offset = self.tfidf.dimension();
        pairs.extend(meta.entries().iter().map(|&(i, w)| (offset + i, w)));
        Ok(SparseVector::from_pairs(dim, pairs))
    }

    /// Transform a batch of reports, recording the text/meta block layout.
    pub fn transform(&self, reports: &[BugReport]) -> Result<DesignMatrix> {
        let mut text_rows = Vec::with_capacity(reports.len());
        let mut meta_rows = Vec::with_capacity(reports.len());
        for report in reports {
            let doc = Self::ngrams_for(&self.config, &report.short_description)?;
            text_rows.push(self.tfidf.transform(&doc));
            meta_rows.push(self.metadata.encode(&self.metadata_values(report), &[]));
        }
        DesignMatrix::assemble(&[("text", &text_rows), ("meta", &meta_rows)])
    }

    pub fn dimension(&self) -> usize {
        self.tfidf.dimension() + self.metadata.dimension()
    }

    pub fn tfidf(&self) -> &TfidfModel {
        &self.tfidf
    }

    pub fn metadata(&self) -> &MetadataEncoder {
        &self.metadata
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.config
    }

    pub fn severity_policy(&self) -> &SeverityPolicy {
        &self.severity_policy
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn fit_default(corpus: &crate::corpus::Corpus) -> FeaturePipeline {
        FeaturePipeline::fit(
            corpus.reports(),
            &FeatureConfig {
                min_df: 1,
                ..FeatureConfig::default()
            },
            &SeverityPolicy::default(),
        )
        .unwrap()
    }

    #[test]
    fn transform_matches_transform_one() {
        let corpus = synth::random_corpus(30, 10, 1);
        let pipeline = fit_default(&corpus);
        let matrix = pipeline.transform(corpus.reports()).unwrap();
        for (i, report) in corpus.reports().iter().enumerate() {
            assert_eq!(matrix.row(i), &pipeline.transform_one(report).unwrap());
        }
    }

    #[test]
    fn layout_splits_text_and_meta_blocks() {
        let corpus = synth::random_corpus(20, 5, 2);
        let pipeline = fit_default(&corpus);
        let matrix = pipeline.transform(corpus.reports()).unwrap();
        let text = matrix.span("text").unwrap();
        let meta = matrix.span("meta").unwrap();
        assert_eq!(text.offset, 0);
        assert_eq!(text.width, pipeline.tfidf().dimension());
        assert_eq!(meta.offset, text.width);
        assert_eq!(text.width + meta.width, matrix.dim());
    }

    #[test]
    fn text_block_of_in_vocabulary_rows_is_unit_norm() {
        let corpus = synth::random_corpus(40, 10, 3);
        let pipeline = fit_default(&corpus);
        let matrix = pipeline.transform(corpus.reports()).unwrap();
        let text_width = pipeline.tfidf().dimension();
        for row in matrix.rows() {
            let text_norm: f64 = row
                .entries()
                .iter()
                .filter(|(i, _)| *i < text_width)
                .map(|(_, w)| w * w)
                .sum::<f64>()
                .sqrt();
            if text_norm > 0.0 {
                assert!((text_norm - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn transforming_unseen_reports_never_grows_the_vocabulary() {
        let train = synth::separable_corpus(30, 4);
        let test = synth::separable_corpus(30, 99);
        let pipeline = fit_default(&train);
        let vocab_before = pipeline.tfidf().vocabulary().clone();
        let _ = pipeline.transform(test.reports()).unwrap();
        assert_eq!(pipeline.tfidf().vocabulary(), &vocab_before);
        // Rows stay inside the fitted dimension.
        let matrix = pipeline.transform(test.reports()).unwrap();
        assert_eq!(matrix.dim(), pipeline.dimension());
    }

    #[test]
    fn empty_description_still_gets_metadata_features() {
        let corpus = synth::random_corpus(25, 8, 6);
        let pipeline = fit_default(&corpus);
        let mut report = corpus.reports()[0].clone();
        report.short_description = String::new();
        let row = pipeline.transform_one(&report).unwrap();
        assert!(!row.is_zero());
        assert!(row
            .entries()
            .iter()
            .all(|(i, _)| *i >= pipeline.tfidf().dimension()));
    }

    #[test]
    fn priority_flag_widens_the_meta_block() {
        let corpus = synth::random_corpus(25, 8, 6);
        let without = fit_default(&corpus);
        let with = FeaturePipeline::fit(
            corpus.reports(),
            &FeatureConfig {
                min_df: 1,
                use_priority: true,
                ..FeatureConfig::default()
            },
            &SeverityPolicy::default(),
        )
        .unwrap();
        assert!(with.metadata().dimension() > without.metadata().dimension());
    }
}
