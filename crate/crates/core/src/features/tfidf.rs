//! TF-IDF vectorizer over n-gram documents.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseVector;

/// Fitted TF-IDF vocabulary with smooth inverse document frequencies:
/// `idf(t) = ln((1 + n_docs) / (1 + df(t))) + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfModel {
    /// Term -> column index, assigned in lexicographic term order.
    vocabulary: BTreeMap<String, usize>,
    /// Document frequency per column.
    document_frequency: Vec<usize>,
    /// Smooth idf weight per column.
    idf: Vec<f64>,
    n_docs: usize,
    ngram_range: (usize, usize),
    min_df: usize,
}

impl TfidfModel {
    /// Fit vocabulary and idf weights on training documents only.
    ///
    /// Terms below the `min_df` document-frequency threshold are dropped;
    /// an empty vocabulary after filtering is a fit error.
    pub fn fit(
        train_docs: &[Vec<String>],
        ngram_range: (usize, usize),
        min_df: usize,
    ) -> Result<Self> {
        if train_docs.is_empty() {
            return Err(Error::Fit("cannot fit TF-IDF on zero documents".into()));
        }
        let n_docs = train_docs.len();

        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in train_docs {
            let mut seen: Vec<&str> = doc.iter().map(String::as_str).collect();
            seen.sort_unstable();
            seen.dedup();
            for term in seen {
                *df.entry(term).or_insert(0) += 1;
            }
        }

        let mut vocabulary = BTreeMap::new();
        let mut document_frequency = Vec::new();
        let mut idf = Vec::new();
        for (term, count) in df {
            if count < min_df {
                continue;
            }
            let index = vocabulary.len();
            vocabulary.insert(term.to_string(), index);
            document_frequency.push(count);
            idf.push(((1.0 + n_docs as f64) / (1.0 + count as f64)).ln() + 1.0);
        }

        if vocabulary.is_empty() {
            return Err(Error::Fit(format!(
                "TF-IDF vocabulary is empty after min_df={min_df} filtering"
            )));
        }

        Ok(Self {
            vocabulary,
            document_frequency,
            idf,
            n_docs,
            ngram_range,
            min_df,
        })
    }

    /// Term count times idf, then L2-normalized. Out-of-vocabulary terms are
    /// ignored; a document with no in-vocabulary terms maps to the zero
    /// vector (normalization skipped).
    pub fn transform(&self, doc: &[String]) -> SparseVector {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for term in doc {
            if let Some(&index) = self.vocabulary.get(term) {
                *counts.entry(index).or_insert(0.0) += 1.0;
            }
        }
        let mut pairs: Vec<(usize, f64)> = counts
            .into_iter()
            .map(|(index, count)| (index, count * self.idf[index]))
            .collect();
        let norm = pairs.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, w) in &mut pairs {
                *w /= norm;
            }
        }
        SparseVector::from_pairs(self.dimension(), pairs)
    }

    pub fn dimension(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn vocabulary(&self) -> &BTreeMap<String, usize> {
        &self.vocabulary
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.vocabulary.get(term).map(|&i| self.idf[i])
    }

    pub fn document_frequency(&self, term: &str) -> Option<usize> {
        self.vocabulary.get(term).map(|&i| self.document_frequency[i])
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn ngram_range(&self) -> (usize, usize) {
        self.ngram_range
    }

    pub fn min_df(&self) -> usize {
        self.min_df
    }
}
