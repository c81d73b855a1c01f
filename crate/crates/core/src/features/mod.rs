//! Sparse feature construction: text TF-IDF n-grams plus one-hot metadata.

mod metadata;
mod pipeline;
mod sparse;
mod text;
mod tfidf;

pub use metadata::{CategoricalColumn, MetadataEncoder, NumericColumn};
pub use pipeline::{FeatureConfig, FeaturePipeline};
pub use sparse::{BlockSpan, DesignMatrix, SparseVector};
pub use text::{extract_ngrams, preprocess_text, NGRAM_JOINER};
pub use tfidf::TfidfModel;
