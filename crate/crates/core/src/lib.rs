//! Bug-severity prediction toolkit.
//!
//! Ingests Bugzilla-style bug-report CSVs, builds sparse text+metadata
//! features, corrects class imbalance, trains nine classifier families from
//! first principles, and benchmarks them under a shared evaluation harness.
//!
//! The crate is organized along the pipeline:
//!
//! - [`corpus`]: CSV parsing, HIGH/LOW severity mapping, stratified splits
//!   and fold plans.
//! - [`features`]: tokenization, TF-IDF n-grams, one-hot metadata encoding,
//!   sparse design matrices.
//! - [`balance`]: balanced class weights and SMOTE oversampling.
//! - [`linear`], [`naive_bayes`], [`knn`]: the classical learners.
//! - [`gbdt`]: one boosted-tree engine with exact, histogram, and oblivious
//!   presets.
//! - [`eval`]: confusion matrices, accuracy/precision/recall/F1, AUC,
//!   cross-validation, learning curves, and the all-models benchmark.
//! - [`model`]: the uniform train/predict surface over all nine families.
//! - [`config`]: run configuration and deterministic seed derivation.

pub mod balance;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod gbdt;
pub mod knn;
pub mod linear;
pub mod model;
pub mod naive_bayes;
pub mod synth;

pub use error::{Error, Result};
