//! Library surface of the CLI: artifact persistence and canonical corpus
//! files, shared between the binary and its integration tests.

pub mod artifact;
pub mod corpus_io;
