//! Direct-bias measurement for word-embedding spaces, with a small skip-gram
//! trainer and statistical tools for checking how stable the numbers are.

pub mod bias;
pub mod cli;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod fixture;
pub mod manifest;
pub mod stats;
pub mod trainer;

pub use bias::{bias_direction, bias_profile, direct_bias, word_bias, BiasDirection, BiasReport, NeutralTermSet, TermPairSet};
pub use corpus::{build_vocabulary, tokenize, TokenStream, Vocabulary};
pub use embedding::{cosine, load_embeddings, save_embeddings, EmbeddingSpace, Format};
pub use error::{Error, Result};
pub use manifest::RunManifest;
pub use trainer::{train_sgns, TrainConfig};
