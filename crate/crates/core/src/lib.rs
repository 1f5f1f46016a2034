//! Corpus exploration through LDA topic models.
//!
//! The pipeline is: [`corpus`] ingests and tokenizes documents and prunes
//! corpus-ubiquitous terms, [`lda`] fits a topic model with a collapsed Gibbs
//! sampler, [`analytics`] derives topic ranks and per-document word scores,
//! and [`filter`] evaluates interactive filter state into document selections
//! that can be exported as CSV.

pub mod analytics;
pub mod config;
pub mod corpus;
pub mod error;
pub mod filter;
pub mod lda;
pub mod synthetic;

pub use analytics::{Analytics, AnalyticsConfig, DisplayMode, DocWordScores, RankMatrix, TopicWordList};
pub use corpus::{PreprocessConfig, RawDocument, TokenizedCorpus, Vocabulary};
pub use error::{Error, Result};
pub use filter::{FilterState, Selection};
pub use lda::{Hyperparams, TopicModel};
