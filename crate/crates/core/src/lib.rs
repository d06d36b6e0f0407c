//! Corpus construction and evaluation toolkit for Serbo-Croatian text.
//!
//! * [`dedup`]: order-dependent fuzzy deduplication over word n-grams.
//! * [`variant`]: Serbian/Croatian split of mixed corpora.
//! * [`freq`] and [`similarity`]: top-K frequency profiles and the
//!   powered-cosine corpus similarity matrix.
//! * [`dissertation`]: candidate filtering and parallel abstract extraction
//!   from pre-extracted dissertation text.
//! * [`pipeline`]: configuration, aggregation and evaluation runs with
//!   atomic outputs.

pub mod corpus;
pub mod dedup;
pub mod dissertation;
pub mod error;
pub mod freq;
pub mod pipeline;
pub mod similarity;
pub mod token;
pub mod variant;

pub use corpus::{count_words, load_corpus, CorpusFormat, Document, Lang, LoadOptions};
pub use dedup::{dedup_docs, dedup_stream, DedupConfig, DedupReport, Deduplicator, ShingleIndex};
pub use error::{Error, Result};
pub use dissertation::{DissertationRecord, ParallelAbstractPair, SectionPatterns};
pub use freq::{frequency_table, sample_excerpt, ExcerptSpec, ExcerptStrategy, FrequencyProfile, TopProfile};
pub use pipeline::{aggregate, run_eval, PipelineConfig};
pub use similarity::{feature_union, similarity_matrix, FeatureSet, ProfileVector, SimilarityMatrix};
pub use token::{tokenize, TokenStream};
pub use variant::{classify, split_corpus, ClassifierConfig, MarkerLexicon, VariantVerdict};
