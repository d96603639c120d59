//! Text-classification benchmarking toolkit for Urdu corpora.
//!
//! The pipeline: load a labeled corpus, preprocess it with Urdu-aware rules
//! (normalization, sentence splitting, tokenization, lexicon lemmatization,
//! stop-word filtering), vectorize to sparse counts and TF-IDF, rank terms
//! per class with ten filter feature-selection metrics, select top-k unions,
//! train multinomial Naive Bayes or a linear SVM, and evaluate with macro-F1
//! across a ladder of feature-count test points.
//!
//! Everything is deterministic given a seed: splits, rankings, SVM training,
//! and sweep reports are byte-reproducible across runs and thread counts.
//!
//! ```
//! use std::sync::Arc;
//! use tasnif_core::corpus::{Corpus, Document};
//! use tasnif_core::rank::{rank_per_class, select_top_k_union, FilterMetric};
//! use tasnif_core::text::Pipeline;
//! use tasnif_core::vectorize::{count_matrix, Vocabulary};
//!
//! let docs = vec![
//!     Document::new("k0", "khel", "کھلاڑیوں نے میچ جیتا۔"),
//!     Document::new("k1", "khel", "ٹیم نے کھیل دکھایا۔"),
//!     Document::new("b0", "bazar", "بازار میں قیمتیں بڑھیں۔"),
//!     Document::new("b1", "bazar", "تاجروں نے منافع کمایا۔"),
//! ];
//! let corpus = Corpus::from_documents(docs)?;
//! let corpus = Pipeline::default().preprocess(&corpus);
//!
//! let vocab = Arc::new(Vocabulary::from_corpus(&corpus)?);
//! let matrix = count_matrix(&corpus, &vocab)?;
//! let ranked = rank_per_class(&matrix, FilterMetric::Ndm)?;
//! let selected = select_top_k_union(&ranked, 3)?;
//! assert!(!selected.is_empty());
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod bench;
pub mod corpus;
pub mod models;
pub mod rank;
pub mod text;
pub mod vectorize;

mod util;

pub use corpus::{load_corpus, stratified_split, Corpus, CorpusFormat, Document, SplitResult};
pub use rank::FilterMetric;
pub use text::{Pipeline, TokenizerConfig};
