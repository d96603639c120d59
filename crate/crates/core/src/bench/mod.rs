//! Benchmark harness: split, rank, select at test points, train, predict,
//! score, and render reproducible reports.

mod eval;
mod report;
mod sweep;

pub use eval::{evaluate, ClassEval, ConfusionMatrix, EvalReport};
pub use report::{render_markdown, render_report, render_tsv, ReportFormat};
pub use sweep::{
    run_sweep, run_sweep_multi, CellResult, MultiSweepResult, MultiSweepRow, SweepConfig,
    SweepResult, SweepRow, DEFAULT_TEST_POINTS,
};

use std::path::PathBuf;

use thiserror::Error;

use crate::corpus::CorpusError;
use crate::models::ModelError;
use crate::rank::RankError;
use crate::vectorize::VectorizeError;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("gold and predicted label lists differ in length: {gold} vs {predicted}")]
    LengthMismatch { gold: usize, predicted: usize },
    #[error("cannot evaluate zero predictions")]
    EmptyInput,
    #[error("label `{0}` does not appear in the class list")]
    UnknownLabel(String),
    #[error("sweep config has an empty {0} list")]
    EmptyConfig(&'static str),
    #[error("test point k must be at least 1")]
    InvalidK,
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Vectorize(#[from] VectorizeError),
    #[error(transparent)]
    Rank(#[from] RankError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
