//! Classifiers over selected-vocabulary feature matrices: multinomial
//! Naive Bayes on raw counts and a one-vs-rest linear SVM on L2-normalized
//! TF-IDF, plus a versioned on-disk model format.

mod nb;
mod persist;
mod svm;

pub use nb::{train_nb, NBModel};
pub use persist::{load_any_model, load_linear_model, load_nb_model, save_linear_model,
    save_nb_model, AnyModel};
pub use svm::{train_linear_svm, ClassTraining, LinearModel, SvmParams};

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("smoothing parameter alpha must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("cost parameter C must be positive, got {0}")]
    InvalidCost(f64),
    #[error("training requires at least 2 classes")]
    SingleClass,
    #[error("input contains a non-finite value")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix vocabulary does not match the model's vocabulary")]
    VocabMismatch,
    #[error("model file {path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("unsupported model format version {found}; this build reads version {expected}")]
    VersionMismatch { expected: u32, found: u32 },
    #[error("model file holds a `{found}` model, expected `{expected}`")]
    WrongModelType { expected: String, found: String },
    #[error("model file checksum mismatch; the file is corrupt")]
    ChecksumMismatch,
    #[error("model file is truncated (missing checksum line)")]
    Truncated,
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown classifier `{0}`; expected `nb` or `svm`")]
pub struct ParseClassifierError(pub String);

/// Which classifier a pipeline stage should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassifierKind {
    NaiveBayes,
    LinearSvm,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 2] = [ClassifierKind::NaiveBayes, ClassifierKind::LinearSvm];

    pub fn id(&self) -> &'static str {
        match self {
            ClassifierKind::NaiveBayes => "nb",
            ClassifierKind::LinearSvm => "svm",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ClassifierKind {
    type Err = ParseClassifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nb" => Ok(ClassifierKind::NaiveBayes),
            "svm" => Ok(ClassifierKind::LinearSvm),
            other => Err(ParseClassifierError(other.to_string())),
        }
    }
}
