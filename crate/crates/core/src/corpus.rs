//! Labeled document collections: loading from disk, validation, and
//! stratified train/test splitting.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::util::shuffle;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus path does not exist: {0}")]
    PathNotFound(PathBuf),
    #[error("corpus root contains zero classes: {0}")]
    ZeroClasses(PathBuf),
    #[error("class `{0}` contains zero documents")]
    EmptyClass(String),
    #[error("duplicate document id `{0}`")]
    DuplicateId(String),
    #[error("file {0} is not valid UTF-8")]
    InvalidUtf8(PathBuf),
    #[error("document {0} is empty after whitespace trim")]
    EmptyDocument(String),
    #[error("document `{0}` has an empty class label")]
    EmptyClassLabel(String),
    #[error("manifest {path}:{line}: {message}")]
    ManifestSyntax {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("class `{class}` has {count} documents; splitting requires at least 2")]
    ClassTooSmall { class: String, count: usize },
    #[error("train fraction {0} is outside (0, 1)")]
    InvalidFraction(f64),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// A single labeled text document.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    /// Identifier, unique within a corpus.
    pub id: String,
    pub class_label: String,
    pub raw_text: String,
    /// Preprocessed token sequence; `None` until a pipeline has run.
    pub tokens: Option<Vec<String>>,
}

impl Document {
    pub fn new(id: impl Into<String>, class_label: impl Into<String>, raw_text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            class_label: class_label.into(),
            raw_text: raw_text.into(),
            tokens: None,
        }
    }
}

/// An ordered collection of documents with a deterministic class set.
///
/// Document order is load order; the class list is the sorted set of labels
/// present in the documents.
#[derive(Debug, Clone)]
pub struct Corpus {
    documents: Vec<Document>,
    classes: Vec<String>,
}

/// On-disk layout accepted by [`load_corpus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// `<root>/<class>/<file>.txt`, one document per file.
    DirPerClass,
    /// A TSV manifest: `id<TAB>class<TAB>relative_path` per line.
    ManifestTsv,
}

impl fmt::Display for CorpusFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusFormat::DirPerClass => write!(f, "dir-per-class"),
            CorpusFormat::ManifestTsv => write!(f, "manifest-tsv"),
        }
    }
}

impl std::str::FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dir-per-class" => Ok(CorpusFormat::DirPerClass),
            "manifest-tsv" => Ok(CorpusFormat::ManifestTsv),
            other => Err(format!("unknown corpus format `{other}`")),
        }
    }
}

impl Corpus {
    /// Builds a corpus from documents, validating ids, labels, and contents.
    pub fn from_documents(documents: Vec<Document>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(documents.len());
        let mut classes: Vec<String> = Vec::new();
        for doc in &documents {
            if doc.class_label.is_empty() {
                return Err(CorpusError::EmptyClassLabel(doc.id.clone()));
            }
            if doc.raw_text.trim().is_empty() {
                return Err(CorpusError::EmptyDocument(doc.id.clone()));
            }
            if !seen.insert(doc.id.clone()) {
                return Err(CorpusError::DuplicateId(doc.id.clone()));
            }
            if !classes.iter().any(|c| c == &doc.class_label) {
                classes.push(doc.class_label.clone());
            }
        }
        classes.sort();
        Ok(Self { documents, classes })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    /// Class labels, lexicographically sorted.
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Number of documents per class, in class order.
    pub fn class_counts(&self) -> Vec<(String, usize)> {
        self.classes
            .iter()
            .map(|c| {
                let n = self.documents.iter().filter(|d| &d.class_label == c).count();
                (c.clone(), n)
            })
            .collect()
    }

    /// Total retained tokens across all documents, if preprocessed.
    pub fn token_count(&self) -> Option<usize> {
        self.documents
            .iter()
            .map(|d| d.tokens.as_ref().map(Vec::len))
            .sum()
    }

    /// Returns a corpus with every document's tokens replaced by `f(doc)`.
    pub fn with_tokens<F>(&self, f: F) -> Corpus
    where
        F: Fn(&Document) -> Vec<String> + Sync,
    {
        let documents = self
            .documents
            .par_iter()
            .map(|d| {
                let mut doc = d.clone();
                doc.tokens = Some(f(d));
                doc
            })
            .collect();
        Corpus {
            documents,
            classes: self.classes.clone(),
        }
    }
}

/// Result of a stratified split; train and test partition the input exactly.
#[derive(Debug, Clone)]
pub struct SplitResult {
    pub train: Corpus,
    pub test: Corpus,
    pub seed: u64,
    pub train_fraction: f64,
}

/// Loads a labeled corpus from disk.
///
/// Documents are ordered by (class asc, filename asc) for `DirPerClass` and
/// by manifest line order for `ManifestTsv`. Decoding is strict UTF-8; a
/// leading BOM is stripped.
pub fn load_corpus(root: &Path, format: CorpusFormat) -> Result<Corpus, CorpusError> {
    if !root.exists() {
        return Err(CorpusError::PathNotFound(root.to_path_buf()));
    }
    match format {
        CorpusFormat::DirPerClass => load_dir_per_class(root),
        CorpusFormat::ManifestTsv => load_manifest(root),
    }
}

fn read_text_file(path: &Path) -> Result<String, CorpusError> {
    let bytes = std::fs::read(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut text =
        String::from_utf8(bytes).map_err(|_| CorpusError::InvalidUtf8(path.to_path_buf()))?;
    if let Some(stripped) = text.strip_prefix('\u{FEFF}') {
        text = stripped.to_string();
    }
    Ok(text)
}

fn load_dir_per_class(root: &Path) -> Result<Corpus, CorpusError> {
    let mut class_dirs: Vec<(String, PathBuf)> = Vec::new();
    let entries = std::fs::read_dir(root).map_err(|source| CorpusError::Io {
        path: root.to_path_buf(),
        source,
    })?;
    for entry in entries {
        let entry = entry.map_err(|source| CorpusError::Io {
            path: root.to_path_buf(),
            source,
        })?;
        if entry.path().is_dir() {
            let name = entry.file_name().to_string_lossy().into_owned();
            class_dirs.push((name, entry.path()));
        }
    }
    if class_dirs.is_empty() {
        return Err(CorpusError::ZeroClasses(root.to_path_buf()));
    }
    class_dirs.sort();

    // One (class, id, path) triple per document, in final order.
    let mut files: Vec<(String, String, PathBuf)> = Vec::new();
    for (class, dir) in &class_dirs {
        let mut names: Vec<(String, PathBuf)> = Vec::new();
        let entries = std::fs::read_dir(dir).map_err(|source| CorpusError::Io {
            path: dir.clone(),
            source,
        })?;
        for entry in entries {
            let entry = entry.map_err(|source| CorpusError::Io {
                path: dir.clone(),
                source,
            })?;
            let path = entry.path();
            if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
                names.push((entry.file_name().to_string_lossy().into_owned(), path));
            }
        }
        if names.is_empty() {
            return Err(CorpusError::EmptyClass(class.clone()));
        }
        names.sort();
        for (name, path) in names {
            files.push((class.clone(), format!("{class}/{name}"), path));
        }
    }

    // Reads may run in parallel; order is fixed by the list built above.
    let texts: Vec<Result<String, CorpusError>> = files
        .par_iter()
        .map(|(_, _, path)| read_text_file(path))
        .collect();

    let mut documents = Vec::with_capacity(files.len());
    for ((class, id, path), text) in files.into_iter().zip(texts) {
        let text = text?;
        if text.trim().is_empty() {
            return Err(CorpusError::EmptyDocument(path.display().to_string()));
        }
        documents.push(Document::new(id, class, text));
    }
    Corpus::from_documents(documents)
}

fn load_manifest(manifest: &Path) -> Result<Corpus, CorpusError> {
    let content = read_text_file(manifest)?;
    let base = manifest.parent().unwrap_or_else(|| Path::new("."));
    let mut rows: Vec<(String, String, PathBuf)> = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(CorpusError::ManifestSyntax {
                path: manifest.to_path_buf(),
                line: line_no,
                message: format!("expected 3 tab-separated fields, got {}", fields.len()),
            });
        }
        let (id, class, rel) = (fields[0], fields[1], fields[2]);
        if id.is_empty() || class.is_empty() || rel.is_empty() {
            return Err(CorpusError::ManifestSyntax {
                path: manifest.to_path_buf(),
                line: line_no,
                message: "empty field".to_string(),
            });
        }
        rows.push((id.to_string(), class.to_string(), base.join(rel)));
    }
    if rows.is_empty() {
        return Err(CorpusError::ZeroClasses(manifest.to_path_buf()));
    }

    let texts: Vec<Result<String, CorpusError>> =
        rows.par_iter().map(|(_, _, path)| read_text_file(path)).collect();

    let mut documents = Vec::with_capacity(rows.len());
    for ((id, class, path), text) in rows.into_iter().zip(texts) {
        let text = text?;
        if text.trim().is_empty() {
            return Err(CorpusError::EmptyDocument(path.display().to_string()));
        }
        documents.push(Document::new(id, class, text));
    }
    Corpus::from_documents(documents)
}

/// Splits a corpus class by class with a seeded, platform-independent PRNG.
///
/// Per class, document positions are shuffled by Fisher–Yates driven by a
/// ChaCha8 stream seeded with `seed` (one stream, consumed in class order),
/// and the first `round_half_up(train_fraction * n)` go to train, clamped so
/// neither side is empty. Identical seed and corpus give identical membership
/// on every platform.
pub fn stratified_split(
    corpus: &Corpus,
    train_fraction: f64,
    seed: u64,
) -> Result<SplitResult, CorpusError> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(CorpusError::InvalidFraction(train_fraction));
    }
    for (class, count) in corpus.class_counts() {
        if count < 2 {
            return Err(CorpusError::ClassTooSmall { class, count });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_train = vec![false; corpus.len()];
    for class in corpus.classes() {
        let mut positions: Vec<usize> = corpus
            .documents
            .iter()
            .enumerate()
            .filter(|(_, d)| &d.class_label == class)
            .map(|(i, _)| i)
            .collect();
        shuffle(&mut positions, &mut rng);
        let n = positions.len();
        let take = round_half_up(train_fraction * n as f64).clamp(1, n - 1);
        for &pos in &positions[..take] {
            in_train[pos] = true;
        }
    }

    let (mut train_docs, mut test_docs) = (Vec::new(), Vec::new());
    for (i, doc) in corpus.documents.iter().enumerate() {
        if in_train[i] {
            train_docs.push(doc.clone());
        } else {
            test_docs.push(doc.clone());
        }
    }
    Ok(SplitResult {
        train: Corpus::from_documents(train_docs)?,
        test: Corpus::from_documents(test_docs)?,
        seed,
        train_fraction,
    })
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Per-class train/test counts of a split, in class order.
pub fn split_counts(split: &SplitResult) -> Vec<(String, usize, usize)> {
    split
        .train
        .classes()
        .iter()
        .map(|c| {
            let tr = split
                .train
                .documents()
                .iter()
                .filter(|d| &d.class_label == c)
                .count();
            let te = split
                .test
                .documents()
                .iter()
                .filter(|d| &d.class_label == c)
                .count();
            (c.clone(), tr, te)
        })
        .collect()
}

/// Document ids per class, useful for reproducibility reports.
pub fn ids_by_class(corpus: &Corpus) -> BTreeMap<String, Vec<String>> {
    let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for doc in corpus.documents() {
        map.entry(doc.class_label.clone())
            .or_default()
            .push(doc.id.clone());
    }
    map
}
