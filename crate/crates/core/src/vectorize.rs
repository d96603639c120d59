//! Indexed vocabularies, sparse document-term count matrices, and TF-IDF
//! weighting.
//!
//! IDF follows `ln(N / DF_t) + 1` with the natural logarithm; the base only
//! rescales weights by a constant, so rankings and linear decision
//! directions are unchanged.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::Corpus;
use crate::util::Fnv1a64;

#[derive(Debug, Error)]
pub enum VectorizeError {
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("corpus has no tokens; nothing to build a vocabulary from")]
    EmptyTokenStream,
    #[error("document `{0}` has no token sequence; run preprocessing first")]
    NotTokenized(String),
    #[error("term `{0}` has zero document frequency; prune unseen terms before computing idf")]
    ZeroDocumentFrequency(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("duplicate term `{0}` in vocabulary")]
    DuplicateTerm(String),
    #[error("n must be at least 1")]
    ZeroN,
    #[error("label `{0}` not in the class list")]
    UnknownLabel(String),
    #[error("vocabulary file {path}:{line}: {message}")]
    VocabFile {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// A bijection between terms and dense 0-based indices.
///
/// Ordering is lexicographic when built from a corpus and exactly the given
/// order when built from a ranked term list.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    /// Unique terms of a tokenized corpus, lexicographically ordered.
    pub fn from_corpus(corpus: &Corpus) -> Result<Self, VectorizeError> {
        let mut set = BTreeSet::new();
        for doc in corpus.documents() {
            let tokens = doc
                .tokens
                .as_ref()
                .ok_or_else(|| VectorizeError::NotTokenized(doc.id.clone()))?;
            for t in tokens {
                set.insert(t.clone());
            }
        }
        if set.is_empty() {
            return Err(VectorizeError::EmptyTokenStream);
        }
        Self::from_terms(set)
    }

    /// Builds a vocabulary preserving the iteration order of `terms`.
    pub fn from_terms<I>(terms: I) -> Result<Self, VectorizeError>
    where
        I: IntoIterator<Item = String>,
    {
        let terms: Vec<String> = terms.into_iter().collect();
        if terms.is_empty() {
            return Err(VectorizeError::EmptyVocabulary);
        }
        let mut index = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if index.insert(t.clone(), i as u32).is_some() {
                return Err(VectorizeError::DuplicateTerm(t.clone()));
            }
        }
        Ok(Self { terms, index })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub fn term(&self, index: u32) -> &str {
        &self.terms[index as usize]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// Stable fingerprint over the ordered term list.
    pub fn hash64(&self) -> u64 {
        let mut h = Fnv1a64::new();
        for t in &self.terms {
            h.update(t.as_bytes());
            h.update(b"\n");
        }
        h.finish()
    }

    /// Writes `term<TAB>index` lines in index order.
    pub fn save(&self, path: &Path) -> Result<(), VectorizeError> {
        let mut out = String::new();
        for (i, t) in self.terms.iter().enumerate() {
            out.push_str(t);
            out.push('\t');
            out.push_str(&i.to_string());
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|source| VectorizeError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, VectorizeError> {
        let content = std::fs::read_to_string(path).map_err(|source| VectorizeError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut terms = Vec::new();
        for (idx, line) in content.lines().enumerate() {
            let line_no = idx + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 2 {
                return Err(VectorizeError::VocabFile {
                    path: path.to_path_buf(),
                    line: line_no,
                    message: "expected `term<TAB>index`".to_string(),
                });
            }
            let index: usize = fields[1].parse().map_err(|_| VectorizeError::VocabFile {
                path: path.to_path_buf(),
                line: line_no,
                message: format!("bad index `{}`", fields[1]),
            })?;
            if index != terms.len() {
                return Err(VectorizeError::VocabFile {
                    path: path.to_path_buf(),
                    line: line_no,
                    message: format!("indices must be dense; expected {}, got {index}", terms.len()),
                });
            }
            terms.push(fields[0].to_string());
        }
        Self::from_terms(terms)
    }
}

/// Sparse document-term count matrix. Rows follow the source corpus order;
/// each row stores `(term_index, count)` pairs sorted by index.
#[derive(Debug, Clone)]
pub struct DocTermMatrix {
    vocab: Arc<Vocabulary>,
    rows: Vec<Vec<(u32, u32)>>,
    labels: Vec<u32>,
    classes: Vec<String>,
    df: Vec<u32>,
}

impl DocTermMatrix {
    /// Assembles a matrix from raw parts, validating labels and indices and
    /// recomputing document frequencies.
    pub fn from_parts(
        vocab: Arc<Vocabulary>,
        rows: Vec<Vec<(u32, u32)>>,
        labels: Vec<String>,
    ) -> Result<Self, VectorizeError> {
        if vocab.is_empty() {
            return Err(VectorizeError::EmptyVocabulary);
        }
        if rows.len() != labels.len() {
            return Err(VectorizeError::DimensionMismatch {
                expected: rows.len(),
                got: labels.len(),
            });
        }
        let mut classes: Vec<String> = labels.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        classes.sort();
        let label_ids = labels
            .iter()
            .map(|l| {
                classes
                    .binary_search(l)
                    .map(|i| i as u32)
                    .map_err(|_| VectorizeError::UnknownLabel(l.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut rows = rows;
        for row in &mut rows {
            row.sort_by_key(|&(i, _)| i);
            for &(i, _) in row.iter() {
                if i as usize >= vocab.len() {
                    return Err(VectorizeError::DimensionMismatch {
                        expected: vocab.len(),
                        got: i as usize + 1,
                    });
                }
            }
        }
        let df = compute_df(vocab.len(), &rows);
        Ok(Self {
            vocab,
            rows,
            labels: label_ids,
            classes,
            df,
        })
    }

    pub fn n_docs(&self) -> usize {
        self.rows.len()
    }

    pub fn n_terms(&self) -> usize {
        self.vocab.len()
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    /// Class labels, sorted ascending.
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn label(&self, row: usize) -> &str {
        &self.classes[self.labels[row] as usize]
    }

    pub fn label_index(&self, row: usize) -> usize {
        self.labels[row] as usize
    }

    pub fn row(&self, row: usize) -> &[(u32, u32)] {
        &self.rows[row]
    }

    pub fn rows(&self) -> &[Vec<(u32, u32)>] {
        &self.rows
    }

    /// Per-term document frequency.
    pub fn df(&self) -> &[u32] {
        &self.df
    }

    /// Documents per class, in class order.
    pub fn class_doc_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.classes.len()];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Sum of all cells: the retained token count of the corpus.
    pub fn total_count(&self) -> u64 {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(_, c)| u64::from(c)).sum::<u64>())
            .sum()
    }

    /// Re-expresses the matrix over a different vocabulary: columns absent
    /// from `vocab` are dropped, none are invented.
    pub fn project(&self, vocab: &Arc<Vocabulary>) -> Result<DocTermMatrix, VectorizeError> {
        if vocab.is_empty() {
            return Err(VectorizeError::EmptyVocabulary);
        }
        let remap: Vec<Option<u32>> = self
            .vocab
            .terms()
            .iter()
            .map(|t| vocab.index_of(t))
            .collect();
        let rows: Vec<Vec<(u32, u32)>> = self
            .rows
            .par_iter()
            .map(|row| {
                let mut new_row: Vec<(u32, u32)> = row
                    .iter()
                    .filter_map(|&(i, c)| remap[i as usize].map(|j| (j, c)))
                    .collect();
                new_row.sort_by_key(|&(i, _)| i);
                new_row
            })
            .collect();
        let df = compute_df(vocab.len(), &rows);
        Ok(DocTermMatrix {
            vocab: Arc::clone(vocab),
            rows,
            labels: self.labels.clone(),
            classes: self.classes.clone(),
            df,
        })
    }

    /// Drops terms with zero document frequency, returning the reduced
    /// matrix and its vocabulary. Required before [`compute_idf`] when the
    /// vocabulary came from outside this corpus.
    pub fn drop_unseen_terms(&self) -> Result<(DocTermMatrix, Arc<Vocabulary>), VectorizeError> {
        let kept: Vec<String> = self
            .vocab
            .terms()
            .iter()
            .zip(&self.df)
            .filter(|(_, &df)| df > 0)
            .map(|(t, _)| t.clone())
            .collect();
        let vocab = Arc::new(Vocabulary::from_terms(kept)?);
        let matrix = self.project(&vocab)?;
        Ok((matrix, vocab))
    }
}

fn compute_df(n_terms: usize, rows: &[Vec<(u32, u32)>]) -> Vec<u32> {
    let mut df = vec![0u32; n_terms];
    for row in rows {
        for &(i, c) in row {
            if c > 0 {
                df[i as usize] += 1;
            }
        }
    }
    df
}

/// Counts term occurrences per document over `vocab`. Terms outside the
/// vocabulary are ignored, so vectorizing a test corpus with a train
/// vocabulary never introduces new columns.
pub fn count_matrix(
    corpus: &Corpus,
    vocab: &Arc<Vocabulary>,
) -> Result<DocTermMatrix, VectorizeError> {
    if vocab.is_empty() {
        return Err(VectorizeError::EmptyVocabulary);
    }
    for doc in corpus.documents() {
        if doc.tokens.is_none() {
            return Err(VectorizeError::NotTokenized(doc.id.clone()));
        }
    }
    let rows: Vec<Vec<(u32, u32)>> = corpus
        .documents()
        .par_iter()
        .map(|doc| {
            let mut counts: HashMap<u32, u32> = HashMap::new();
            for t in doc.tokens.as_ref().expect("checked above") {
                if let Some(i) = vocab.index_of(t) {
                    *counts.entry(i).or_insert(0) += 1;
                }
            }
            let mut row: Vec<(u32, u32)> = counts.into_iter().collect();
            row.sort_by_key(|&(i, _)| i);
            row
        })
        .collect();
    let labels: Vec<String> = corpus
        .documents()
        .iter()
        .map(|d| d.class_label.clone())
        .collect();
    let df = compute_df(vocab.len(), &rows);
    let mut classes = corpus.classes().to_vec();
    classes.sort();
    let label_ids = labels
        .iter()
        .map(|l| classes.binary_search(l).expect("corpus invariant") as u32)
        .collect();
    Ok(DocTermMatrix {
        vocab: Arc::clone(vocab),
        rows,
        labels: label_ids,
        classes,
        df,
    })
}

/// Inverse document frequency per term: `ln(N / DF_t) + 1`.
pub fn compute_idf(matrix: &DocTermMatrix) -> Result<Vec<f64>, VectorizeError> {
    let n = matrix.n_docs() as f64;
    matrix
        .df()
        .iter()
        .enumerate()
        .map(|(t, &df)| {
            if df == 0 {
                Err(VectorizeError::ZeroDocumentFrequency(
                    matrix.vocab.term(t as u32).to_string(),
                ))
            } else {
                Ok((n / f64::from(df)).ln() + 1.0)
            }
        })
        .collect()
}

/// TF-IDF view of a count matrix; same sparsity, real-valued cells.
#[derive(Debug, Clone)]
pub struct WeightedMatrix {
    vocab: Arc<Vocabulary>,
    rows: Vec<Vec<(u32, f64)>>,
    labels: Vec<u32>,
    classes: Vec<String>,
    idf: Vec<f64>,
    row_normalized: bool,
}

impl WeightedMatrix {
    /// Assembles a weighted matrix directly, mostly useful for synthetic
    /// classifier inputs.
    pub fn from_parts(
        vocab: Arc<Vocabulary>,
        rows: Vec<Vec<(u32, f64)>>,
        labels: Vec<String>,
    ) -> Result<Self, VectorizeError> {
        if vocab.is_empty() {
            return Err(VectorizeError::EmptyVocabulary);
        }
        if rows.len() != labels.len() {
            return Err(VectorizeError::DimensionMismatch {
                expected: rows.len(),
                got: labels.len(),
            });
        }
        let mut classes: Vec<String> =
            labels.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        classes.sort();
        let label_ids = labels
            .iter()
            .map(|l| classes.binary_search(l).expect("derived from labels") as u32)
            .collect();
        let mut rows = rows;
        for row in &mut rows {
            row.sort_by_key(|&(i, _)| i);
        }
        let n_terms = vocab.len();
        Ok(Self {
            vocab,
            rows,
            labels: label_ids,
            classes,
            idf: vec![1.0; n_terms],
            row_normalized: false,
        })
    }

    pub fn n_docs(&self) -> usize {
        self.rows.len()
    }

    pub fn n_terms(&self) -> usize {
        self.vocab.len()
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn label(&self, row: usize) -> &str {
        &self.classes[self.labels[row] as usize]
    }

    pub fn label_index(&self, row: usize) -> usize {
        self.labels[row] as usize
    }

    pub fn row(&self, row: usize) -> &[(u32, f64)] {
        &self.rows[row]
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn row_normalized(&self) -> bool {
        self.row_normalized
    }

    pub fn class_doc_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.classes.len()];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }
}

/// Multiplies each cell by its term's IDF, optionally L2-normalizing rows.
/// All-zero rows stay zero.
pub fn apply_tfidf(
    matrix: &DocTermMatrix,
    idf: &[f64],
    l2_normalize_rows: bool,
) -> Result<WeightedMatrix, VectorizeError> {
    if idf.len() != matrix.n_terms() {
        return Err(VectorizeError::DimensionMismatch {
            expected: matrix.n_terms(),
            got: idf.len(),
        });
    }
    let rows: Vec<Vec<(u32, f64)>> = matrix
        .rows
        .par_iter()
        .map(|row| {
            let mut weighted: Vec<(u32, f64)> = row
                .iter()
                .map(|&(i, c)| (i, f64::from(c) * idf[i as usize]))
                .collect();
            if l2_normalize_rows {
                let norm = weighted.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
                if norm > 0.0 {
                    for (_, w) in &mut weighted {
                        *w /= norm;
                    }
                }
            }
            weighted
        })
        .collect();
    Ok(WeightedMatrix {
        vocab: Arc::clone(&matrix.vocab),
        rows,
        labels: matrix.labels.clone(),
        classes: matrix.classes.clone(),
        idf: idf.to_vec(),
        row_normalized: l2_normalize_rows,
    })
}

/// Vocabulary of the `n` terms with the highest total frequency, ties broken
/// lexicographically. The returned vocabulary is lexicographically ordered.
pub fn top_frequent_vocabulary(
    matrix: &DocTermMatrix,
    n: usize,
) -> Result<Vocabulary, VectorizeError> {
    if n == 0 {
        return Err(VectorizeError::ZeroN);
    }
    let mut totals = vec![0u64; matrix.n_terms()];
    for row in &matrix.rows {
        for &(i, c) in row {
            totals[i as usize] += u64::from(c);
        }
    }
    let mut order: Vec<u32> = (0..matrix.n_terms() as u32).collect();
    order.sort_by(|&a, &b| {
        totals[b as usize]
            .cmp(&totals[a as usize])
            .then_with(|| matrix.vocab.term(a).cmp(matrix.vocab.term(b)))
    });
    order.truncate(n);
    let mut selected: Vec<String> = order
        .into_iter()
        .map(|i| matrix.vocab.term(i).to_string())
        .collect();
    selected.sort();
    Vocabulary::from_terms(selected)
}
