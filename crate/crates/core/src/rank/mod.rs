//! Term ranking: one-vs-rest statistics, the ten filter metrics, per-class
//! ranked lists, top-k unions, and TSV export of ranked vocabularies for
//! downstream consumers (e.g. embedding-layer pipelines).

mod metrics;
mod normal;
mod stats;

pub use metrics::{metric_score, FilterMetric, ParseMetricError, RATE_GUARD_EPSILON};
pub use normal::inverse_normal_cdf;
pub use stats::{build_stats, ContingencyTable, CorpusTermStats, TermClassStats};

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::util::fmt_f64_17;
use crate::vectorize::{DocTermMatrix, Vocabulary, VectorizeError};

#[derive(Debug, Error)]
pub enum RankError {
    #[error("ranking requires at least 2 classes")]
    SingleClass,
    #[error("probability {0} is outside the open interval (0, 1)")]
    InvalidProbability(f64),
    #[error("k must be at least 1")]
    InvalidK,
    #[error("nothing to select from: no ranked lists given")]
    EmptyRanking,
    #[error("ranking file {path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Vectorize(#[from] VectorizeError),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// One term's position in a per-class ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry {
    pub term: String,
    pub score: f64,
    /// 1-based dense rank.
    pub rank: u32,
}

/// All vocabulary terms scored against one class and ordered by
/// (score desc, term asc), which makes the ranking byte-reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub class_label: String,
    pub metric: FilterMetric,
    pub entries: Vec<RankedEntry>,
}

impl RankedList {
    /// The first `k` terms (or all of them when `k` exceeds the list).
    pub fn top_k(&self, k: usize) -> &[RankedEntry] {
        &self.entries[..k.min(self.entries.len())]
    }
}

/// Deduplicated union of per-class top-k terms with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectedTerm {
    pub term: String,
    /// Best (smallest) rank the term achieved in any contributing class.
    pub best_rank: u32,
    /// Classes whose top-k contained the term, sorted.
    pub classes: Vec<String>,
}

/// Result of top-k selection across all classes, ordered by
/// (best rank asc, term asc).
#[derive(Debug, Clone, PartialEq)]
pub struct SelectedVocabulary {
    pub k: usize,
    pub metric: FilterMetric,
    pub terms: Vec<SelectedTerm>,
}

impl SelectedVocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// An indexed vocabulary in selection order.
    pub fn vocabulary(&self) -> Result<Vocabulary, VectorizeError> {
        Vocabulary::from_terms(self.terms.iter().map(|t| t.term.clone()))
    }
}

/// Ranks every vocabulary term against every class with `metric`, using
/// statistics from the given (training) matrix.
pub fn rank_per_class(
    matrix: &DocTermMatrix,
    metric: FilterMetric,
) -> Result<BTreeMap<String, RankedList>, RankError> {
    let stats = build_stats(matrix)?;
    Ok(rank_with_stats(&stats, metric))
}

/// Ranking over prebuilt statistics; lets a sweep reuse one `build_stats`
/// pass across all ten metrics.
pub fn rank_with_stats(
    stats: &CorpusTermStats,
    metric: FilterMetric,
) -> BTreeMap<String, RankedList> {
    let vocab = stats.vocab();
    let lists: Vec<RankedList> = stats
        .classes()
        .par_iter()
        .enumerate()
        .map(|(class_idx, class)| {
            let mut scored: Vec<(u32, f64)> = (0..stats.n_terms() as u32)
                .map(|t| (t, metric_score(metric, &stats.stats(t, class_idx))))
                .collect();
            scored.sort_unstable_by(|a, b| {
                b.1.total_cmp(&a.1)
                    .then_with(|| vocab.term(a.0).cmp(vocab.term(b.0)))
            });
            let entries = scored
                .into_iter()
                .enumerate()
                .map(|(i, (t, score))| RankedEntry {
                    term: vocab.term(t).to_string(),
                    score,
                    rank: i as u32 + 1,
                })
                .collect();
            RankedList {
                class_label: class.clone(),
                metric,
                entries,
            }
        })
        .collect();
    lists
        .into_iter()
        .map(|l| (l.class_label.clone(), l))
        .collect()
}

/// Takes each class's top `min(k, |V|)` terms and unions them, tracking
/// which classes contributed each term.
pub fn select_top_k_union(
    ranked: &BTreeMap<String, RankedList>,
    k: usize,
) -> Result<SelectedVocabulary, RankError> {
    if k == 0 {
        return Err(RankError::InvalidK);
    }
    let mut metric = None;
    let mut by_term: BTreeMap<&str, (u32, Vec<String>)> = BTreeMap::new();
    for list in ranked.values() {
        metric = Some(list.metric);
        for entry in list.top_k(k) {
            let slot = by_term
                .entry(entry.term.as_str())
                .or_insert((entry.rank, Vec::new()));
            slot.0 = slot.0.min(entry.rank);
            slot.1.push(list.class_label.clone());
        }
    }
    let metric = metric.ok_or(RankError::EmptyRanking)?;
    let mut terms: Vec<SelectedTerm> = by_term
        .into_iter()
        .map(|(term, (best_rank, mut classes))| {
            classes.sort();
            SelectedTerm {
                term: term.to_string(),
                best_rank,
                classes,
            }
        })
        .collect();
    terms.sort_by(|a, b| a.best_rank.cmp(&b.best_rank).then_with(|| a.term.cmp(&b.term)));
    Ok(SelectedVocabulary { k, metric, terms })
}

const RANKING_HEADER: &str = "term\tclass\tmetric\tscore\trank";
const SELECTED_HEADER: &str = "term\tbest_rank\tclasses";

/// Serializes per-class rankings as one TSV, classes in map order, scores
/// with 17 significant digits so a re-import is lossless.
pub fn rankings_to_tsv(ranked: &BTreeMap<String, RankedList>) -> String {
    let mut out = String::from(RANKING_HEADER);
    out.push('\n');
    for list in ranked.values() {
        for e in &list.entries {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                e.term,
                list.class_label,
                list.metric,
                fmt_f64_17(e.score),
                e.rank
            ));
        }
    }
    out
}

pub fn export_rankings(
    ranked: &BTreeMap<String, RankedList>,
    path: &Path,
) -> Result<(), RankError> {
    std::fs::write(path, rankings_to_tsv(ranked)).map_err(|source| RankError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn import_rankings(path: &Path) -> Result<BTreeMap<String, RankedList>, RankError> {
    let content = std::fs::read_to_string(path).map_err(|source| RankError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines = content
        .lines()
        .enumerate()
        .skip_while(|(_, l)| l.starts_with('#') || l.is_empty());
    match lines.next() {
        Some((_, header)) if header == RANKING_HEADER => {}
        _ => {
            return Err(RankError::Format {
                path: path.to_path_buf(),
                line: 1,
                message: format!("expected header `{RANKING_HEADER}`"),
            })
        }
    }
    let mut ranked: BTreeMap<String, RankedList> = BTreeMap::new();
    for (idx, line) in lines {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let line_no = idx + 1;
        let bad = |message: String| RankError::Format {
            path: path.to_path_buf(),
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(bad(format!("expected 5 fields, got {}", fields.len())));
        }
        let metric: FilterMetric = fields[2].parse().map_err(|e| bad(format!("{e}")))?;
        let score: f64 = fields[3].parse().map_err(|_| bad(format!("bad score `{}`", fields[3])))?;
        let rank: u32 = fields[4].parse().map_err(|_| bad(format!("bad rank `{}`", fields[4])))?;
        let list = ranked
            .entry(fields[1].to_string())
            .or_insert_with(|| RankedList {
                class_label: fields[1].to_string(),
                metric,
                entries: Vec::new(),
            });
        if list.metric != metric {
            return Err(bad("mixed metrics for one class".to_string()));
        }
        list.entries.push(RankedEntry {
            term: fields[0].to_string(),
            score,
            rank,
        });
    }
    Ok(ranked)
}

/// Serializes a selected vocabulary: `term<TAB>best_rank<TAB>classes`.
pub fn selected_to_tsv(selected: &SelectedVocabulary) -> String {
    let mut out = String::from(SELECTED_HEADER);
    out.push('\n');
    for t in &selected.terms {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            t.term,
            t.best_rank,
            t.classes.join(",")
        ));
    }
    out
}

pub fn export_selected(selected: &SelectedVocabulary, path: &Path) -> Result<(), RankError> {
    std::fs::write(path, selected_to_tsv(selected)).map_err(|source| RankError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads back a selected-vocabulary TSV. `k` and the metric are not stored
/// in the file, so callers supply them (they are embedded in report headers).
pub fn import_selected(
    path: &Path,
    k: usize,
    metric: FilterMetric,
) -> Result<SelectedVocabulary, RankError> {
    let content = std::fs::read_to_string(path).map_err(|source| RankError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines = content
        .lines()
        .enumerate()
        .skip_while(|(_, l)| l.starts_with('#') || l.is_empty());
    match lines.next() {
        Some((_, header)) if header == SELECTED_HEADER => {}
        _ => {
            return Err(RankError::Format {
                path: path.to_path_buf(),
                line: 1,
                message: format!("expected header `{SELECTED_HEADER}`"),
            })
        }
    }
    let mut terms = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(RankError::Format {
                path: path.to_path_buf(),
                line: line_no,
                message: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let best_rank: u32 = fields[1].parse().map_err(|_| RankError::Format {
            path: path.to_path_buf(),
            line: line_no,
            message: format!("bad rank `{}`", fields[1]),
        })?;
        terms.push(SelectedTerm {
            term: fields[0].to_string(),
            best_rank,
            classes: fields[2].split(',').map(str::to_string).collect(),
        });
    }
    Ok(SelectedVocabulary { k, metric, terms })
}
