//! Per-(term, class) one-vs-rest statistics: contingency tables, occurrence
//! totals, and exact-count histograms, all computed from training rows only.

use std::sync::Arc;

use crate::vectorize::{DocTermMatrix, Vocabulary};

use super::RankError;

/// One-vs-rest document counts for a term against a target class:
/// `tp`/`fn_` split the class's documents by term presence, `fp`/`tn` split
/// the complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContingencyTable {
    pub tp: u32,
    pub fn_: u32,
    pub fp: u32,
    pub tn: u32,
}

impl ContingencyTable {
    pub fn new(tp: u32, fn_: u32, fp: u32, tn: u32) -> Self {
        Self { tp, fn_, fp, tn }
    }

    /// Documents in the target class.
    pub fn npos(&self) -> u32 {
        self.tp + self.fn_
    }

    /// Documents outside the target class.
    pub fn nneg(&self) -> u32 {
        self.fp + self.tn
    }

    pub fn n(&self) -> u32 {
        self.npos() + self.nneg()
    }

    /// True-positive rate tp / Npos; 0 when the class is empty.
    pub fn tpr(&self) -> f64 {
        let npos = self.npos();
        if npos == 0 {
            0.0
        } else {
            f64::from(self.tp) / f64::from(npos)
        }
    }

    /// False-positive rate fp / Nneg; 0 when the complement is empty.
    pub fn fpr(&self) -> f64 {
        let nneg = self.nneg();
        if nneg == 0 {
            0.0
        } else {
            f64::from(self.fp) / f64::from(nneg)
        }
    }
}

/// Everything the filter metrics need about one (term, class) pair.
///
/// The histograms map exact occurrence counts `x ≥ 1` to the number of
/// documents containing the term exactly `x` times, inside and outside the
/// class; entries are sorted by `x` and never carry zero document counts.
#[derive(Debug, Clone, PartialEq)]
pub struct TermClassStats {
    pub table: ContingencyTable,
    /// Total raw occurrences of the term inside the class.
    pub pos_occurrences: u64,
    pub count_hist_pos: Vec<(u32, u32)>,
    pub count_hist_neg: Vec<(u32, u32)>,
}

impl TermClassStats {
    /// Average occurrences per class document.
    pub fn lambda_pos(&self) -> f64 {
        let npos = self.table.npos();
        if npos == 0 {
            0.0
        } else {
            self.pos_occurrences as f64 / f64::from(npos)
        }
    }

    /// Stats for a binary-presence view of a table: every containing
    /// document counts the term exactly once.
    pub fn from_binary_table(table: ContingencyTable) -> Self {
        let count_hist_pos = if table.tp > 0 { vec![(1, table.tp)] } else { vec![] };
        let count_hist_neg = if table.fp > 0 { vec![(1, table.fp)] } else { vec![] };
        Self {
            table,
            pos_occurrences: u64::from(table.tp),
            count_hist_pos,
            count_hist_neg,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct TermAgg {
    class_docs: Vec<u32>,
    class_occ: Vec<u64>,
    class_hist: Vec<Vec<(u32, u32)>>,
    total_docs: u32,
    total_hist: Vec<(u32, u32)>,
}

fn hist_add(hist: &mut Vec<(u32, u32)>, count: u32) {
    match hist.binary_search_by_key(&count, |&(x, _)| x) {
        Ok(i) => hist[i].1 += 1,
        Err(i) => hist.insert(i, (count, 1)),
    }
}

/// Aggregated per-term statistics over a whole training matrix; the compact
/// backing store behind [`TermClassStats`] assembly.
#[derive(Debug)]
pub struct CorpusTermStats {
    vocab: Arc<Vocabulary>,
    classes: Vec<String>,
    class_doc_counts: Vec<u32>,
    n_docs: u32,
    per_term: Vec<TermAgg>,
}

/// Computes exact one-vs-rest tables and count histograms for every
/// (term, class) pair of the matrix.
pub fn build_stats(matrix: &DocTermMatrix) -> Result<CorpusTermStats, RankError> {
    if matrix.classes().len() < 2 {
        return Err(RankError::SingleClass);
    }
    let n_classes = matrix.classes().len();
    let mut per_term: Vec<TermAgg> = (0..matrix.n_terms())
        .map(|_| TermAgg {
            class_docs: vec![0; n_classes],
            class_occ: vec![0; n_classes],
            class_hist: vec![Vec::new(); n_classes],
            total_docs: 0,
            total_hist: Vec::new(),
        })
        .collect();
    for row_idx in 0..matrix.n_docs() {
        let class = matrix.label_index(row_idx);
        for &(term, count) in matrix.row(row_idx) {
            if count == 0 {
                continue;
            }
            let agg = &mut per_term[term as usize];
            agg.class_docs[class] += 1;
            agg.class_occ[class] += u64::from(count);
            hist_add(&mut agg.class_hist[class], count);
            agg.total_docs += 1;
            hist_add(&mut agg.total_hist, count);
        }
    }
    Ok(CorpusTermStats {
        vocab: Arc::clone(matrix.vocab()),
        classes: matrix.classes().to_vec(),
        class_doc_counts: matrix.class_doc_counts(),
        n_docs: matrix.n_docs() as u32,
        per_term,
    })
}

impl CorpusTermStats {
    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn n_docs(&self) -> u32 {
        self.n_docs
    }

    pub fn n_terms(&self) -> usize {
        self.per_term.len()
    }

    /// Assembles the full stats for one (term, class) pair.
    pub fn stats(&self, term: u32, class: usize) -> TermClassStats {
        let agg = &self.per_term[term as usize];
        let npos = self.class_doc_counts[class];
        let nneg = self.n_docs - npos;
        let tp = agg.class_docs[class];
        let fp = agg.total_docs - tp;
        let table = ContingencyTable::new(tp, npos - tp, fp, nneg - fp);

        let count_hist_pos = agg.class_hist[class].clone();
        // neg histogram = aggregate minus the class's own contribution
        let mut count_hist_neg = Vec::with_capacity(agg.total_hist.len());
        for &(x, docs) in &agg.total_hist {
            let pos_docs = match count_hist_pos.binary_search_by_key(&x, |&(c, _)| c) {
                Ok(i) => count_hist_pos[i].1,
                Err(_) => 0,
            };
            if docs > pos_docs {
                count_hist_neg.push((x, docs - pos_docs));
            }
        }
        TermClassStats {
            table,
            pos_occurrences: agg.class_occ[class],
            count_hist_pos,
            count_hist_neg,
        }
    }
}
