//! Multinomial Naive Bayes on raw term counts with Laplace smoothing.

use std::sync::Arc;

use crate::vectorize::{DocTermMatrix, Vocabulary};

use super::ModelError;

/// Trained multinomial Naive Bayes parameters. Priors come from training
/// class frequencies; likelihoods carry additive smoothing `alpha`.
#[derive(Debug, Clone)]
pub struct NBModel {
    classes: Vec<String>,
    log_prior: Vec<f64>,
    /// `log_likelihood[class][term] = ln((count + α) / (total + α·|V|))`
    log_likelihood: Vec<Vec<f64>>,
    alpha: f64,
    vocab: Arc<Vocabulary>,
}

/// Fits priors and smoothed per-class term likelihoods from an integer
/// count matrix.
pub fn train_nb(matrix: &DocTermMatrix, alpha: f64) -> Result<NBModel, ModelError> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
    if !(alpha > 0.0) {
        return Err(ModelError::InvalidAlpha(alpha));
    }
    let classes = matrix.classes().to_vec();
    if classes.len() < 2 {
        return Err(ModelError::SingleClass);
    }
    let n_terms = matrix.n_terms();
    let n_docs = matrix.n_docs() as f64;

    let mut term_counts = vec![vec![0u64; n_terms]; classes.len()];
    for row in 0..matrix.n_docs() {
        let class = matrix.label_index(row);
        for &(t, c) in matrix.row(row) {
            term_counts[class][t as usize] += u64::from(c);
        }
    }

    let class_docs = matrix.class_doc_counts();
    let log_prior = class_docs
        .iter()
        .map(|&n| (f64::from(n) / n_docs).ln())
        .collect();
    let log_likelihood = term_counts
        .iter()
        .map(|counts| {
            let total: u64 = counts.iter().sum();
            let denom = total as f64 + alpha * n_terms as f64;
            counts
                .iter()
                .map(|&c| ((c as f64 + alpha) / denom).ln())
                .collect()
        })
        .collect();
    Ok(NBModel {
        classes,
        log_prior,
        log_likelihood,
        alpha,
        vocab: Arc::clone(matrix.vocab()),
    })
}

impl NBModel {
    pub(crate) fn from_parts(
        classes: Vec<String>,
        log_prior: Vec<f64>,
        log_likelihood: Vec<Vec<f64>>,
        alpha: f64,
        vocab: Arc<Vocabulary>,
    ) -> Self {
        Self {
            classes,
            log_prior,
            log_likelihood,
            alpha,
            vocab,
        }
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn log_prior(&self) -> &[f64] {
        &self.log_prior
    }

    pub fn log_likelihood(&self) -> &[Vec<f64>] {
        &self.log_likelihood
    }

    /// Joint log-posterior (up to the shared evidence constant) per class
    /// for one sparse count vector, and the argmax label. Ties break by
    /// class order.
    pub fn predict(&self, doc: &[(u32, u32)]) -> Result<(String, Vec<f64>), ModelError> {
        let n_terms = self.vocab.len();
        let mut scores = self.log_prior.clone();
        for &(t, c) in doc {
            if t as usize >= n_terms {
                return Err(ModelError::DimensionMismatch {
                    expected: n_terms,
                    got: t as usize + 1,
                });
            }
            for (class, score) in scores.iter_mut().enumerate() {
                *score += f64::from(c) * self.log_likelihood[class][t as usize];
            }
        }
        let best = argmax(&scores);
        Ok((self.classes[best].clone(), scores))
    }

    /// Predicts every row of a count matrix built over the same vocabulary.
    pub fn predict_matrix(&self, matrix: &DocTermMatrix) -> Result<Vec<String>, ModelError> {
        if matrix.vocab().hash64() != self.vocab.hash64() {
            return Err(ModelError::VocabMismatch);
        }
        (0..matrix.n_docs())
            .map(|row| self.predict(matrix.row(row)).map(|(label, _)| label))
            .collect()
    }
}

/// First index of the maximal value; ties resolve to the earliest class.
pub(crate) fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Corpus, Document};
    use crate::vectorize::count_matrix;

    /// 2 classes, 2 docs each, disjoint single-term docs.
    fn toy_matrix() -> DocTermMatrix {
        let docs = vec![
            Document::new("a1", "A", "x"),
            Document::new("a2", "A", "x"),
            Document::new("b1", "B", "x"),
            Document::new("b2", "B", "x"),
        ];
        let corpus = Corpus::from_documents(docs).unwrap();
        let corpus = corpus.with_tokens(|d| {
            if d.class_label == "A" {
                vec!["alpha_term".into()]
            } else {
                vec!["beta_term".into()]
            }
        });
        let vocab = Arc::new(Vocabulary::from_corpus(&corpus).unwrap());
        count_matrix(&corpus, &vocab).unwrap()
    }

    #[test]
    fn four_doc_toy_matches_hand_bayes() {
        let m = toy_matrix();
        let model = train_nb(&m, 1.0).unwrap();
        // priors: 2/4 each
        for lp in model.log_prior() {
            assert!((lp - 0.5f64.ln()).abs() < 1e-15);
        }
        // class A: count(alpha)=2, count(beta)=0, total=2, |V|=2
        // P(alpha|A) = (2+1)/(2+2) = 3/4, P(beta|A) = 1/4
        let a = model.classes().iter().position(|c| c == "A").unwrap();
        let alpha_idx = m.vocab().index_of("alpha_term").unwrap() as usize;
        let beta_idx = m.vocab().index_of("beta_term").unwrap() as usize;
        assert!((model.log_likelihood()[a][alpha_idx] - 0.75f64.ln()).abs() < 1e-15);
        assert!((model.log_likelihood()[a][beta_idx] - 0.25f64.ln()).abs() < 1e-15);
        // every training doc classified correctly
        let preds = model.predict_matrix(&m).unwrap();
        assert_eq!(preds, vec!["A", "A", "B", "B"]);
    }

    #[test]
    fn likelihood_rows_normalize() {
        let m = toy_matrix();
        let model = train_nb(&m, 1.0).unwrap();
        for row in model.log_likelihood() {
            let sum: f64 = row.iter().map(|l| l.exp()).sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
        let prior_sum: f64 = model.log_prior().iter().map(|l| l.exp()).sum();
        assert!((prior_sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn smoothing_keeps_unseen_terms_positive() {
        let m = toy_matrix();
        let model = train_nb(&m, 1.0).unwrap();
        for row in model.log_likelihood() {
            for &l in row {
                assert!(l.is_finite());
            }
        }
    }

    #[test]
    fn empty_document_falls_back_to_priors() {
        let docs = vec![
            Document::new("a1", "A", "x"),
            Document::new("a2", "A", "x"),
            Document::new("a3", "A", "x"),
            Document::new("b1", "B", "x"),
        ];
        let corpus = Corpus::from_documents(docs).unwrap();
        let corpus = corpus.with_tokens(|d| {
            if d.class_label == "A" {
                vec!["t".into()]
            } else {
                vec!["u".into()]
            }
        });
        let vocab = Arc::new(Vocabulary::from_corpus(&corpus).unwrap());
        let m = count_matrix(&corpus, &vocab).unwrap();
        let model = train_nb(&m, 1.0).unwrap();
        // empty doc: argmax of priors alone → majority class A
        let (label, scores) = model.predict(&[]).unwrap();
        assert_eq!(label, "A");
        assert_eq!(scores.len(), 2);
    }

    #[test]
    fn equal_likelihood_term_never_moves_the_argmax() {
        // "shared" occurs with the same count in both classes, so its
        // likelihood is identical and adding it shifts every score equally
        let docs = vec![
            Document::new("a1", "A", "x"),
            Document::new("a2", "A", "x"),
            Document::new("b1", "B", "x"),
            Document::new("b2", "B", "x"),
        ];
        let corpus = Corpus::from_documents(docs).unwrap();
        let corpus = corpus.with_tokens(|d| {
            if d.class_label == "A" {
                vec!["alpha".into(), "shared".into()]
            } else {
                vec!["beta".into(), "shared".into()]
            }
        });
        let vocab = Arc::new(Vocabulary::from_corpus(&corpus).unwrap());
        let m = count_matrix(&corpus, &vocab).unwrap();
        let model = train_nb(&m, 1.0).unwrap();

        let alpha = vocab.index_of("alpha").unwrap();
        let shared = vocab.index_of("shared").unwrap();
        let (plain_label, plain) = model.predict(&[(alpha, 1)]).unwrap();
        let (padded_label, padded) = model.predict(&[(alpha, 1), (shared, 5)]).unwrap();
        assert_eq!(plain_label, padded_label);
        let shift = padded[0] - plain[0];
        assert!((padded[1] - plain[1] - shift).abs() < 1e-12);
    }

    #[test]
    fn invalid_alpha_rejected() {
        let m = toy_matrix();
        assert!(matches!(train_nb(&m, 0.0), Err(ModelError::InvalidAlpha(_))));
        assert!(matches!(train_nb(&m, -1.0), Err(ModelError::InvalidAlpha(_))));
    }

    #[test]
    fn out_of_vocabulary_index_rejected() {
        let m = toy_matrix();
        let model = train_nb(&m, 1.0).unwrap();
        assert!(matches!(
            model.predict(&[(99, 1)]),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn tie_breaks_by_class_order() {
        assert_eq!(argmax(&[1.0, 1.0, 0.5]), 0);
        assert_eq!(argmax(&[0.1, 1.0, 1.0]), 1);
    }
}
