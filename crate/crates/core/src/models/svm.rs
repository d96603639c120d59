//! One-vs-rest linear SVM trained by dual coordinate descent.
//!
//! Per class, solves the L2-regularized L1-loss (hinge) SVM in the dual,
//! one variable at a time, with per-instance cost `C_i = C · class_weight`
//! of the instance's true class and the bias folded in as a constant-1
//! feature. Instance visit order is a fresh seeded permutation every epoch,
//! so training is bit-reproducible for a fixed seed regardless of thread
//! count.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::util::shuffle;
use crate::vectorize::{Vocabulary, WeightedMatrix};

use super::nb::argmax;
use super::ModelError;

/// Solver hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    /// Misclassification cost. Scaled per instance by the balanced class
    /// weight `N / (K · N_c)`.
    pub c: f64,
    /// Stop once the largest projected-gradient violation in an epoch falls
    /// below this.
    pub tol: f64,
    pub max_epochs: u32,
    /// Base seed; class `k` trains with `seed ^ k`.
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            tol: 1e-4,
            max_epochs: 1000,
            seed: 0,
        }
    }
}

/// Convergence record of one binary subproblem.
#[derive(Debug, Clone)]
pub struct ClassTraining {
    pub class_label: String,
    pub epochs: u32,
    pub converged: bool,
    /// Largest projected-gradient violation seen in the final epoch.
    pub final_violation: f64,
    /// Dual objective after each epoch; non-decreasing. In-memory
    /// diagnostic only, not persisted with the model.
    pub dual_objective: Vec<f64>,
}

/// Trained one-vs-rest linear model: a weight vector and bias per class.
///
/// The model also records the input representation it was trained on (the
/// IDF vector and whether rows were L2-normalized) so saved models can
/// vectorize fresh documents identically.
#[derive(Debug, Clone)]
pub struct LinearModel {
    classes: Vec<String>,
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
    params: SvmParams,
    class_weights: Vec<f64>,
    vocab: Arc<Vocabulary>,
    idf: Vec<f64>,
    input_normalized: bool,
    training: Vec<ClassTraining>,
}

/// Balanced class weights `N / (K · N_c)`, in class order.
pub(crate) fn balanced_class_weights(class_counts: &[u32]) -> Vec<f64> {
    let n: u32 = class_counts.iter().sum();
    let k = class_counts.len() as f64;
    class_counts
        .iter()
        .map(|&nc| f64::from(n) / (k * f64::from(nc)))
        .collect()
}

pub fn train_linear_svm(
    matrix: &WeightedMatrix,
    params: &SvmParams,
) -> Result<LinearModel, ModelError> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
    if !(params.c > 0.0) {
        return Err(ModelError::InvalidCost(params.c));
    }
    let classes = matrix.classes().to_vec();
    if classes.len() < 2 {
        return Err(ModelError::SingleClass);
    }
    for row in 0..matrix.n_docs() {
        if matrix.row(row).iter().any(|&(_, v)| !v.is_finite()) {
            return Err(ModelError::NonFinite);
        }
    }

    let class_weights = balanced_class_weights(&matrix.class_doc_counts());
    let n_terms = matrix.n_terms();

    // per-instance cost and squared norm (with the bias coordinate)
    let costs: Vec<f64> = (0..matrix.n_docs())
        .map(|i| params.c * class_weights[matrix.label_index(i)])
        .collect();
    let q_diag: Vec<f64> = (0..matrix.n_docs())
        .map(|i| matrix.row(i).iter().map(|&(_, v)| v * v).sum::<f64>() + 1.0)
        .collect();

    // independent binary problems; derived seeds keep results identical
    // under any parallel schedule
    let per_class: Vec<(Vec<f64>, f64, ClassTraining)> = classes
        .par_iter()
        .enumerate()
        .map(|(class_idx, class)| {
            train_one_class(matrix, params, &costs, &q_diag, class_idx, class)
        })
        .collect();

    let mut weights = Vec::with_capacity(classes.len());
    let mut bias = Vec::with_capacity(classes.len());
    let mut training = Vec::with_capacity(classes.len());
    for (w, b, t) in per_class {
        debug_assert_eq!(w.len(), n_terms);
        weights.push(w);
        bias.push(b);
        training.push(t);
    }
    Ok(LinearModel {
        classes,
        weights,
        bias,
        params: *params,
        class_weights,
        vocab: Arc::clone(matrix.vocab()),
        idf: matrix.idf().to_vec(),
        input_normalized: matrix.row_normalized(),
        training,
    })
}

fn train_one_class(
    matrix: &WeightedMatrix,
    params: &SvmParams,
    costs: &[f64],
    q_diag: &[f64],
    class_idx: usize,
    class: &str,
) -> (Vec<f64>, f64, ClassTraining) {
    let n = matrix.n_docs();
    let n_terms = matrix.n_terms();
    let y: Vec<f64> = (0..n)
        .map(|i| if matrix.label_index(i) == class_idx { 1.0 } else { -1.0 })
        .collect();

    let mut alpha = vec![0.0f64; n];
    // w has one extra coordinate for the bias feature
    let mut w = vec![0.0f64; n_terms + 1];
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ class_idx as u64);
    let mut order: Vec<usize> = (0..n).collect();

    let mut objective = Vec::new();
    let mut epochs = 0;
    let mut converged = false;
    let mut final_violation = f64::INFINITY;

    while epochs < params.max_epochs {
        shuffle(&mut order, &mut rng);
        let mut violation: f64 = 0.0;
        for &i in &order {
            let row = matrix.row(i);
            let margin: f64 =
                row.iter().map(|&(t, v)| w[t as usize] * v).sum::<f64>() + w[n_terms];
            let g = y[i] * margin - 1.0;
            let pg = if alpha[i] == 0.0 {
                g.min(0.0)
            } else if alpha[i] == costs[i] {
                g.max(0.0)
            } else {
                g
            };
            violation = violation.max(pg.abs());
            if pg.abs() > 1e-12 {
                let old = alpha[i];
                alpha[i] = (old - g / q_diag[i]).clamp(0.0, costs[i]);
                let delta = (alpha[i] - old) * y[i];
                for &(t, v) in row {
                    w[t as usize] += delta * v;
                }
                w[n_terms] += delta;
            }
        }
        epochs += 1;
        let norm_sq: f64 = w.iter().map(|v| v * v).sum();
        let alpha_sum: f64 = alpha.iter().sum();
        objective.push(alpha_sum - 0.5 * norm_sq);
        final_violation = violation;
        if violation < params.tol {
            converged = true;
            break;
        }
    }
    debug_assert!(alpha
        .iter()
        .zip(costs)
        .all(|(&a, &c)| (0.0..=c).contains(&a)));

    let bias = w[n_terms];
    w.truncate(n_terms);
    (
        w,
        bias,
        ClassTraining {
            class_label: class.to_string(),
            epochs,
            converged,
            final_violation,
            dual_objective: objective,
        },
    )
}

impl LinearModel {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        classes: Vec<String>,
        weights: Vec<Vec<f64>>,
        bias: Vec<f64>,
        params: SvmParams,
        class_weights: Vec<f64>,
        vocab: Arc<Vocabulary>,
        idf: Vec<f64>,
        input_normalized: bool,
        training: Vec<ClassTraining>,
    ) -> Self {
        Self {
            classes,
            weights,
            bias,
            params,
            class_weights,
            vocab,
            idf,
            input_normalized,
            training,
        }
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn params(&self) -> &SvmParams {
        &self.params
    }

    pub fn class_weights(&self) -> &[f64] {
        &self.class_weights
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    /// IDF vector of the training representation.
    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    /// Whether training rows were L2-normalized.
    pub fn input_normalized(&self) -> bool {
        self.input_normalized
    }

    /// Per-class convergence diagnostics from training.
    pub fn training(&self) -> &[ClassTraining] {
        &self.training
    }

    /// True when every one-vs-rest subproblem reached its tolerance.
    pub fn converged(&self) -> bool {
        self.training.iter().all(|t| t.converged)
    }

    /// Per-class margins `w_c · x + b_c` and the argmax label; ties break
    /// by class order.
    pub fn predict(&self, doc: &[(u32, f64)]) -> Result<(String, Vec<f64>), ModelError> {
        let n_terms = self.vocab.len();
        for &(t, _) in doc {
            if t as usize >= n_terms {
                return Err(ModelError::DimensionMismatch {
                    expected: n_terms,
                    got: t as usize + 1,
                });
            }
        }
        let margins: Vec<f64> = self
            .weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| doc.iter().map(|&(t, v)| w[t as usize] * v).sum::<f64>() + b)
            .collect();
        let best = argmax(&margins);
        Ok((self.classes[best].clone(), margins))
    }

    pub fn predict_matrix(&self, matrix: &WeightedMatrix) -> Result<Vec<String>, ModelError> {
        if matrix.vocab().hash64() != self.vocab.hash64() {
            return Err(ModelError::VocabMismatch);
        }
        (0..matrix.n_docs())
            .map(|row| self.predict(matrix.row(row)).map(|(label, _)| label))
            .collect()
    }
}
