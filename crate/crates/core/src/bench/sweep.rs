//! The experimental protocol: one stratified split per seed, one ranking
//! per metric, then a (metric × k × classifier) grid of training runs
//! scored with macro-F1.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::corpus::{stratified_split, Corpus};
use crate::models::{train_linear_svm, train_nb, ClassifierKind, SvmParams};
use crate::rank::{build_stats, rank_with_stats, select_top_k_union, FilterMetric};
use crate::vectorize::{apply_tfidf, compute_idf, count_matrix, DocTermMatrix, Vocabulary};

use super::eval::evaluate;
use super::BenchError;

/// Feature-count ladder used when none is configured; clipped to the
/// vocabulary size at selection time.
pub const DEFAULT_TEST_POINTS: [usize; 9] = [10, 20, 50, 100, 200, 500, 1000, 2000, 5000];

/// Full description of a sweep; echoed into every report for provenance.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub metrics: Vec<FilterMetric>,
    pub k_values: Vec<usize>,
    pub classifiers: Vec<ClassifierKind>,
    pub seed: u64,
    pub train_fraction: f64,
    pub nb_alpha: f64,
    /// SVM hyperparameters; the solver seed is taken from `seed`.
    pub svm: SvmParams,
    /// When off (the default), rendered reports print 0 in the wall_ms
    /// column so outputs stay byte-identical across runs and thread counts.
    pub emit_timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            metrics: FilterMetric::ALL.to_vec(),
            k_values: DEFAULT_TEST_POINTS.to_vec(),
            classifiers: ClassifierKind::ALL.to_vec(),
            seed: 42,
            train_fraction: 0.7,
            nb_alpha: 1.0,
            svm: SvmParams::default(),
            emit_timing: false,
        }
    }
}

/// Scores of one successful sweep cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub macro_f1: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    /// Size of the selected top-k union vocabulary.
    pub vocab_size: usize,
}

/// One (metric, k, classifier) cell; failures carry their message instead
/// of aborting the sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub metric: FilterMetric,
    pub k: usize,
    pub classifier: ClassifierKind,
    pub outcome: Result<CellResult, String>,
    pub wall_ms: u64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
}

fn validate(config: &SweepConfig) -> Result<(), BenchError> {
    if config.metrics.is_empty() {
        return Err(BenchError::EmptyConfig("metrics"));
    }
    if config.k_values.is_empty() {
        return Err(BenchError::EmptyConfig("k"));
    }
    if config.classifiers.is_empty() {
        return Err(BenchError::EmptyConfig("classifiers"));
    }
    if config.k_values.contains(&0) {
        return Err(BenchError::InvalidK);
    }
    Ok(())
}

/// Runs the whole protocol once. Ranking is computed once per metric; the
/// cells after it are independent and may run in parallel without changing
/// any output.
pub fn run_sweep(corpus: &Corpus, config: &SweepConfig) -> Result<SweepResult, BenchError> {
    validate(config)?;
    let split = stratified_split(corpus, config.train_fraction, config.seed)?;
    let vocab = Arc::new(Vocabulary::from_corpus(&split.train)?);
    let train_full = count_matrix(&split.train, &vocab)?;
    let test_full = count_matrix(&split.test, &vocab)?;
    let stats = build_stats(&train_full)?;

    let mut rows = Vec::with_capacity(
        config.metrics.len() * config.k_values.len() * config.classifiers.len(),
    );
    for &metric in &config.metrics {
        let ranked = rank_with_stats(&stats, metric);
        // cells of one metric are independent given the shared ranking
        let metric_rows: Vec<Vec<SweepRow>> = config
            .k_values
            .par_iter()
            .map(|&k| {
                let started = Instant::now();
                let prepared = prepare_cell(&ranked, k, &train_full, &test_full);
                let prep_ms = started.elapsed().as_millis() as u64;
                config
                    .classifiers
                    .iter()
                    .map(|&classifier| {
                        let cell_start = Instant::now();
                        let outcome = match &prepared {
                            Ok((train_m, test_m, vocab_size)) => run_cell(
                                classifier, config, train_m, test_m, *vocab_size,
                            ),
                            Err(e) => Err(e.clone()),
                        };
                        SweepRow {
                            metric,
                            k,
                            classifier,
                            outcome,
                            wall_ms: prep_ms + cell_start.elapsed().as_millis() as u64,
                        }
                    })
                    .collect()
            })
            .collect();
        rows.extend(metric_rows.into_iter().flatten());
    }
    Ok(SweepResult {
        config: config.clone(),
        rows,
    })
}

type PreparedCell = (DocTermMatrix, DocTermMatrix, usize);

fn prepare_cell(
    ranked: &std::collections::BTreeMap<String, crate::rank::RankedList>,
    k: usize,
    train_full: &DocTermMatrix,
    test_full: &DocTermMatrix,
) -> Result<PreparedCell, String> {
    let selected = select_top_k_union(ranked, k).map_err(|e| e.to_string())?;
    let vocab = Arc::new(selected.vocabulary().map_err(|e| e.to_string())?);
    let train_m = train_full.project(&vocab).map_err(|e| e.to_string())?;
    let test_m = test_full.project(&vocab).map_err(|e| e.to_string())?;
    Ok((train_m, test_m, selected.len()))
}

fn run_cell(
    classifier: ClassifierKind,
    config: &SweepConfig,
    train_m: &DocTermMatrix,
    test_m: &DocTermMatrix,
    vocab_size: usize,
) -> Result<CellResult, String> {
    let gold: Vec<String> = (0..test_m.n_docs())
        .map(|i| test_m.label(i).to_string())
        .collect();
    let predictions = match classifier {
        ClassifierKind::NaiveBayes => {
            let model = train_nb(train_m, config.nb_alpha).map_err(|e| e.to_string())?;
            model.predict_matrix(test_m).map_err(|e| e.to_string())?
        }
        ClassifierKind::LinearSvm => {
            let idf = compute_idf(train_m).map_err(|e| e.to_string())?;
            let wtrain = apply_tfidf(train_m, &idf, true).map_err(|e| e.to_string())?;
            let wtest = apply_tfidf(test_m, &idf, true).map_err(|e| e.to_string())?;
            let params = SvmParams {
                seed: config.seed,
                ..config.svm
            };
            let model = train_linear_svm(&wtrain, &params).map_err(|e| e.to_string())?;
            model.predict_matrix(&wtest).map_err(|e| e.to_string())?
        }
    };
    let report = evaluate(&gold, &predictions, train_m.classes()).map_err(|e| e.to_string())?;
    Ok(CellResult {
        macro_f1: report.macro_f1,
        macro_precision: report.macro_precision,
        macro_recall: report.macro_recall,
        vocab_size,
    })
}

/// One aggregated cell of a multi-seed sweep.
#[derive(Debug, Clone)]
pub struct MultiSweepRow {
    pub metric: FilterMetric,
    pub k: usize,
    pub classifier: ClassifierKind,
    /// Seeds whose cell succeeded.
    pub successes: usize,
    pub macro_f1_mean: f64,
    /// Sample standard deviation; 0 with fewer than two successes.
    pub macro_f1_std: f64,
    pub macro_precision_mean: f64,
    pub macro_recall_mean: f64,
    pub vocab_size_mean: f64,
}

#[derive(Debug, Clone)]
pub struct MultiSweepResult {
    pub config: SweepConfig,
    pub seeds: Vec<u64>,
    pub rows: Vec<MultiSweepRow>,
}

/// Replicates the sweep across seeds and aggregates mean ± stdev per cell.
pub fn run_sweep_multi(
    corpus: &Corpus,
    config: &SweepConfig,
    seeds: &[u64],
) -> Result<MultiSweepResult, BenchError> {
    if seeds.is_empty() {
        return Err(BenchError::EmptyConfig("seeds"));
    }
    let mut per_seed = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let cfg = SweepConfig {
            seed,
            ..config.clone()
        };
        per_seed.push(run_sweep(corpus, &cfg)?);
    }
    let n_rows = per_seed[0].rows.len();
    let mut rows = Vec::with_capacity(n_rows);
    for i in 0..n_rows {
        let template = &per_seed[0].rows[i];
        let cells: Vec<&CellResult> = per_seed
            .iter()
            .filter_map(|r| r.rows[i].outcome.as_ref().ok())
            .collect();
        let n = cells.len();
        let mean = |f: &dyn Fn(&CellResult) -> f64| {
            if n == 0 {
                f64::NAN
            } else {
                cells.iter().map(|c| f(c)).sum::<f64>() / n as f64
            }
        };
        let f1_mean = mean(&|c: &CellResult| c.macro_f1);
        let f1_std = if n >= 2 {
            let var = cells
                .iter()
                .map(|c| (c.macro_f1 - f1_mean).powi(2))
                .sum::<f64>()
                / (n - 1) as f64;
            var.sqrt()
        } else {
            0.0
        };
        rows.push(MultiSweepRow {
            metric: template.metric,
            k: template.k,
            classifier: template.classifier,
            successes: n,
            macro_f1_mean: f1_mean,
            macro_f1_std: f1_std,
            macro_precision_mean: mean(&|c: &CellResult| c.macro_precision),
            macro_recall_mean: mean(&|c: &CellResult| c.macro_recall),
            vocab_size_mean: mean(&|c: &CellResult| c.vocab_size as f64),
        });
    }
    Ok(MultiSweepResult {
        config: config.clone(),
        seeds: seeds.to_vec(),
        rows,
    })
}
