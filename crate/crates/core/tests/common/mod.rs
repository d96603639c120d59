//! Shared fixtures and independent numeric references for integration
//! tests. Everything here is deliberately written from first principles,
//! separate from the library's own code paths, so it can serve as an
//! oracle against them.

#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tasnif_core::corpus::{Corpus, Document};

/// A synthetic corpus where each class owns `planted_per_class` exclusive
/// marker terms present once in every document of that class, on top of a
/// shared pool of uniformly sprinkled noise terms.
///
/// Returns the corpus and, per class (in sorted class order), its planted
/// terms.
pub fn planted_corpus(
    n_classes: usize,
    docs_per_class: usize,
    planted_per_class: usize,
    noise_terms: usize,
    noise_per_doc: usize,
    seed: u64,
) -> (Corpus, Vec<Vec<String>>) {
    let class_names: Vec<String> = (0..n_classes).map(|c| format!("class{c:02}")).collect();
    let planted: Vec<Vec<String>> = (0..n_classes)
        .map(|c| {
            (0..planted_per_class)
                .map(|t| format!("plant_c{c:02}_{t:03}"))
                .collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs = Vec::new();
    let mut token_lists: Vec<Vec<String>> = Vec::new();
    for (c, class) in class_names.iter().enumerate() {
        for d in 0..docs_per_class {
            let mut tokens: Vec<String> = planted[c].clone();
            for _ in 0..noise_per_doc {
                let t = rng.random_range(0..noise_terms);
                tokens.push(format!("noise_{t:05}"));
            }
            docs.push(Document::new(format!("{class}-{d:03}"), class.clone(), "body"));
            token_lists.push(tokens);
        }
    }
    let corpus = Corpus::from_documents(docs).expect("synthetic corpus is valid");
    let corpus = corpus.with_tokens(move |doc| {
        token_lists[doc_index(doc, docs_per_class)].clone()
    });
    (corpus, planted)
}

fn doc_index(doc: &Document, docs_per_class: usize) -> usize {
    let (class, num) = doc.id.split_once('-').expect("id format");
    let c: usize = class.trim_start_matches("class").parse().expect("class number");
    let d: usize = num.parse().expect("doc number");
    c * docs_per_class + d
}

/// Standard normal CDF via the Taylor series of erf, accurate to ~1e-14
/// absolute for |z| ≤ 6. Independent of the library's rational
/// approximation.
pub fn ref_phi(z: f64) -> f64 {
    0.5 * (1.0 + ref_erf(z / std::f64::consts::SQRT_2))
}

fn ref_erf(x: f64) -> f64 {
    // erf(x) = 2/√π · Σ (−1)^n x^(2n+1) / (n! (2n+1))
    const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
    let mut term = x; // x^(2n+1)/n!
    let mut sum = x;
    let x2 = x * x;
    let mut n = 1.0;
    loop {
        term *= -x2 / n;
        let contrib = term / (2.0 * n + 1.0);
        sum += contrib;
        if contrib.abs() < 1e-20 {
            break;
        }
        n += 1.0;
        if n > 200.0 {
            break;
        }
    }
    TWO_OVER_SQRT_PI * sum
}

/// Inverse of [`ref_phi`] by bisection; |error| ≤ ~1e-13 on the grid this
/// suite uses.
pub fn ref_inv_phi(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0);
    let (mut lo, mut hi) = (-8.0f64, 8.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if ref_phi(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Brute-force evaluator of the metric formula table, written directly
/// from raw counts and histograms with its own guards and its own normal
/// quantile. The implementation under test must match it to 1e-9.
pub mod oracle {
    use super::ref_inv_phi;
    use std::collections::BTreeMap;

    pub const EPS: f64 = 0.0005;

    #[allow(clippy::manual_clamp)] // written long-hand on purpose: this is the oracle
    fn clamp(x: f64) -> f64 {
        if x < EPS {
            EPS
        } else if x > 1.0 - EPS {
            1.0 - EPS
        } else {
            x
        }
    }

    pub struct RawStats {
        pub tp: u32,
        pub fn_: u32,
        pub fp: u32,
        pub tn: u32,
        pub hist_pos: Vec<(u32, u32)>,
        pub hist_neg: Vec<(u32, u32)>,
        pub pos_occ: u64,
    }

    impl RawStats {
        pub fn binary(tp: u32, fn_: u32, fp: u32, tn: u32) -> Self {
            Self {
                tp,
                fn_,
                fp,
                tn,
                hist_pos: if tp > 0 { vec![(1, tp)] } else { vec![] },
                hist_neg: if fp > 0 { vec![(1, fp)] } else { vec![] },
                pos_occ: u64::from(tp),
            }
        }
    }

    pub fn score(metric: &str, s: &RawStats) -> f64 {
        let npos = f64::from(s.tp + s.fn_);
        let nneg = f64::from(s.fp + s.tn);
        let n = npos + nneg;
        let tpr = if npos > 0.0 { f64::from(s.tp) / npos } else { 0.0 };
        let fpr = if nneg > 0.0 { f64::from(s.fp) / nneg } else { 0.0 };
        match metric {
            "acc2" => (tpr - fpr).abs(),
            "ndm" => (tpr - fpr).abs() / clamp(tpr).min(clamp(fpr)),
            "mmr" => {
                clamp(tpr).max(clamp(fpr)) * (tpr - fpr).abs() / clamp(tpr).min(clamp(fpr))
            }
            "ig" => {
                let joints = [
                    (f64::from(s.tp), f64::from(s.tp + s.fp), npos),
                    (f64::from(s.fp), f64::from(s.tp + s.fp), nneg),
                    (f64::from(s.fn_), f64::from(s.fn_ + s.tn), npos),
                    (f64::from(s.tn), f64::from(s.fn_ + s.tn), nneg),
                ];
                let mut total = 0.0;
                for (cell, t_marginal, c_marginal) in joints {
                    if cell > 0.0 {
                        let p_joint = cell / n;
                        let p_t = t_marginal / n;
                        let p_c = c_marginal / n;
                        total += p_joint * (p_joint / (p_t * p_c)).ln();
                    }
                }
                total
            }
            "chisq" => {
                let present = f64::from(s.tp + s.fp);
                let absent = f64::from(s.fn_ + s.tn);
                if present == 0.0 || absent == 0.0 || npos == 0.0 || nneg == 0.0 {
                    return 0.0;
                }
                let det = f64::from(s.tp) * f64::from(s.tn) - f64::from(s.fp) * f64::from(s.fn_);
                n * det * det / (present * absent * npos * nneg)
            }
            "or" => {
                let num = (f64::from(s.tp) + 0.5) * (f64::from(s.tn) + 0.5);
                let den = (f64::from(s.fp) + 0.5) * (f64::from(s.fn_) + 0.5);
                (num / den).ln()
            }
            "bns" => (ref_inv_phi(clamp(tpr)) - ref_inv_phi(clamp(fpr))).abs(),
            "gini" => {
                if s.tp + s.fp == 0 || npos == 0.0 {
                    return 0.0;
                }
                let a = f64::from(s.tp) / npos;
                let b = f64::from(s.tp) / f64::from(s.tp + s.fp);
                a * a * b * b
            }
            "rdc" => {
                let mut by_count: BTreeMap<u32, (f64, f64)> = BTreeMap::new();
                for &(x, d) in &s.hist_pos {
                    by_count.entry(x).or_default().0 += f64::from(d) / npos;
                }
                for &(x, d) in &s.hist_neg {
                    by_count.entry(x).or_default().1 += f64::from(d) / nneg;
                }
                by_count
                    .into_iter()
                    .map(|(x, (tpr_x, fpr_x))| (tpr_x - fpr_x).abs() / f64::from(x))
                    .sum()
            }
            "pois" => {
                if npos == 0.0 {
                    return 0.0;
                }
                let lambda = s.pos_occ as f64 / npos;
                if lambda == 0.0 {
                    return 0.0;
                }
                let expected = npos * (1.0 - (-lambda).exp());
                let variance = npos * (1.0 - (-lambda).exp()) * (-lambda).exp();
                if variance > 0.0 {
                    ((f64::from(s.tp) - expected) / variance.sqrt()).abs()
                } else {
                    0.0
                }
            }
            other => panic!("oracle has no metric `{other}`"),
        }
    }
}
