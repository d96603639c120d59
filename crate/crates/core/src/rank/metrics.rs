//! The ten filter-based feature ranking metrics, all computed one-vs-rest
//! per class from [`TermClassStats`].
//!
//! Guarded rates use a single constant ε = 0.0005 (Forman's BNS guard):
//! x' = clamp(x, ε, 1 − ε). Every score is a finite real for any valid
//! stats, so rankings never have to handle NaN or infinity.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::normal::inverse_normal_cdf;
use super::stats::TermClassStats;

/// Rate guard shared by NDM, MMR, and BNS.
pub const RATE_GUARD_EPSILON: f64 = 0.0005;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown metric `{0}`; expected one of acc2, ndm, mmr, rdc, ig, chisq, or, bns, gini, pois")]
pub struct ParseMetricError(pub String);

/// Identifier of a filter feature-selection metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FilterMetric {
    /// Balanced accuracy: |tpr − fpr|.
    Acc2,
    /// Normalized difference measure: |tpr − fpr| / min(tpr', fpr').
    Ndm,
    /// Max-min ratio: max(tpr', fpr') · |tpr − fpr| / min(tpr', fpr').
    Mmr,
    /// Relative discrimination criterion over exact-count histograms.
    Rdc,
    /// Information gain (mutual information of term presence and class).
    Ig,
    /// Chi-squared statistic of the 2×2 table.
    Chisq,
    /// Log odds ratio with Haldane–Anscombe 0.5 correction; signed.
    OddsRatio,
    /// Bi-normal separation: |Φ⁻¹(tpr') − Φ⁻¹(fpr')|.
    Bns,
    /// Gini index contribution: P(t|c)² · P(c|t)².
    Gini,
    /// Poisson ratio: standardized deviation of observed document frequency
    /// from the Poisson expectation.
    Poisson,
}

impl FilterMetric {
    pub const ALL: [FilterMetric; 10] = [
        FilterMetric::Acc2,
        FilterMetric::Ndm,
        FilterMetric::Mmr,
        FilterMetric::Rdc,
        FilterMetric::Ig,
        FilterMetric::Chisq,
        FilterMetric::OddsRatio,
        FilterMetric::Bns,
        FilterMetric::Gini,
        FilterMetric::Poisson,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            FilterMetric::Acc2 => "acc2",
            FilterMetric::Ndm => "ndm",
            FilterMetric::Mmr => "mmr",
            FilterMetric::Rdc => "rdc",
            FilterMetric::Ig => "ig",
            FilterMetric::Chisq => "chisq",
            FilterMetric::OddsRatio => "or",
            FilterMetric::Bns => "bns",
            FilterMetric::Gini => "gini",
            FilterMetric::Poisson => "pois",
        }
    }
}

impl fmt::Display for FilterMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for FilterMetric {
    type Err = ParseMetricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "acc2" => Ok(FilterMetric::Acc2),
            "ndm" => Ok(FilterMetric::Ndm),
            "mmr" => Ok(FilterMetric::Mmr),
            "rdc" => Ok(FilterMetric::Rdc),
            "ig" => Ok(FilterMetric::Ig),
            "chisq" => Ok(FilterMetric::Chisq),
            "or" => Ok(FilterMetric::OddsRatio),
            "bns" => Ok(FilterMetric::Bns),
            "gini" => Ok(FilterMetric::Gini),
            "pois" => Ok(FilterMetric::Poisson),
            other => Err(ParseMetricError(other.to_string())),
        }
    }
}

fn clamp_rate(x: f64) -> f64 {
    x.clamp(RATE_GUARD_EPSILON, 1.0 - RATE_GUARD_EPSILON)
}

/// Scores one (term, class) pair. Always finite and deterministic.
pub fn metric_score(metric: FilterMetric, stats: &TermClassStats) -> f64 {
    let t = &stats.table;
    match metric {
        FilterMetric::Acc2 => (t.tpr() - t.fpr()).abs(),
        FilterMetric::Ndm => {
            let denom = clamp_rate(t.tpr()).min(clamp_rate(t.fpr()));
            (t.tpr() - t.fpr()).abs() / denom
        }
        FilterMetric::Mmr => {
            let tpr = clamp_rate(t.tpr());
            let fpr = clamp_rate(t.fpr());
            tpr.max(fpr) * (t.tpr() - t.fpr()).abs() / tpr.min(fpr)
        }
        FilterMetric::Rdc => rdc(stats),
        FilterMetric::Ig => information_gain(t),
        FilterMetric::Chisq => chi_squared(t),
        FilterMetric::OddsRatio => {
            let num = (f64::from(t.tp) + 0.5) * (f64::from(t.tn) + 0.5);
            let den = (f64::from(t.fp) + 0.5) * (f64::from(t.fn_) + 0.5);
            (num / den).ln()
        }
        FilterMetric::Bns => {
            let zp = inverse_normal_cdf(clamp_rate(t.tpr())).expect("clamped rate");
            let zn = inverse_normal_cdf(clamp_rate(t.fpr())).expect("clamped rate");
            (zp - zn).abs()
        }
        FilterMetric::Gini => {
            let present = t.tp + t.fp;
            if present == 0 || t.npos() == 0 {
                return 0.0;
            }
            let p_t_given_c = f64::from(t.tp) / f64::from(t.npos());
            let p_c_given_t = f64::from(t.tp) / f64::from(present);
            p_t_given_c * p_t_given_c * p_c_given_t * p_c_given_t
        }
        FilterMetric::Poisson => poisson_ratio(stats),
    }
}

fn information_gain(t: &super::stats::ContingencyTable) -> f64 {
    let n = f64::from(t.n());
    if n == 0.0 {
        return 0.0;
    }
    let p_pos = f64::from(t.npos()) / n;
    let p_neg = f64::from(t.nneg()) / n;
    let p_present = f64::from(t.tp + t.fp) / n;
    let p_absent = f64::from(t.fn_ + t.tn) / n;
    // joint cells paired with their marginals; 0 · ln(0/…) := 0
    let cells = [
        (f64::from(t.tp) / n, p_present, p_pos),
        (f64::from(t.fp) / n, p_present, p_neg),
        (f64::from(t.fn_) / n, p_absent, p_pos),
        (f64::from(t.tn) / n, p_absent, p_neg),
    ];
    let mut ig = 0.0;
    for (joint, p_t, p_c) in cells {
        if joint > 0.0 {
            ig += joint * (joint / (p_t * p_c)).ln();
        }
    }
    ig
}

fn chi_squared(t: &super::stats::ContingencyTable) -> f64 {
    let present = f64::from(t.tp + t.fp);
    let absent = f64::from(t.fn_ + t.tn);
    let npos = f64::from(t.npos());
    let nneg = f64::from(t.nneg());
    if present == 0.0 || absent == 0.0 || npos == 0.0 || nneg == 0.0 {
        return 0.0;
    }
    let diff = f64::from(t.tp) * f64::from(t.tn) - f64::from(t.fp) * f64::from(t.fn_);
    f64::from(t.n()) * diff * diff / (present * absent * npos * nneg)
}

fn rdc(stats: &TermClassStats) -> f64 {
    let npos = f64::from(stats.table.npos());
    let nneg = f64::from(stats.table.nneg());
    if npos == 0.0 || nneg == 0.0 {
        return 0.0;
    }
    let (pos, neg) = (&stats.count_hist_pos, &stats.count_hist_neg);
    let (mut i, mut j) = (0usize, 0usize);
    let mut sum = 0.0;
    while i < pos.len() || j < neg.len() {
        let x_pos = pos.get(i).map(|&(x, _)| x);
        let x_neg = neg.get(j).map(|&(x, _)| x);
        let (x, tpr_x, fpr_x) = match (x_pos, x_neg) {
            (Some(a), Some(b)) if a == b => {
                let v = (a, f64::from(pos[i].1) / npos, f64::from(neg[j].1) / nneg);
                i += 1;
                j += 1;
                v
            }
            (Some(a), Some(b)) if a < b => {
                let v = (a, f64::from(pos[i].1) / npos, 0.0);
                i += 1;
                v
            }
            (Some(_), Some(b)) => {
                let v = (b, 0.0, f64::from(neg[j].1) / nneg);
                j += 1;
                v
            }
            (Some(a), None) => {
                let v = (a, f64::from(pos[i].1) / npos, 0.0);
                i += 1;
                v
            }
            (None, Some(b)) => {
                let v = (b, 0.0, f64::from(neg[j].1) / nneg);
                j += 1;
                v
            }
            (None, None) => unreachable!(),
        };
        sum += (tpr_x - fpr_x).abs() / f64::from(x);
    }
    sum
}

fn poisson_ratio(stats: &TermClassStats) -> f64 {
    let npos = f64::from(stats.table.npos());
    if npos == 0.0 {
        return 0.0;
    }
    let lambda = stats.lambda_pos();
    if lambda == 0.0 {
        return 0.0;
    }
    let occupied = 1.0 - (-lambda).exp();
    let expected = npos * occupied;
    let variance = expected * (-lambda).exp();
    if variance > 0.0 {
        ((f64::from(stats.table.tp) - expected) / variance.sqrt()).abs()
    } else {
        0.0
    }
}
