//! Confusion matrices and precision/recall/F1 with macro averaging.

use super::BenchError;

/// Gold-by-predicted counts over a fixed class order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    classes: Vec<String>,
    cells: Vec<Vec<u32>>,
}

impl ConfusionMatrix {
    pub fn from_labels(
        gold: &[String],
        predicted: &[String],
        classes: &[String],
    ) -> Result<Self, BenchError> {
        if gold.len() != predicted.len() {
            return Err(BenchError::LengthMismatch {
                gold: gold.len(),
                predicted: predicted.len(),
            });
        }
        if gold.is_empty() {
            return Err(BenchError::EmptyInput);
        }
        let index_of = |label: &String| {
            classes
                .iter()
                .position(|c| c == label)
                .ok_or_else(|| BenchError::UnknownLabel(label.clone()))
        };
        let mut cells = vec![vec![0u32; classes.len()]; classes.len()];
        for (g, p) in gold.iter().zip(predicted) {
            cells[index_of(g)?][index_of(p)?] += 1;
        }
        Ok(Self {
            classes: classes.to_vec(),
            cells,
        })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    /// Count of gold-`i` documents predicted as `j`.
    pub fn cell(&self, i: usize, j: usize) -> u32 {
        self.cells[i][j]
    }

    pub fn total(&self) -> u32 {
        self.cells.iter().flatten().sum()
    }
}

/// Precision, recall, and F1 of one class, with its gold support.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassEval {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u32,
}

/// Per-class scores plus unweighted macro averages.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub per_class: Vec<ClassEval>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
}

/// Scores predictions against gold labels. Undefined ratios (a class never
/// predicted, or absent from gold) fall back to 0 by convention, so the
/// macro averages are always defined.
pub fn evaluate(
    gold: &[String],
    predicted: &[String],
    classes: &[String],
) -> Result<EvalReport, BenchError> {
    let cm = ConfusionMatrix::from_labels(gold, predicted, classes)?;
    let k = classes.len();
    let mut per_class = Vec::with_capacity(k);
    #[allow(clippy::needless_range_loop)] // cross sums read the whole matrix
    for i in 0..k {
        let tp = cm.cell(i, i);
        let predicted_i: u32 = (0..k).map(|g| cm.cell(g, i)).sum();
        let gold_i: u32 = (0..k).map(|p| cm.cell(i, p)).sum();
        let precision = ratio(tp, predicted_i);
        let recall = ratio(tp, gold_i);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        per_class.push(ClassEval {
            label: classes[i].clone(),
            precision,
            recall,
            f1,
            support: gold_i,
        });
    }
    let k = k as f64;
    Ok(EvalReport {
        macro_precision: per_class.iter().map(|c| c.precision).sum::<f64>() / k,
        macro_recall: per_class.iter().map(|c| c.recall).sum::<f64>() / k,
        macro_f1: per_class.iter().map(|c| c.f1).sum::<f64>() / k,
        per_class,
    })
}

fn ratio(num: u32, den: u32) -> f64 {
    if den == 0 {
        0.0
    } else {
        f64::from(num) / f64::from(den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(items: &[&str]) -> Vec<String> {
        items.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn perfect_predictions_score_one() {
        let labels = s(&["a", "b", "a", "c"]);
        let classes = s(&["a", "b", "c"]);
        let r = evaluate(&labels, &labels, &classes).unwrap();
        assert_eq!(r.macro_f1, 1.0);
        assert_eq!(r.macro_precision, 1.0);
        assert_eq!(r.macro_recall, 1.0);
    }

    #[test]
    fn balanced_errors_give_half() {
        // per class: tp=1, fp=1, fn=1 → P=R=F1=0.5
        let gold = s(&["a", "a", "b", "b"]);
        let pred = s(&["a", "b", "b", "a"]);
        let classes = s(&["a", "b"]);
        let r = evaluate(&gold, &pred, &classes).unwrap();
        for c in &r.per_class {
            assert!((c.precision - 0.5).abs() < 1e-15);
            assert!((c.recall - 0.5).abs() < 1e-15);
            assert!((c.f1 - 0.5).abs() < 1e-15);
        }
        assert!((r.macro_f1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn never_predicted_class_gets_zero_precision() {
        let gold = s(&["a", "b"]);
        let pred = s(&["a", "a"]);
        let classes = s(&["a", "b"]);
        let r = evaluate(&gold, &pred, &classes).unwrap();
        let b = r.per_class.iter().find(|c| c.label == "b").unwrap();
        assert_eq!(b.precision, 0.0);
        assert_eq!(b.recall, 0.0);
        assert_eq!(b.f1, 0.0);
        assert!(r.macro_f1.is_finite());
        assert!((0.0..=1.0).contains(&r.macro_f1));
    }

    #[test]
    fn length_mismatch_rejected() {
        let classes = s(&["a"]);
        assert!(matches!(
            evaluate(&s(&["a", "a"]), &s(&["a"]), &classes),
            Err(BenchError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn unknown_label_rejected() {
        let classes = s(&["a"]);
        assert!(matches!(
            evaluate(&s(&["a"]), &s(&["zzz"]), &classes),
            Err(BenchError::UnknownLabel(_))
        ));
    }

    #[test]
    fn empty_input_rejected() {
        let classes = s(&["a"]);
        assert!(matches!(
            evaluate(&[], &[], &classes),
            Err(BenchError::EmptyInput)
        ));
    }

    #[test]
    fn confusion_matrix_totals() {
        let gold = s(&["a", "a", "b"]);
        let pred = s(&["a", "b", "b"]);
        let classes = s(&["a", "b"]);
        let cm = ConfusionMatrix::from_labels(&gold, &pred, &classes).unwrap();
        assert_eq!(cm.total(), 3);
        assert_eq!(cm.cell(0, 0), 1);
        assert_eq!(cm.cell(0, 1), 1);
        assert_eq!(cm.cell(1, 1), 1);
    }

    #[test]
    fn diagonal_matrix_macro_f1_equals_accuracy() {
        let gold = s(&["a", "b", "c", "a"]);
        let r = evaluate(&gold, &gold, &s(&["a", "b", "c"])).unwrap();
        assert_eq!(r.macro_f1, 1.0);
    }
}
