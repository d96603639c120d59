//! Rendering sweep results as TSV and markdown, bit-stable for a fixed
//! seed unless timing output is explicitly enabled.

use std::path::Path;
use std::str::FromStr;

use super::sweep::{SweepConfig, SweepResult};
use super::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Tsv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(ReportFormat::Tsv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

fn config_lines(config: &SweepConfig, prefix: &str) -> String {
    let joined = |items: &[String]| items.join(",");
    let mut out = String::new();
    let mut push = |key: &str, value: String| {
        out.push_str(&format!("{prefix}{key}\t{value}\n"));
    };
    push(
        "metrics",
        joined(&config.metrics.iter().map(|m| m.to_string()).collect::<Vec<_>>()),
    );
    push(
        "k",
        joined(&config.k_values.iter().map(|k| k.to_string()).collect::<Vec<_>>()),
    );
    push(
        "classifiers",
        joined(&config.classifiers.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
    );
    push("seed", config.seed.to_string());
    push("train_fraction", format!("{}", config.train_fraction));
    push("nb_alpha", format!("{}", config.nb_alpha));
    push("svm_c", format!("{}", config.svm.c));
    push("svm_tol", format!("{}", config.svm.tol));
    push("svm_max_epochs", config.svm.max_epochs.to_string());
    push("emit_timing", u8::from(config.emit_timing).to_string());
    out
}

/// TSV with a `#`-commented config header, one row per sweep cell, and a
/// trailing comment per failed cell.
pub fn render_tsv(result: &SweepResult) -> String {
    let mut out = String::from("# tasnif sweep result\n");
    out.push_str(&config_lines(&result.config, "# "));
    out.push_str("metric\tk\tclassifier\tmacro_f1\tmacro_p\tmacro_r\tvocab_size\twall_ms\n");
    for row in &result.rows {
        let wall = if result.config.emit_timing { row.wall_ms } else { 0 };
        match &row.outcome {
            Ok(cell) => out.push_str(&format!(
                "{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}\n",
                row.metric,
                row.k,
                row.classifier,
                cell.macro_f1,
                cell.macro_precision,
                cell.macro_recall,
                cell.vocab_size,
                wall
            )),
            Err(_) => out.push_str(&format!(
                "{}\t{}\t{}\tnan\tnan\tnan\t0\t{}\n",
                row.metric, row.k, row.classifier, wall
            )),
        }
    }
    for row in &result.rows {
        if let Err(message) = &row.outcome {
            out.push_str(&format!(
                "# error\t{}\t{}\t{}\t{}\n",
                row.metric, row.k, row.classifier, message
            ));
        }
    }
    out
}

/// Markdown report: echoed config, the full result table, and a best-k
/// summary with one row per metric.
pub fn render_markdown(result: &SweepResult) -> String {
    let mut out = String::from("# Sweep report\n\n## Configuration\n\n```\n");
    out.push_str(&config_lines(&result.config, ""));
    out.push_str("```\n\n## Results\n\n");
    out.push_str("| metric | k | classifier | macro_f1 | macro_p | macro_r | vocab_size | wall_ms |\n");
    out.push_str("|---|---|---|---|---|---|---|---|\n");
    for row in &result.rows {
        let wall = if result.config.emit_timing { row.wall_ms } else { 0 };
        match &row.outcome {
            Ok(cell) => out.push_str(&format!(
                "| {} | {} | {} | {:.4} | {:.4} | {:.4} | {} | {} |\n",
                row.metric,
                row.k,
                row.classifier,
                cell.macro_f1,
                cell.macro_precision,
                cell.macro_recall,
                cell.vocab_size,
                wall
            )),
            Err(message) => out.push_str(&format!(
                "| {} | {} | {} | error: {} | | | | |\n",
                row.metric, row.k, row.classifier, message
            )),
        }
    }

    out.push_str("\n## Best k per metric\n\n");
    out.push_str("| metric | best k | classifier | macro_f1 |\n|---|---|---|---|\n");
    for &metric in &result.config.metrics {
        let best = result
            .rows
            .iter()
            .filter(|r| r.metric == metric)
            .filter_map(|r| r.outcome.as_ref().ok().map(|c| (r, c)))
            .max_by(|(ra, ca), (rb, cb)| {
                ca.macro_f1
                    .total_cmp(&cb.macro_f1)
                    .then_with(|| rb.k.cmp(&ra.k))
                    .then_with(|| rb.classifier.cmp(&ra.classifier))
            });
        match best {
            Some((row, cell)) => out.push_str(&format!(
                "| {} | {} | {} | {:.4} |\n",
                metric, row.k, row.classifier, cell.macro_f1
            )),
            None => out.push_str(&format!("| {metric} | — | — | — |\n")),
        }
    }
    out
}

pub fn render_report(
    result: &SweepResult,
    format: ReportFormat,
    path: &Path,
) -> Result<(), BenchError> {
    let content = match format {
        ReportFormat::Tsv => render_tsv(result),
        ReportFormat::Markdown => render_markdown(result),
    };
    std::fs::write(path, content).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}
