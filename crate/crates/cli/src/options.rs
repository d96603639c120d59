//! Argument definitions and flag/config-file resolution.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use tasnif_core::corpus::CorpusFormat;
use tasnif_core::models::{ClassifierKind, SvmParams};
use tasnif_core::rank::FilterMetric;
use tasnif_core::text::TokenizerConfig;

use crate::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(
    name = "tasnif",
    version,
    about = "Urdu text classification benchmarking: preprocessing, TF-IDF, filter-based term ranking, Naive Bayes / linear SVM, sweep reports",
    arg_required_else_help = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    pub fn common(&self) -> &CommonOpts {
        match &self.command {
            Command::Profile(a) => &a.common,
            Command::Rank(a) => &a.common,
            Command::Select(a) => &a.common,
            Command::ExportVocab(a) => &a.common,
            Command::Train(a) => &a.common,
            Command::Predict(a) => &a.common,
            Command::Evaluate(a) => &a.common,
            Command::Sweep(a) => &a.common,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Most frequent terms of a corpus, for stop-word curation
    Profile(ProfileArgs),
    /// Rank all terms per class with one filter metric
    Rank(RankArgs),
    /// Top-k union of per-class rankings, with provenance
    Select(SelectArgs),
    /// Write an indexed vocabulary file for downstream embedding layers
    ExportVocab(ExportVocabArgs),
    /// Train a classifier on the train split and evaluate on the test split
    Train(TrainArgs),
    /// Predict labels for a corpus with a saved model
    Predict(PredictArgs),
    /// Score a predictions file (gold vs predicted)
    Evaluate(EvaluateArgs),
    /// Full benchmark: every (metric, k, classifier) cell, TSV + markdown
    Sweep(SweepArgs),
}

/// Flags shared by every subcommand. Unset values fall back to the
/// `--config` file, then to defaults.
#[derive(Args, Debug, Default)]
pub struct CommonOpts {
    /// Corpus root (dir-per-class) or manifest file
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// Corpus layout: dir-per-class | manifest-tsv
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Lemma lexicon TSV (surface<TAB>lemma)
    #[arg(long, global = true)]
    pub lexicon: Option<PathBuf>,
    /// Stop-word list, one token per line
    #[arg(long, global = true)]
    pub stoplist: Option<PathBuf>,
    /// Keep Arabic diacritics instead of stripping them
    #[arg(long, global = true)]
    pub keep_diacritics: bool,
    /// Drop digit-only tokens
    #[arg(long, global = true)]
    pub drop_digits: bool,
    /// Keep ASCII letter case
    #[arg(long, global = true)]
    pub keep_ascii_case: bool,
    /// Split seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Train fraction of the stratified split
    #[arg(long, global = true)]
    pub train_fraction: Option<f64>,
    /// Worker threads (0 = all cores); results are thread-count independent
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory (default: $TASNIF_OUT or current directory)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TSV config file (`key<TAB>value`) supplying defaults for any flag
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub common: CommonOpts,
    /// How many top terms to report
    #[arg(long, default_value_t = 1500)]
    pub top_n: usize,
}

#[derive(Args, Debug)]
pub struct RankArgs {
    #[command(flatten)]
    pub common: CommonOpts,
    /// Filter metric: acc2|ndm|mmr|rdc|ig|chisq|or|bns|gini|pois
    #[arg(long)]
    pub metric: Option<String>,
    /// Rank the whole corpus instead of the train split
    #[arg(long)]
    pub whole_corpus: bool,
}

#[derive(Args, Debug)]
pub struct SelectArgs {
    #[command(flatten)]
    pub common: CommonOpts,
    #[arg(long)]
    pub metric: Option<String>,
    /// Top-k per class
    #[arg(long)]
    pub k: Option<usize>,
    /// Rank the whole corpus instead of the train split
    #[arg(long)]
    pub whole_corpus: bool,
}

#[derive(Args, Debug)]
pub struct ExportVocabArgs {
    #[command(flatten)]
    pub common: CommonOpts,
    /// Build the vocabulary from a metric's top-k union (rank order)
    #[arg(long)]
    pub metric: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Build the vocabulary from the most frequent terms instead
    #[arg(long)]
    pub max_features: Option<usize>,
    /// Rank/count on the whole corpus instead of the train split
    #[arg(long)]
    pub whole_corpus: bool,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: CommonOpts,
    /// nb | svm
    #[arg(long)]
    pub classifier: Option<String>,
    /// Optional feature selection: metric + k
    #[arg(long)]
    pub metric: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Alternative: restrict to the n most frequent train terms
    #[arg(long)]
    pub max_features: Option<usize>,
    #[arg(long)]
    pub nb_alpha: Option<f64>,
    #[arg(long)]
    pub svm_c: Option<f64>,
    #[arg(long)]
    pub svm_tol: Option<f64>,
    #[arg(long)]
    pub svm_max_epochs: Option<u32>,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    #[command(flatten)]
    pub common: CommonOpts,
    /// Saved model file
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: CommonOpts,
    /// Predictions TSV (id<TAB>gold<TAB>predicted)
    #[arg(long)]
    pub predictions: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonOpts,
    /// Comma-separated metric list (default: all ten)
    #[arg(long)]
    pub metrics: Option<String>,
    /// Comma-separated k ladder (default: 10,20,50,100,200,500,1000,2000,5000)
    #[arg(long)]
    pub k: Option<String>,
    /// Comma-separated classifier list (default: nb,svm)
    #[arg(long)]
    pub classifiers: Option<String>,
    /// Replicate over several seeds and aggregate mean ± stdev
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long)]
    pub nb_alpha: Option<f64>,
    #[arg(long)]
    pub svm_c: Option<f64>,
    #[arg(long)]
    pub svm_tol: Option<f64>,
    #[arg(long)]
    pub svm_max_epochs: Option<u32>,
    /// Write measured per-cell wall time (waives byte-stable output)
    #[arg(long)]
    pub timing: bool,
}

/// `key<TAB>value` lines with `#` comments.
#[derive(Debug, Default)]
pub struct FileConfig(HashMap<String, String>);

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let content = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut map = HashMap::new();
        for (idx, line) in content.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('\t').or_else(|| line.split_once('=')) else {
                bail!(
                    "{}:{}: expected `key<TAB>value` or `key=value`",
                    path.display(),
                    idx + 1
                );
            };
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self(map))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("config key `{key}`: {e}")),
        }
    }

    pub fn get_flag(&self, key: &str) -> anyhow::Result<bool> {
        Ok(matches!(self.0.get(key).map(String::as_str), Some("1") | Some("true")))
    }
}

/// Fully resolved run configuration: flags > config file > defaults.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub corpus: Option<PathBuf>,
    pub format: CorpusFormat,
    pub lexicon: Option<PathBuf>,
    pub stoplist: Option<PathBuf>,
    pub tokenizer: TokenizerConfig,
    pub seed: u64,
    pub train_fraction: f64,
    pub out: PathBuf,
}

impl Resolved {
    pub fn corpus_path(&self) -> CliResult<&Path> {
        self.corpus
            .as_deref()
            .ok_or_else(|| CliError::Usage("missing required flag --corpus".to_string()))
    }

    /// Provenance lines echoed into every output file.
    pub fn header(&self, subcommand: &str, extras: &[(&str, String)]) -> String {
        let display_opt =
            |p: &Option<PathBuf>| p.as_ref().map_or("-".to_string(), |p| p.display().to_string());
        let mut out = format!("# tasnif {subcommand}\n");
        let mut push = |key: &str, value: String| {
            out.push_str(&format!("# {key}\t{value}\n"));
        };
        push("corpus", display_opt(&self.corpus));
        push("format", self.format.to_string());
        push("lexicon", display_opt(&self.lexicon));
        push("stoplist", display_opt(&self.stoplist));
        push("strip_diacritics", u8::from(self.tokenizer.strip_diacritics).to_string());
        push("keep_digits", u8::from(self.tokenizer.keep_digits).to_string());
        push("lowercase_ascii", u8::from(self.tokenizer.lowercase_ascii).to_string());
        push("seed", self.seed.to_string());
        push("train_fraction", self.train_fraction.to_string());
        for (key, value) in extras {
            push(key, value.clone());
        }
        out
    }
}

pub fn resolve(common: &CommonOpts) -> CliResult<(Resolved, FileConfig)> {
    let file = match &common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let corpus = common
        .corpus
        .clone()
        .or(file.get::<PathBuf>("corpus")?);
    let format_name = common
        .format
        .clone()
        .or(file.get::<String>("format")?)
        .unwrap_or_else(|| "dir-per-class".to_string());
    let format = CorpusFormat::from_str(&format_name).map_err(CliError::Usage)?;
    let tokenizer = TokenizerConfig {
        strip_diacritics: !(common.keep_diacritics || file.get_flag("keep_diacritics")?),
        keep_digits: !(common.drop_digits || file.get_flag("drop_digits")?),
        lowercase_ascii: !(common.keep_ascii_case || file.get_flag("keep_ascii_case")?),
    };
    let out = common
        .out
        .clone()
        .or(file.get::<PathBuf>("out")?)
        .or_else(|| std::env::var("TASNIF_OUT").ok().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let resolved = Resolved {
        corpus,
        format,
        lexicon: common.lexicon.clone().or(file.get::<PathBuf>("lexicon")?),
        stoplist: common.stoplist.clone().or(file.get::<PathBuf>("stoplist")?),
        tokenizer,
        seed: common.seed.or(file.get("seed")?).unwrap_or(42),
        train_fraction: common
            .train_fraction
            .or(file.get("train_fraction")?)
            .unwrap_or(0.7),
        out,
    };
    Ok((resolved, file))
}

pub fn parse_metric(raw: &Option<String>, file: &FileConfig) -> CliResult<FilterMetric> {
    let name = raw
        .clone()
        .or(file.get::<String>("metric").map_err(CliError::Runtime)?)
        .ok_or_else(|| CliError::Usage("missing required flag --metric".to_string()))?;
    name.parse()
        .map_err(|e: tasnif_core::rank::ParseMetricError| CliError::Usage(e.to_string()))
}

pub fn parse_metric_list(raw: &Option<String>, file: &FileConfig) -> CliResult<Vec<FilterMetric>> {
    let Some(joined) = raw
        .clone()
        .or(file.get::<String>("metrics").map_err(CliError::Runtime)?)
    else {
        return Ok(FilterMetric::ALL.to_vec());
    };
    joined
        .split(',')
        .map(|m| {
            m.trim()
                .parse()
                .map_err(|e: tasnif_core::rank::ParseMetricError| CliError::Usage(e.to_string()))
        })
        .collect()
}

pub fn parse_classifier_list(
    raw: &Option<String>,
    file: &FileConfig,
) -> CliResult<Vec<ClassifierKind>> {
    let Some(joined) = raw
        .clone()
        .or(file.get::<String>("classifiers").map_err(CliError::Runtime)?)
    else {
        return Ok(ClassifierKind::ALL.to_vec());
    };
    joined
        .split(',')
        .map(|c| {
            c.trim().parse().map_err(
                |e: tasnif_core::models::ParseClassifierError| CliError::Usage(e.to_string()),
            )
        })
        .collect()
}

pub fn parse_usize_list(raw: &Option<String>, file: &FileConfig, key: &str) -> CliResult<Option<Vec<usize>>> {
    let Some(joined) = raw
        .clone()
        .or(file.get::<String>(key).map_err(CliError::Runtime)?)
    else {
        return Ok(None);
    };
    joined
        .split(',')
        .map(|k| {
            k.trim()
                .parse::<usize>()
                .map_err(|e| CliError::Usage(format!("bad value in --{key} list: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

pub fn svm_params(
    c: Option<f64>,
    tol: Option<f64>,
    max_epochs: Option<u32>,
    seed: u64,
    file: &FileConfig,
) -> CliResult<SvmParams> {
    let defaults = SvmParams::default();
    Ok(SvmParams {
        c: c.or(file.get("svm_c")?).unwrap_or(defaults.c),
        tol: tol.or(file.get("svm_tol")?).unwrap_or(defaults.tol),
        max_epochs: max_epochs
            .or(file.get("svm_max_epochs")?)
            .unwrap_or(defaults.max_epochs),
        seed,
    })
}
