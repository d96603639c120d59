//! Subcommand implementations.

use std::sync::Arc;

use anyhow::Context;

use tasnif_core::bench::{
    render_markdown, render_tsv, run_sweep, run_sweep_multi, SweepConfig,
};
use tasnif_core::corpus::{load_corpus, stratified_split, Corpus};
use tasnif_core::models::{
    load_any_model, save_linear_model, save_nb_model, train_linear_svm, train_nb, AnyModel,
    ClassifierKind,
};
use tasnif_core::rank::{rank_per_class, rankings_to_tsv, select_top_k_union, selected_to_tsv};
use tasnif_core::text::{frequency_profile, LemmaLexicon, Pipeline, StopList};
use tasnif_core::vectorize::{
    apply_tfidf, compute_idf, count_matrix, top_frequent_vocabulary, DocTermMatrix, Vocabulary,
};

use crate::options::{
    parse_classifier_list, parse_metric, parse_metric_list, parse_usize_list, resolve,
    svm_params, Cli, Command, Resolved,
};
use crate::{CliError, CliResult};

pub fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Profile(args) => profile(args),
        Command::Rank(args) => rank(args),
        Command::Select(args) => select(args),
        Command::ExportVocab(args) => export_vocab(args),
        Command::Train(args) => train(args),
        Command::Predict(args) => predict(args),
        Command::Evaluate(args) => evaluate_cmd(args),
        Command::Sweep(args) => sweep(args),
    }
}

fn build_pipeline(resolved: &Resolved) -> CliResult<Pipeline> {
    let lexicon = match &resolved.lexicon {
        Some(path) => LemmaLexicon::load(path, &resolved.tokenizer)?,
        None => LemmaLexicon::default(),
    };
    let stops = match &resolved.stoplist {
        Some(path) => StopList::load(path, &resolved.tokenizer)?,
        None => StopList::default(),
    };
    Ok(Pipeline::new(resolved.tokenizer, lexicon, stops))
}

fn load_and_preprocess(resolved: &Resolved) -> CliResult<Corpus> {
    let corpus = load_corpus(resolved.corpus_path()?, resolved.format)?;
    let pipeline = build_pipeline(resolved)?;
    let corpus = pipeline.preprocess(&corpus);
    eprintln!(
        "loaded {} documents, {} classes, {} tokens after preprocessing",
        corpus.len(),
        corpus.classes().len(),
        corpus.token_count().unwrap_or(0)
    );
    Ok(corpus)
}

fn write_output(resolved: &Resolved, name: &str, content: &str) -> CliResult<()> {
    std::fs::create_dir_all(&resolved.out)
        .with_context(|| format!("creating output dir {}", resolved.out.display()))?;
    let path = resolved.out.join(name);
    std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

/// Training matrix over the train split (default) or the whole corpus.
fn ranking_matrix(
    corpus: &Corpus,
    resolved: &Resolved,
    whole_corpus: bool,
) -> CliResult<DocTermMatrix> {
    let matrix = if whole_corpus {
        let vocab = Arc::new(Vocabulary::from_corpus(corpus)?);
        count_matrix(corpus, &vocab)?
    } else {
        let split = stratified_split(corpus, resolved.train_fraction, resolved.seed)?;
        let vocab = Arc::new(Vocabulary::from_corpus(&split.train)?);
        count_matrix(&split.train, &vocab)?
    };
    Ok(matrix)
}

fn profile(args: &crate::options::ProfileArgs) -> CliResult<()> {
    let (resolved, _) = resolve(&args.common)?;
    let corpus = load_and_preprocess(&resolved)?;
    let ranked = frequency_profile(&corpus, args.top_n)?;
    let mut out = resolved.header("profile", &[("top_n", args.top_n.to_string())]);
    out.push_str("term\tfrequency\n");
    for (term, freq) in &ranked {
        out.push_str(&format!("{term}\t{freq}\n"));
    }
    write_output(&resolved, "profile.tsv", &out)
}

fn rank(args: &crate::options::RankArgs) -> CliResult<()> {
    let (resolved, file) = resolve(&args.common)?;
    let metric = parse_metric(&args.metric, &file)?;
    let corpus = load_and_preprocess(&resolved)?;
    let matrix = ranking_matrix(&corpus, &resolved, args.whole_corpus)?;
    let ranked = rank_per_class(&matrix, metric)?;
    let mut out = resolved.header(
        "rank",
        &[
            ("metric", metric.to_string()),
            ("whole_corpus", u8::from(args.whole_corpus).to_string()),
        ],
    );
    out.push_str(&rankings_to_tsv(&ranked));
    write_output(&resolved, &format!("ranking_{metric}.tsv"), &out)
}

fn select(args: &crate::options::SelectArgs) -> CliResult<()> {
    let (resolved, file) = resolve(&args.common)?;
    let metric = parse_metric(&args.metric, &file)?;
    let k = args
        .k
        .or(file.get("k").map_err(CliError::Runtime)?)
        .ok_or_else(|| CliError::Usage("missing required flag --k".to_string()))?;
    let corpus = load_and_preprocess(&resolved)?;
    let matrix = ranking_matrix(&corpus, &resolved, args.whole_corpus)?;
    let ranked = rank_per_class(&matrix, metric)?;
    let selected = select_top_k_union(&ranked, k)?;
    let mut out = resolved.header(
        "select",
        &[
            ("metric", metric.to_string()),
            ("k", k.to_string()),
            ("selected_terms", selected.len().to_string()),
        ],
    );
    out.push_str(&selected_to_tsv(&selected));
    write_output(&resolved, &format!("selected_{metric}_k{k}.tsv"), &out)
}

fn export_vocab(args: &crate::options::ExportVocabArgs) -> CliResult<()> {
    let (resolved, file) = resolve(&args.common)?;
    let corpus = load_and_preprocess(&resolved)?;
    let matrix = ranking_matrix(&corpus, &resolved, args.whole_corpus)?;
    let (vocab, source) = match (&args.metric, args.max_features) {
        (Some(_), _) => {
            let metric = parse_metric(&args.metric, &file)?;
            let k = args
                .k
                .or(file.get("k").map_err(CliError::Runtime)?)
                .ok_or_else(|| CliError::Usage("--metric needs --k".to_string()))?;
            let ranked = rank_per_class(&matrix, metric)?;
            let selected = select_top_k_union(&ranked, k)?;
            (selected.vocabulary()?, format!("{metric} top-{k} union"))
        }
        (None, Some(n)) => (
            top_frequent_vocabulary(&matrix, n)?,
            format!("{n} most frequent terms"),
        ),
        (None, None) => {
            return Err(CliError::Usage(
                "export-vocab needs either --metric with --k, or --max-features".to_string(),
            ))
        }
    };
    let mut out = resolved.header("export-vocab", &[("source", source)]);
    for (i, term) in vocab.terms().iter().enumerate() {
        out.push_str(&format!("{term}\t{i}\n"));
    }
    write_output(&resolved, "vocab.tsv", &out)
}

fn train(args: &crate::options::TrainArgs) -> CliResult<()> {
    let (resolved, file) = resolve(&args.common)?;
    let classifier: ClassifierKind = args
        .classifier
        .clone()
        .or(file.get::<String>("classifier").map_err(CliError::Runtime)?)
        .ok_or_else(|| CliError::Usage("missing required flag --classifier".to_string()))?
        .parse()
        .map_err(|e: tasnif_core::models::ParseClassifierError| CliError::Usage(e.to_string()))?;

    let corpus = load_and_preprocess(&resolved)?;
    let split = stratified_split(&corpus, resolved.train_fraction, resolved.seed)?;
    let full_vocab = Arc::new(Vocabulary::from_corpus(&split.train)?);
    let train_full = count_matrix(&split.train, &full_vocab)?;

    let (vocab, selection) = match (&args.metric, args.max_features) {
        (Some(_), _) => {
            let metric = parse_metric(&args.metric, &file)?;
            let k = args
                .k
                .or(file.get("k").map_err(CliError::Runtime)?)
                .ok_or_else(|| CliError::Usage("--metric needs --k".to_string()))?;
            let ranked = rank_per_class(&train_full, metric)?;
            let selected = select_top_k_union(&ranked, k)?;
            (
                Arc::new(selected.vocabulary()?),
                format!("{metric} top-{k} union"),
            )
        }
        (None, Some(n)) => (
            Arc::new(top_frequent_vocabulary(&train_full, n)?),
            format!("{n} most frequent terms"),
        ),
        (None, None) => (Arc::clone(&full_vocab), "full train vocabulary".to_string()),
    };
    let train_m = train_full.project(&vocab)?;
    let test_m = count_matrix(&split.test, &vocab)?;

    let header_extras = [
        ("classifier", classifier.to_string()),
        ("features", selection.clone()),
        ("vocab_size", vocab.len().to_string()),
    ];
    let predictions = match classifier {
        ClassifierKind::NaiveBayes => {
            let alpha = args
                .nb_alpha
                .or(file.get("nb_alpha").map_err(CliError::Runtime)?)
                .unwrap_or(1.0);
            let model = train_nb(&train_m, alpha)?;
            std::fs::create_dir_all(&resolved.out)
                .with_context(|| format!("creating output dir {}", resolved.out.display()))?;
            save_nb_model(&model, &resolved.out.join("model.tsv"))?;
            model.predict_matrix(&test_m)?
        }
        ClassifierKind::LinearSvm => {
            let params = svm_params(
                args.svm_c,
                args.svm_tol,
                args.svm_max_epochs,
                resolved.seed,
                &file,
            )?;
            let idf = compute_idf(&train_m)?;
            let wtrain = apply_tfidf(&train_m, &idf, true)?;
            let wtest = apply_tfidf(&test_m, &idf, true)?;
            let model = train_linear_svm(&wtrain, &params)?;
            if !model.converged() {
                eprintln!("warning: SVM did not converge within max_epochs for every class");
            }
            std::fs::create_dir_all(&resolved.out)
                .with_context(|| format!("creating output dir {}", resolved.out.display()))?;
            save_linear_model(&model, &resolved.out.join("model.tsv"))?;
            model.predict_matrix(&wtest)?
        }
    };
    eprintln!("wrote {}", resolved.out.join("model.tsv").display());

    let mut vocab_out = resolved.header("train", &header_extras);
    for (i, term) in vocab.terms().iter().enumerate() {
        vocab_out.push_str(&format!("{term}\t{i}\n"));
    }
    write_output(&resolved, "vocab.tsv", &vocab_out)?;

    let gold: Vec<String> = (0..test_m.n_docs())
        .map(|i| test_m.label(i).to_string())
        .collect();
    let report = tasnif_core::bench::evaluate(&gold, &predictions, train_m.classes())?;
    let mut eval_out = resolved.header("train", &header_extras);
    eval_out.push_str(&eval_tsv(&report));
    write_output(&resolved, "eval.tsv", &eval_out)
}

fn eval_tsv(report: &tasnif_core::bench::EvalReport) -> String {
    let mut out = String::from("class\tprecision\trecall\tf1\tsupport\n");
    let mut total_support = 0u32;
    for c in &report.per_class {
        out.push_str(&format!(
            "{}\t{:.6}\t{:.6}\t{:.6}\t{}\n",
            c.label, c.precision, c.recall, c.f1, c.support
        ));
        total_support += c.support;
    }
    out.push_str(&format!(
        "macro\t{:.6}\t{:.6}\t{:.6}\t{}\n",
        report.macro_precision, report.macro_recall, report.macro_f1, total_support
    ));
    out
}

fn predict(args: &crate::options::PredictArgs) -> CliResult<()> {
    let (resolved, file) = resolve(&args.common)?;
    let model_path = args
        .model
        .clone()
        .or(file.get::<std::path::PathBuf>("model").map_err(CliError::Runtime)?)
        .ok_or_else(|| CliError::Usage("missing required flag --model".to_string()))?;
    let model = load_any_model(&model_path)?;
    let corpus = load_and_preprocess(&resolved)?;
    let counts = count_matrix(&corpus, model.vocab())?;
    let predictions = match &model {
        AnyModel::NaiveBayes(m) => m.predict_matrix(&counts)?,
        AnyModel::LinearSvm(m) => {
            let weighted = apply_tfidf(&counts, m.idf(), m.input_normalized())?;
            m.predict_matrix(&weighted)?
        }
    };
    let mut out = resolved.header(
        "predict",
        &[
            ("model", model_path.display().to_string()),
            ("model_type", model.kind().to_string()),
        ],
    );
    out.push_str("id\tgold\tpredicted\n");
    for (doc, label) in corpus.documents().iter().zip(&predictions) {
        out.push_str(&format!("{}\t{}\t{}\n", doc.id, doc.class_label, label));
    }
    write_output(&resolved, "predictions.tsv", &out)
}

fn evaluate_cmd(args: &crate::options::EvaluateArgs) -> CliResult<()> {
    let (resolved, file) = resolve(&args.common)?;
    let predictions_path = args
        .predictions
        .clone()
        .or(file
            .get::<std::path::PathBuf>("predictions")
            .map_err(CliError::Runtime)?)
        .ok_or_else(|| CliError::Usage("missing required flag --predictions".to_string()))?;
    let content = std::fs::read_to_string(&predictions_path)
        .with_context(|| format!("reading {}", predictions_path.display()))?;
    let mut lines = content
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty());
    match lines.next() {
        Some("id\tgold\tpredicted") => {}
        _ => {
            return Err(CliError::Runtime(anyhow::anyhow!(
                "{}: expected header `id\\tgold\\tpredicted`",
                predictions_path.display()
            )))
        }
    }
    let mut gold = Vec::new();
    let mut predicted = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(CliError::Runtime(anyhow::anyhow!(
                "{}: bad row `{line}`",
                predictions_path.display()
            )));
        }
        gold.push(fields[1].to_string());
        predicted.push(fields[2].to_string());
    }
    let mut classes: Vec<String> = gold.iter().chain(predicted.iter()).cloned().collect();
    classes.sort();
    classes.dedup();
    let report = tasnif_core::bench::evaluate(&gold, &predicted, &classes)?;
    let mut out = resolved.header(
        "evaluate",
        &[("predictions", predictions_path.display().to_string())],
    );
    out.push_str(&eval_tsv(&report));
    write_output(&resolved, "eval.tsv", &out)?;
    eprintln!("macro-F1 {:.6}", report.macro_f1);
    Ok(())
}

fn sweep(args: &crate::options::SweepArgs) -> CliResult<()> {
    let (resolved, file) = resolve(&args.common)?;
    let corpus = load_and_preprocess(&resolved)?;
    let metrics = parse_metric_list(&args.metrics, &file)?;
    let classifiers = parse_classifier_list(&args.classifiers, &file)?;
    let k_values = parse_usize_list(&args.k, &file, "k")?
        .unwrap_or_else(|| tasnif_core::bench::DEFAULT_TEST_POINTS.to_vec());
    let config = SweepConfig {
        metrics,
        k_values,
        classifiers,
        seed: resolved.seed,
        train_fraction: resolved.train_fraction,
        nb_alpha: args
            .nb_alpha
            .or(file.get("nb_alpha").map_err(CliError::Runtime)?)
            .unwrap_or(1.0),
        svm: svm_params(
            args.svm_c,
            args.svm_tol,
            args.svm_max_epochs,
            resolved.seed,
            &file,
        )?,
        emit_timing: args.timing || file.get_flag("timing").map_err(CliError::Runtime)?,
    };

    let seeds = parse_usize_list(&args.seeds, &file, "seeds")?;
    if let Some(seeds) = seeds {
        let seeds: Vec<u64> = seeds.into_iter().map(|s| s as u64).collect();
        let multi = run_sweep_multi(&corpus, &config, &seeds)?;
        let mut out = resolved.header(
            "sweep",
            &[(
                "seeds",
                seeds
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            )],
        );
        out.push_str(
            "metric\tk\tclassifier\tsuccesses\tmacro_f1_mean\tmacro_f1_std\tmacro_p_mean\tmacro_r_mean\tvocab_size_mean\n",
        );
        for row in &multi.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.1}\n",
                row.metric,
                row.k,
                row.classifier,
                row.successes,
                row.macro_f1_mean,
                row.macro_f1_std,
                row.macro_precision_mean,
                row.macro_recall_mean,
                row.vocab_size_mean
            ));
        }
        return write_output(&resolved, "result_multiseed.tsv", &out);
    }

    let result = run_sweep(&corpus, &config)?;
    let mut tsv = resolved.header("sweep", &[]);
    tsv.push_str(&render_tsv(&result));
    write_output(&resolved, "result.tsv", &tsv)?;

    let mut md = render_markdown(&result);
    md.push_str("\n## Run context\n\n```\n");
    for line in resolved.header("sweep", &[]).lines() {
        md.push_str(line.trim_start_matches("# "));
        md.push('\n');
    }
    md.push_str("```\n");
    write_output(&resolved, "report.md", &md)
}
