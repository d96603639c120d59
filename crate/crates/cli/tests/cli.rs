//! End-to-end tests of the command-line surface, driven through `run()`
//! with real files in temp directories.

use std::path::Path;

use tasnif_cli::run;

fn args(list: &[&str]) -> Vec<String> {
    std::iter::once("tasnif")
        .chain(list.iter().copied())
        .map(String::from)
        .collect()
}

/// Three-class corpus with exclusive marker tokens per class.
fn write_corpus(root: &Path) {
    for (class, marker) in [("alif", "قلعہ"), ("bay", "دریا"), ("jeem", "پہاڑ")] {
        let dir = root.join(class);
        std::fs::create_dir_all(&dir).unwrap();
        for i in 0..6 {
            let text = format!("{marker} نمبر {i} ہے۔ مشترکہ لفظ یہاں۔");
            std::fs::write(dir.join(format!("doc{i}.txt")), text).unwrap();
        }
    }
}

#[test]
fn no_arguments_prints_usage_and_exits_1() {
    assert_eq!(run(args(&[])), 1);
}

#[test]
fn unknown_subcommand_exits_1() {
    assert_eq!(run(args(&["frobnicate"])), 1);
}

#[test]
fn help_exits_0() {
    assert_eq!(run(args(&["--help"])), 0);
    assert_eq!(run(args(&["sweep", "--help"])), 0);
}

#[test]
fn rank_without_corpus_is_a_usage_error() {
    assert_eq!(run(args(&["rank", "--metric", "ndm"])), 1);
}

#[test]
fn rank_with_unknown_metric_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    write_corpus(&corpus_dir);
    let corpus = corpus_dir.to_str().unwrap();
    assert_eq!(
        run(args(&["rank", "--metric", "bogus", "--corpus", corpus])),
        1
    );
}

#[test]
fn missing_corpus_path_is_a_runtime_error() {
    assert_eq!(
        run(args(&["rank", "--metric", "ndm", "--corpus", "/no/such/dir"])),
        2
    );
}

#[test]
fn profile_writes_frequency_tsv() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    write_corpus(&corpus_dir);
    let out = dir.path().join("out");
    let code = run(args(&[
        "profile",
        "--corpus",
        corpus_dir.to_str().unwrap(),
        "--top-n",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let content = std::fs::read_to_string(out.join("profile.tsv")).unwrap();
    assert!(content.starts_with("# tasnif profile\n"));
    let data: Vec<&str> = content.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "term\tfrequency");
    assert!(data.len() <= 6 + 1);
}

#[test]
fn rank_select_and_export_vocab_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    write_corpus(&corpus_dir);
    let corpus = corpus_dir.to_str().unwrap();
    let out = dir.path().join("out");
    let out_s = out.to_str().unwrap();

    assert_eq!(
        run(args(&["rank", "--metric", "chisq", "--corpus", corpus, "--out", out_s, "--seed", "3"])),
        0
    );
    let ranking = std::fs::read_to_string(out.join("ranking_chisq.tsv")).unwrap();
    assert!(ranking.contains("term\tclass\tmetric\tscore\trank"));
    assert!(ranking.contains("# seed\t3"));
    // CLI output is re-importable despite the provenance comments
    let imported = tasnif_core::rank::import_rankings(&out.join("ranking_chisq.tsv")).unwrap();
    assert_eq!(imported.len(), 3);

    assert_eq!(
        run(args(&["select", "--metric", "chisq", "--k", "2", "--corpus", corpus, "--out", out_s])),
        0
    );
    let selected = std::fs::read_to_string(out.join("selected_chisq_k2.tsv")).unwrap();
    assert!(selected.contains("term\tbest_rank\tclasses"));

    assert_eq!(
        run(args(&["export-vocab", "--metric", "chisq", "--k", "2", "--corpus", corpus, "--out", out_s])),
        0
    );
    let vocab = tasnif_core::vectorize::Vocabulary::load(&out.join("vocab.tsv")).unwrap();
    assert!(vocab.len() >= 2);

    // frequency-based export instead of metric-based
    assert_eq!(
        run(args(&["export-vocab", "--max-features", "4", "--corpus", corpus, "--out", out_s])),
        0
    );
    let vocab = tasnif_core::vectorize::Vocabulary::load(&out.join("vocab.tsv")).unwrap();
    assert_eq!(vocab.len(), 4);

    // neither selection source is a usage error
    assert_eq!(run(args(&["export-vocab", "--corpus", corpus, "--out", out_s])), 1);
}

#[test]
fn train_predict_evaluate_chain() {
    for classifier in ["nb", "svm"] {
        let dir = tempfile::tempdir().unwrap();
        let corpus_dir = dir.path().join("corpus");
    write_corpus(&corpus_dir);
        let corpus = corpus_dir.to_str().unwrap();
        let out = dir.path().join("out");
        let out_s = out.to_str().unwrap();

        let code = run(args(&[
            "train",
            "--classifier",
            classifier,
            "--metric",
            "ndm",
            "--k",
            "3",
            "--corpus",
            corpus,
            "--out",
            out_s,
            "--seed",
            "7",
        ]));
        assert_eq!(code, 0, "train {classifier}");
        assert!(out.join("model.tsv").exists());
        assert!(out.join("vocab.tsv").exists());
        let eval = std::fs::read_to_string(out.join("eval.tsv")).unwrap();
        assert!(eval.contains("class\tprecision\trecall\tf1\tsupport"));
        // markers make this corpus trivially separable
        assert!(eval.lines().any(|l| l.starts_with("macro\t1.000000")), "{eval}");

        let code = run(args(&[
            "predict",
            "--model",
            out.join("model.tsv").to_str().unwrap(),
            "--corpus",
            corpus,
            "--out",
            out_s,
        ]));
        assert_eq!(code, 0, "predict {classifier}");
        let predictions = std::fs::read_to_string(out.join("predictions.tsv")).unwrap();
        assert!(predictions.contains("id\tgold\tpredicted"));
        assert_eq!(
            predictions.lines().filter(|l| !l.starts_with('#')).count(),
            1 + 18
        );

        let code = run(args(&[
            "evaluate",
            "--predictions",
            out.join("predictions.tsv").to_str().unwrap(),
            "--out",
            out_s,
        ]));
        assert_eq!(code, 0, "evaluate {classifier}");
        let eval = std::fs::read_to_string(out.join("eval.tsv")).unwrap();
        assert!(eval.lines().any(|l| l.starts_with("macro\t1.000000")));
    }
}

#[test]
fn sweep_writes_tsv_and_markdown() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    write_corpus(&corpus_dir);
    let out = dir.path().join("out");
    let code = run(args(&[
        "sweep",
        "--corpus",
        corpus_dir.to_str().unwrap(),
        "--metrics",
        "ndm,chisq",
        "--k",
        "2,4",
        "--classifiers",
        "nb,svm",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let tsv = std::fs::read_to_string(out.join("result.tsv")).unwrap();
    let data_rows = tsv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("metric\t"))
        .count();
    assert_eq!(data_rows, 2 * 2 * 2);
    assert!(tsv.contains("# corpus\t"));
    assert!(tsv.contains("# metrics\tndm,chisq"));
    let md = std::fs::read_to_string(out.join("report.md")).unwrap();
    assert!(md.contains("## Best k per metric"));
    assert!(md.contains("## Run context"));
}

#[test]
fn sweep_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    write_corpus(&corpus_dir);
    let corpus = corpus_dir.to_str().unwrap();
    let mut outputs = Vec::new();
    for (label, threads) in [("t1", "1"), ("t4", "4")] {
        let out = dir.path().join(label);
        let code = run(args(&[
            "sweep",
            "--corpus",
            corpus,
            "--metrics",
            "acc2,bns",
            "--k",
            "2,4",
            "--seed",
            "99",
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ]));
        assert_eq!(code, 0);
        outputs.push(std::fs::read(out.join("result.tsv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn multi_seed_sweep_aggregates() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    write_corpus(&corpus_dir);
    let out = dir.path().join("out");
    let code = run(args(&[
        "sweep",
        "--corpus",
        corpus_dir.to_str().unwrap(),
        "--metrics",
        "ig",
        "--k",
        "3",
        "--classifiers",
        "nb",
        "--seeds",
        "1,2,3",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let tsv = std::fs::read_to_string(out.join("result_multiseed.tsv")).unwrap();
    assert!(tsv.contains("macro_f1_mean\tmacro_f1_std"));
    let data: Vec<&str> = tsv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("metric\t"))
        .collect();
    assert_eq!(data.len(), 1);
    assert!(data[0].starts_with("ig\t3\tnb\t3\t"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    write_corpus(&corpus_dir);
    let out = dir.path().join("out");
    let config_path = dir.path().join("run.cfg");
    std::fs::write(
        &config_path,
        format!(
            "# defaults\ncorpus\t{}\nmetric\tchisq\nseed\t5\nout\t{}\n",
            corpus_dir.display(),
            out.display()
        ),
    )
    .unwrap();

    // corpus, metric, seed, out all come from the config file
    let code = run(args(&["rank", "--config", config_path.to_str().unwrap()]));
    assert_eq!(code, 0);
    assert!(out.join("ranking_chisq.tsv").exists());

    // an explicit flag overrides the config file
    let code = run(args(&[
        "rank",
        "--config",
        config_path.to_str().unwrap(),
        "--metric",
        "gini",
    ]));
    assert_eq!(code, 0);
    assert!(out.join("ranking_gini.tsv").exists());
}

#[test]
fn manifest_format_flows_through() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    write_corpus(&corpus_dir);
    // manifest paths are relative to the manifest's directory
    let mut manifest = String::from("# id\tclass\tpath\n");
    for class in ["alif", "bay", "jeem"] {
        for i in 0..6 {
            manifest.push_str(&format!("{class}{i}\t{class}\t{class}/doc{i}.txt\n"));
        }
    }
    let manifest_path = corpus_dir.join("manifest.tsv");
    std::fs::write(&manifest_path, manifest).unwrap();
    let out = dir.path().join("out");
    let code = run(args(&[
        "profile",
        "--corpus",
        manifest_path.to_str().unwrap(),
        "--format",
        "manifest-tsv",
        "--top-n",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    assert!(out.join("profile.tsv").exists());
}

#[test]
fn timing_flag_is_echoed_into_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    write_corpus(&corpus_dir);
    let out = dir.path().join("out");
    let code = run(args(&[
        "sweep",
        "--corpus",
        corpus_dir.to_str().unwrap(),
        "--metrics",
        "acc2",
        "--k",
        "2",
        "--classifiers",
        "nb",
        "--timing",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let tsv = std::fs::read_to_string(out.join("result.tsv")).unwrap();
    assert!(tsv.contains("# emit_timing\t1"));
}

#[test]
fn lexicon_and_stoplist_flags_flow_through() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    write_corpus(&corpus_dir);
    let lexicon = dir.path().join("lexicon.tsv");
    std::fs::write(&lexicon, "مشترکہ\tمشترک\n").unwrap();
    let stops = dir.path().join("stops.txt");
    std::fs::write(&stops, "ہے\nنمبر\n").unwrap();
    let out = dir.path().join("out");
    let code = run(args(&[
        "profile",
        "--corpus",
        corpus_dir.to_str().unwrap(),
        "--lexicon",
        lexicon.to_str().unwrap(),
        "--stoplist",
        stops.to_str().unwrap(),
        "--top-n",
        "50",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let profile = std::fs::read_to_string(out.join("profile.tsv")).unwrap();
    assert!(profile.contains("مشترک\t"), "lemma applied: {profile}");
    assert!(!profile.contains("\nہے\t"), "stop word removed: {profile}");
    assert!(!profile.contains("\nنمبر\t"));
}
