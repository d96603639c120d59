//! Versioned on-disk model format: a tagged header, TSV parameter blocks,
//! and a trailing 64-bit checksum line. Floats are written with 17
//! significant digits, so a loaded model predicts bit-identically.

use std::path::Path;
use std::sync::Arc;

use crate::util::{fmt_f64_17, fnv1a64};
use crate::vectorize::Vocabulary;

use super::nb::NBModel;
use super::svm::{ClassTraining, LinearModel, SvmParams};
use super::{ClassifierKind, ModelError};

const FORMAT_TAG: &str = "tasnif-model";
const FORMAT_VERSION: u32 = 1;

/// A model of either kind, as read back from disk.
#[derive(Debug, Clone)]
pub enum AnyModel {
    NaiveBayes(NBModel),
    LinearSvm(LinearModel),
}

impl AnyModel {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            AnyModel::NaiveBayes(_) => ClassifierKind::NaiveBayes,
            AnyModel::LinearSvm(_) => ClassifierKind::LinearSvm,
        }
    }

    pub fn classes(&self) -> &[String] {
        match self {
            AnyModel::NaiveBayes(m) => m.classes(),
            AnyModel::LinearSvm(m) => m.classes(),
        }
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        match self {
            AnyModel::NaiveBayes(m) => m.vocab(),
            AnyModel::LinearSvm(m) => m.vocab(),
        }
    }
}

fn header(kind: ClassifierKind, vocab_hash: u64) -> String {
    format!("{FORMAT_TAG}\tversion={FORMAT_VERSION}\ttype={kind}\tvocab_hash={vocab_hash:016x}\n")
}

fn finish(mut body: String, path: &Path) -> Result<(), ModelError> {
    let checksum = fnv1a64(body.as_bytes());
    body.push_str(&format!("checksum\t{checksum:016x}\n"));
    std::fs::write(path, body).map_err(|source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn save_nb_model(model: &NBModel, path: &Path) -> Result<(), ModelError> {
    let mut out = header(ClassifierKind::NaiveBayes, model.vocab().hash64());
    out.push_str(&format!("param\talpha\t{}\n", fmt_f64_17(model.alpha())));
    for (label, prior) in model.classes().iter().zip(model.log_prior()) {
        out.push_str(&format!("class\t{label}\t{}\n", fmt_f64_17(*prior)));
    }
    for term in model.vocab().terms() {
        out.push_str(&format!("term\t{term}\n"));
    }
    for (label, row) in model.classes().iter().zip(model.log_likelihood()) {
        out.push_str(&format!("loglik\t{label}"));
        for v in row {
            out.push('\t');
            out.push_str(&fmt_f64_17(*v));
        }
        out.push('\n');
    }
    finish(out, path)
}

pub fn save_linear_model(model: &LinearModel, path: &Path) -> Result<(), ModelError> {
    let mut out = header(ClassifierKind::LinearSvm, model.vocab().hash64());
    let p = model.params();
    out.push_str(&format!("param\tc\t{}\n", fmt_f64_17(p.c)));
    out.push_str(&format!("param\ttol\t{}\n", fmt_f64_17(p.tol)));
    out.push_str(&format!("param\tmax_epochs\t{}\n", p.max_epochs));
    out.push_str(&format!("param\tseed\t{}\n", p.seed));
    out.push_str(&format!(
        "param\tnormalized\t{}\n",
        u8::from(model.input_normalized())
    ));
    for (i, label) in model.classes().iter().enumerate() {
        let t = model.training().get(i);
        out.push_str(&format!(
            "class\t{label}\t{}\t{}\t{}\t{}\n",
            fmt_f64_17(model.class_weights()[i]),
            t.map_or(1, |t| u8::from(t.converged)),
            t.map_or(0, |t| t.epochs),
            fmt_f64_17(t.map_or(0.0, |t| t.final_violation)),
        ));
    }
    for term in model.vocab().terms() {
        out.push_str(&format!("term\t{term}\n"));
    }
    out.push_str("idf");
    for v in model.idf() {
        out.push('\t');
        out.push_str(&fmt_f64_17(*v));
    }
    out.push('\n');
    for (i, label) in model.classes().iter().enumerate() {
        out.push_str(&format!(
            "weights\t{label}\t{}",
            fmt_f64_17(model.bias()[i])
        ));
        for v in &model.weights()[i] {
            out.push('\t');
            out.push_str(&fmt_f64_17(*v));
        }
        out.push('\n');
    }
    finish(out, path)
}

struct RawModel {
    kind: ClassifierKind,
    vocab_hash: u64,
    params: Vec<(String, String)>,
    classes: Vec<Vec<String>>,
    terms: Vec<String>,
    idf: Option<Vec<f64>>,
    loglik: Vec<(String, Vec<f64>)>,
    weights: Vec<(String, Vec<f64>)>,
}

fn read_raw(path: &Path) -> Result<RawModel, ModelError> {
    let content = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    })?;

    // checksum covers every byte before its own line
    let Some(tail_start) = content.trim_end_matches('\n').rfind('\n').map(|i| i + 1) else {
        return Err(ModelError::Truncated);
    };
    let last_line = content[tail_start..].trim_end_matches('\n');
    let Some(stated) = last_line.strip_prefix("checksum\t") else {
        return Err(ModelError::Truncated);
    };
    let stated = u64::from_str_radix(stated, 16).map_err(|_| ModelError::ChecksumMismatch)?;
    if fnv1a64(&content.as_bytes()[..tail_start]) != stated {
        return Err(ModelError::ChecksumMismatch);
    }

    let bad = |line: usize, message: String| ModelError::Format {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut lines = content[..tail_start].lines().enumerate();
    let (_, head) = lines.next().ok_or(ModelError::Truncated)?;
    let head_fields: Vec<&str> = head.split('\t').collect();
    if head_fields.len() != 4 || head_fields[0] != FORMAT_TAG {
        return Err(bad(1, format!("expected `{FORMAT_TAG}` header")));
    }
    let version: u32 = head_fields[1]
        .strip_prefix("version=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| bad(1, "bad version field".to_string()))?;
    if version != FORMAT_VERSION {
        return Err(ModelError::VersionMismatch {
            expected: FORMAT_VERSION,
            found: version,
        });
    }
    let kind: ClassifierKind = head_fields[2]
        .strip_prefix("type=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| bad(1, "bad type field".to_string()))?;
    let vocab_hash = head_fields[3]
        .strip_prefix("vocab_hash=")
        .and_then(|v| u64::from_str_radix(v, 16).ok())
        .ok_or_else(|| bad(1, "bad vocab_hash field".to_string()))?;

    let mut raw = RawModel {
        kind,
        vocab_hash,
        params: Vec::new(),
        classes: Vec::new(),
        terms: Vec::new(),
        idf: None,
        loglik: Vec::new(),
        weights: Vec::new(),
    };
    for (idx, line) in lines {
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        let parse_floats = |fs: &[&str]| -> Result<Vec<f64>, ModelError> {
            fs.iter()
                .map(|f| {
                    f.parse()
                        .map_err(|_| bad(line_no, format!("bad float `{f}`")))
                })
                .collect()
        };
        match fields[0] {
            "param" if fields.len() == 3 => {
                raw.params.push((fields[1].to_string(), fields[2].to_string()));
            }
            "class" if fields.len() >= 3 => {
                raw.classes
                    .push(fields[1..].iter().map(|s| s.to_string()).collect());
            }
            "term" if fields.len() == 2 => raw.terms.push(fields[1].to_string()),
            "idf" => raw.idf = Some(parse_floats(&fields[1..])?),
            "loglik" if fields.len() >= 2 => {
                raw.loglik
                    .push((fields[1].to_string(), parse_floats(&fields[2..])?));
            }
            "weights" if fields.len() >= 3 => {
                raw.weights
                    .push((fields[1].to_string(), parse_floats(&fields[2..])?));
            }
            other => return Err(bad(line_no, format!("unrecognized block `{other}`"))),
        }
    }
    Ok(raw)
}

fn get_param(raw: &RawModel, name: &str, path: &Path) -> Result<String, ModelError> {
    raw.params
        .iter()
        .find(|(k, _)| k == name)
        .map(|(_, v)| v.clone())
        .ok_or_else(|| ModelError::Format {
            path: path.to_path_buf(),
            line: 0,
            message: format!("missing param `{name}`"),
        })
}

fn build_vocab(raw: &RawModel, path: &Path) -> Result<Arc<Vocabulary>, ModelError> {
    let vocab =
        Vocabulary::from_terms(raw.terms.clone()).map_err(|e| ModelError::Format {
            path: path.to_path_buf(),
            line: 0,
            message: format!("bad vocabulary block: {e}"),
        })?;
    if vocab.hash64() != raw.vocab_hash {
        return Err(ModelError::ChecksumMismatch);
    }
    Ok(Arc::new(vocab))
}

pub fn load_nb_model(path: &Path) -> Result<NBModel, ModelError> {
    let raw = read_raw(path)?;
    if raw.kind != ClassifierKind::NaiveBayes {
        return Err(ModelError::WrongModelType {
            expected: ClassifierKind::NaiveBayes.to_string(),
            found: raw.kind.to_string(),
        });
    }
    let malformed = |message: &str| ModelError::Format {
        path: path.to_path_buf(),
        line: 0,
        message: message.to_string(),
    };
    let alpha: f64 = get_param(&raw, "alpha", path)?
        .parse()
        .map_err(|_| malformed("bad alpha"))?;
    let vocab = build_vocab(&raw, path)?;
    let mut classes = Vec::new();
    let mut log_prior = Vec::new();
    for c in &raw.classes {
        if c.len() != 2 {
            return Err(malformed("class line needs label and log_prior"));
        }
        classes.push(c[0].clone());
        log_prior.push(c[1].parse().map_err(|_| malformed("bad log_prior"))?);
    }
    let mut log_likelihood = vec![Vec::new(); classes.len()];
    for (label, row) in raw.loglik {
        let idx = classes
            .iter()
            .position(|c| c == &label)
            .ok_or_else(|| malformed("loglik for unknown class"))?;
        if row.len() != vocab.len() {
            return Err(ModelError::DimensionMismatch {
                expected: vocab.len(),
                got: row.len(),
            });
        }
        log_likelihood[idx] = row;
    }
    if log_likelihood.iter().any(Vec::is_empty) {
        return Err(malformed("missing loglik block for a class"));
    }
    Ok(NBModel::from_parts(
        classes,
        log_prior,
        log_likelihood,
        alpha,
        vocab,
    ))
}

pub fn load_linear_model(path: &Path) -> Result<LinearModel, ModelError> {
    let raw = read_raw(path)?;
    if raw.kind != ClassifierKind::LinearSvm {
        return Err(ModelError::WrongModelType {
            expected: ClassifierKind::LinearSvm.to_string(),
            found: raw.kind.to_string(),
        });
    }
    let malformed = |message: &str| ModelError::Format {
        path: path.to_path_buf(),
        line: 0,
        message: message.to_string(),
    };
    let params = SvmParams {
        c: get_param(&raw, "c", path)?.parse().map_err(|_| malformed("bad c"))?,
        tol: get_param(&raw, "tol", path)?.parse().map_err(|_| malformed("bad tol"))?,
        max_epochs: get_param(&raw, "max_epochs", path)?
            .parse()
            .map_err(|_| malformed("bad max_epochs"))?,
        seed: get_param(&raw, "seed", path)?.parse().map_err(|_| malformed("bad seed"))?,
    };
    let normalized = get_param(&raw, "normalized", path)? == "1";
    let vocab = build_vocab(&raw, path)?;
    let idf = raw.idf.clone().ok_or_else(|| malformed("missing idf block"))?;
    if idf.len() != vocab.len() {
        return Err(ModelError::DimensionMismatch {
            expected: vocab.len(),
            got: idf.len(),
        });
    }

    let mut classes = Vec::new();
    let mut class_weights = Vec::new();
    let mut training = Vec::new();
    for c in &raw.classes {
        if c.len() != 5 {
            return Err(malformed("class line needs label, weight, converged, epochs, violation"));
        }
        classes.push(c[0].clone());
        class_weights.push(c[1].parse().map_err(|_| malformed("bad class weight"))?);
        training.push(ClassTraining {
            class_label: c[0].clone(),
            converged: c[2] == "1",
            epochs: c[3].parse().map_err(|_| malformed("bad epochs"))?,
            final_violation: c[4].parse().map_err(|_| malformed("bad violation"))?,
            dual_objective: Vec::new(),
        });
    }
    let mut weights = vec![Vec::new(); classes.len()];
    let mut bias = vec![0.0; classes.len()];
    for (label, mut row) in raw.weights {
        let idx = classes
            .iter()
            .position(|c| c == &label)
            .ok_or_else(|| malformed("weights for unknown class"))?;
        if row.len() != vocab.len() + 1 {
            return Err(ModelError::DimensionMismatch {
                expected: vocab.len() + 1,
                got: row.len(),
            });
        }
        bias[idx] = row.remove(0);
        weights[idx] = row;
    }
    if weights.iter().any(Vec::is_empty) && !vocab.is_empty() {
        return Err(malformed("missing weights block for a class"));
    }
    Ok(LinearModel::from_parts(
        classes,
        weights,
        bias,
        params,
        class_weights,
        vocab,
        idf,
        normalized,
        training,
    ))
}

/// Loads whichever model kind the file declares.
pub fn load_any_model(path: &Path) -> Result<AnyModel, ModelError> {
    let raw = read_raw(path)?;
    match raw.kind {
        ClassifierKind::NaiveBayes => load_nb_model(path).map(AnyModel::NaiveBayes),
        ClassifierKind::LinearSvm => load_linear_model(path).map(AnyModel::LinearSvm),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Corpus, Document};
    use crate::models::{train_linear_svm, train_nb};
    use crate::vectorize::{apply_tfidf, compute_idf, count_matrix, DocTermMatrix};

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
                vec!["alpha".into(), "shared".into()]
            } else {
                vec!["beta".into(), "shared".into()]
            }
        });
        let vocab = Arc::new(Vocabulary::from_corpus(&corpus).unwrap());
        count_matrix(&corpus, &vocab).unwrap()
    }

    #[test]
    fn nb_round_trip_predicts_identically() {
        let dir = tempfile::tempdir().unwrap();
        let m = toy_matrix();
        let model = train_nb(&m, 1.0).unwrap();
        let path = dir.path().join("model.nb.tsv");
        save_nb_model(&model, &path).unwrap();
        let loaded = load_nb_model(&path).unwrap();

        for row in 0..m.n_docs() {
            let (l1, s1) = model.predict(m.row(row)).unwrap();
            let (l2, s2) = loaded.predict(m.row(row)).unwrap();
            assert_eq!(l1, l2);
            let b1: Vec<u64> = s1.iter().map(|v| v.to_bits()).collect();
            let b2: Vec<u64> = s2.iter().map(|v| v.to_bits()).collect();
            assert_eq!(b1, b2);
        }
        // a second save of the loaded model is byte-identical
        let path2 = dir.path().join("model2.nb.tsv");
        save_nb_model(&loaded, &path2).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&path2).unwrap());
    }

    #[test]
    fn svm_round_trip_predicts_identically() {
        let dir = tempfile::tempdir().unwrap();
        let m = toy_matrix();
        let idf = compute_idf(&m).unwrap();
        let w = apply_tfidf(&m, &idf, true).unwrap();
        let model = train_linear_svm(&w, &Default::default()).unwrap();
        let path = dir.path().join("model.svm.tsv");
        save_linear_model(&model, &path).unwrap();
        let loaded = load_linear_model(&path).unwrap();

        assert!(loaded.input_normalized());
        assert_eq!(loaded.idf().len(), m.n_terms());
        for row in 0..w.n_docs() {
            let (l1, s1) = model.predict(w.row(row)).unwrap();
            let (l2, s2) = loaded.predict(w.row(row)).unwrap();
            assert_eq!(l1, l2);
            let b1: Vec<u64> = s1.iter().map(|v| v.to_bits()).collect();
            let b2: Vec<u64> = s2.iter().map(|v| v.to_bits()).collect();
            assert_eq!(b1, b2);
        }
    }

    #[test]
    fn corruption_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let m = toy_matrix();
        let model = train_nb(&m, 1.0).unwrap();
        let path = dir.path().join("model.tsv");
        save_nb_model(&model, &path).unwrap();
        let mut content = std::fs::read_to_string(&path).unwrap();
        content = content.replacen("alpha", "alpho", 1);
        std::fs::write(&path, content).unwrap();
        assert!(matches!(
            load_nb_model(&path),
            Err(ModelError::ChecksumMismatch)
        ));
    }

    #[test]
    fn truncation_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let m = toy_matrix();
        let model = train_nb(&m, 1.0).unwrap();
        let path = dir.path().join("model.tsv");
        save_nb_model(&model, &path).unwrap();
        let content = std::fs::read_to_string(&path).unwrap();
        let cut = content.len() - 20;
        std::fs::write(&path, &content[..cut]).unwrap();
        let err = load_nb_model(&path).unwrap_err();
        assert!(
            matches!(err, ModelError::Truncated | ModelError::ChecksumMismatch),
            "got {err:?}"
        );
    }

    #[test]
    fn wrong_type_tag_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let m = toy_matrix();
        let model = train_nb(&m, 1.0).unwrap();
        let path = dir.path().join("model.tsv");
        save_nb_model(&model, &path).unwrap();
        assert!(matches!(
            load_linear_model(&path),
            Err(ModelError::WrongModelType { .. })
        ));
        assert!(matches!(
            load_any_model(&path),
            Ok(AnyModel::NaiveBayes(_))
        ));
    }

    #[test]
    fn loader_survives_any_truncation_or_bit_flip() {
        let dir = tempfile::tempdir().unwrap();
        let m = toy_matrix();
        let model = train_nb(&m, 1.0).unwrap();
        let path = dir.path().join("model.tsv");
        save_nb_model(&model, &path).unwrap();
        let original = std::fs::read(&path).unwrap();
        let mangled = dir.path().join("mangled.tsv");

        // every truncation point must yield a typed error, never a panic
        for cut in (0..original.len()).step_by(7) {
            std::fs::write(&mangled, &original[..cut]).unwrap();
            assert!(load_nb_model(&mangled).is_err(), "cut at {cut}");
        }
        // single-byte corruptions likewise (xor 0x01 so hex digits change
        // value; a 0x20 flip could merely toggle hex case)
        for pos in (0..original.len()).step_by(11) {
            let mut copy = original.clone();
            copy[pos] ^= 0x01;
            std::fs::write(&mangled, &copy).unwrap();
            assert!(load_nb_model(&mangled).is_err(), "flip at {pos}");
        }
    }

    #[test]
    fn version_bump_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let m = toy_matrix();
        let model = train_nb(&m, 1.0).unwrap();
        let path = dir.path().join("model.tsv");
        save_nb_model(&model, &path).unwrap();
        let content = std::fs::read_to_string(&path).unwrap();
        let mut body = content.replacen("version=1", "version=9", 1);
        // re-stamp the checksum so only the version differs
        let tail = body.rfind("checksum\t").unwrap();
        body.truncate(tail);
        let checksum = crate::util::fnv1a64(body.as_bytes());
        body.push_str(&format!("checksum\t{checksum:016x}\n"));
        std::fs::write(&path, body).unwrap();
        assert!(matches!(
            load_nb_model(&path),
            Err(ModelError::VersionMismatch { found: 9, .. })
        ));
    }
}
