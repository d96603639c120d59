//! Rule-based preprocessing for Arabic-script Urdu text: normalization,
//! sentence splitting, tokenization, lexicon lemmatization, and stop-word
//! filtering.
//!
//! Every operation here is a pure function; the whole pipeline
//! normalize → split → tokenize → lemmatize → filter is deterministic.

mod lexicon;

pub use lexicon::{LemmaLexicon, StopList};

use std::path::PathBuf;

use thiserror::Error;
use unicode_normalization::char::decompose_compatible;
use unicode_normalization::UnicodeNormalization;

use crate::corpus::Corpus;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("top_n must be at least 1")]
    ZeroTopN,
    #[error("document `{0}` has no token sequence; run preprocessing first")]
    NotTokenized(String),
    #[error("{path}:{line}: {message}")]
    BadEntry {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("lexicon surface form `{surface}` appears more than once")]
    DuplicateSurface { surface: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Flags controlling normalization and tokenization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TokenizerConfig {
    /// Strip Arabic diacritics U+064B–U+0652 and U+0670. Default `true`:
    /// Urdu text is inconsistently diacritized.
    pub strip_diacritics: bool,
    /// Keep digit-only tokens. Default `true`.
    pub keep_digits: bool,
    /// Lowercase ASCII letters. Default `true`.
    pub lowercase_ascii: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            strip_diacritics: true,
            keep_digits: true,
            lowercase_ascii: true,
        }
    }
}

fn is_presentation_form(c: char) -> bool {
    matches!(c, '\u{FB50}'..='\u{FDFF}' | '\u{FE70}'..='\u{FEFF}')
}

fn is_strippable_diacritic(c: char) -> bool {
    matches!(c, '\u{064B}'..='\u{0652}' | '\u{0670}')
}

/// Normalizes text to a canonical form: Arabic presentation forms are
/// expanded to their base letters, diacritics optionally stripped, the
/// result is NFC-composed, and ASCII optionally lowercased. Urdu digits
/// U+06F0–U+06F9 pass through untouched. Idempotent.
pub fn normalize_text(text: &str, config: &TokenizerConfig) -> String {
    let mut expanded = String::with_capacity(text.len());
    for c in text.chars() {
        if is_presentation_form(c) {
            decompose_compatible(c, |r| expanded.push(r));
        } else {
            expanded.push(c);
        }
    }
    let composed: String = expanded
        .chars()
        .filter(|c| !(config.strip_diacritics && is_strippable_diacritic(*c)))
        .nfc()
        .collect();
    if config.lowercase_ascii {
        composed.chars().map(|c| c.to_ascii_lowercase()).collect()
    } else {
        composed
    }
}

fn is_sentence_terminator(c: char) -> bool {
    matches!(c, '\u{06D4}' | '\u{061F}' | '!' | '?' | '.')
}

/// Splits normalized text into sentences on `۔ ؟ ! ? .` and blank lines.
/// Terminators are removed and empty segments dropped.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut current = String::new();
    let mut blank_gap = false;
    for line in text.lines() {
        if line.trim().is_empty() {
            blank_gap = true;
            continue;
        }
        if blank_gap {
            push_sentence(&mut current, &mut sentences);
            blank_gap = false;
        } else if !current.is_empty() {
            current.push(' ');
        }
        for c in line.chars() {
            if is_sentence_terminator(c) {
                push_sentence(&mut current, &mut sentences);
            } else {
                current.push(c);
            }
        }
    }
    push_sentence(&mut current, &mut sentences);
    sentences
}

fn push_sentence(current: &mut String, out: &mut Vec<String>) {
    let trimmed = current.trim();
    if !trimmed.is_empty() {
        out.push(trimmed.to_string());
    }
    current.clear();
}

const ZWNJ: char = '\u{200C}';

fn is_token_separator(c: char) -> bool {
    c.is_whitespace()
        || c.is_ascii_punctuation()
        || matches!(
            c,
            '\u{060C}' // ،
            | '\u{061B}' // ؛
            | '\u{06D4}' // ۔
            | '\u{061F}' // ؟
            | '\u{066A}' // ٪
            | '“' | '”' | '‘' | '’' | '„' | '‚'
            | '«' | '»' | '‹' | '›'
            | '…' | '–' | '—'
        )
}

fn is_digit_char(c: char) -> bool {
    c.is_ascii_digit() || matches!(c, '\u{06F0}'..='\u{06F9}' | '\u{0660}'..='\u{0669}')
}

/// Splits a normalized sentence into tokens on whitespace and punctuation.
/// ZWNJ (U+200C) is kept inside tokens but trimmed at token edges; digit-only
/// tokens are dropped when `keep_digits` is off.
pub fn tokenize(sentence: &str, config: &TokenizerConfig) -> Vec<String> {
    sentence
        .split(is_token_separator)
        .map(|raw| raw.trim_matches(ZWNJ))
        .filter(|t| !t.is_empty())
        .filter(|t| config.keep_digits || !t.chars().all(is_digit_char))
        .map(str::to_string)
        .collect()
}

/// Replaces each token by its lexicon base form when present; output length
/// always equals input length.
pub fn lemmatize(tokens: &[String], lexicon: &LemmaLexicon) -> Vec<String> {
    tokens
        .iter()
        .map(|t| lexicon.get(t).unwrap_or(t.as_str()).to_string())
        .collect()
}

/// Removes stop tokens, preserving the order of the rest.
pub fn filter_stopwords(tokens: &[String], stops: &StopList) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !stops.contains(t))
        .cloned()
        .collect()
}

/// The full preprocessing pipeline over raw documents.
#[derive(Debug, Clone, Default)]
pub struct Pipeline {
    pub config: TokenizerConfig,
    pub lexicon: LemmaLexicon,
    pub stops: StopList,
}

impl Pipeline {
    pub fn new(config: TokenizerConfig, lexicon: LemmaLexicon, stops: StopList) -> Self {
        Self {
            config,
            lexicon,
            stops,
        }
    }

    /// normalize → split → tokenize → lemmatize → filter for one text.
    pub fn process_text(&self, raw: &str) -> Vec<String> {
        let normalized = normalize_text(raw, &self.config);
        let mut tokens = Vec::new();
        for sentence in split_sentences(&normalized) {
            tokens.extend(tokenize(&sentence, &self.config));
        }
        let lemmas = lemmatize(&tokens, &self.lexicon);
        filter_stopwords(&lemmas, &self.stops)
    }

    /// Returns a corpus with every document's token sequence filled in.
    pub fn preprocess(&self, corpus: &Corpus) -> Corpus {
        corpus.with_tokens(|doc| self.process_text(&doc.raw_text))
    }
}

/// The `top_n` most frequent terms of a tokenized corpus, ordered by
/// frequency descending then term ascending. This reproduces the manual
/// stop-word curation workflow (rank the most frequent terms, review them).
pub fn frequency_profile(corpus: &Corpus, top_n: usize) -> Result<Vec<(String, u64)>, TextError> {
    if top_n == 0 {
        return Err(TextError::ZeroTopN);
    }
    let mut counts: std::collections::HashMap<&str, u64> = std::collections::HashMap::new();
    for doc in corpus.documents() {
        let tokens = doc
            .tokens
            .as_ref()
            .ok_or_else(|| TextError::NotTokenized(doc.id.clone()))?;
        for t in tokens {
            *counts.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(String, u64)> = counts
        .into_iter()
        .map(|(t, n)| (t.to_string(), n))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(top_n);
    Ok(ranked)
}
