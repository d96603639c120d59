//! Lemma lexicon and stop-word list, both loaded from UTF-8 files and
//! normalized with the same pipeline they will run against.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use super::{normalize_text, TextError, TokenizerConfig};

/// Exact-match surface → base-form mapping. Keys and values are normalized
/// at load so lookups hit tokens produced by [`normalize_text`].
#[derive(Debug, Clone, Default)]
pub struct LemmaLexicon {
    map: HashMap<String, String>,
}

impl LemmaLexicon {
    /// Loads a TSV file of `surface<TAB>lemma` pairs. Lines starting with
    /// `#` and blank lines are ignored.
    pub fn load(path: &Path, config: &TokenizerConfig) -> Result<Self, TextError> {
        let content = std::fs::read_to_string(path).map_err(|source| TextError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut pairs = Vec::new();
        for (idx, line) in content.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 2 {
                return Err(TextError::BadEntry {
                    path: path.to_path_buf(),
                    line: line_no,
                    message: format!("expected `surface<TAB>lemma`, got {} fields", fields.len()),
                });
            }
            pairs.push((fields[0].to_string(), fields[1].to_string()));
        }
        Self::from_pairs(pairs, config)
    }

    /// Builds a lexicon from in-memory pairs, normalizing both sides.
    pub fn from_pairs(
        pairs: Vec<(String, String)>,
        config: &TokenizerConfig,
    ) -> Result<Self, TextError> {
        let mut map = HashMap::with_capacity(pairs.len());
        for (surface, lemma) in pairs {
            let surface = normalize_text(&surface, config);
            let lemma = normalize_text(&lemma, config);
            if surface.is_empty() || lemma.is_empty() {
                return Err(TextError::BadEntry {
                    path: Path::new("<memory>").to_path_buf(),
                    line: 0,
                    message: "empty surface or lemma after normalization".to_string(),
                });
            }
            if map.insert(surface.clone(), lemma) .is_some() {
                return Err(TextError::DuplicateSurface { surface });
            }
        }
        Ok(Self { map })
    }

    pub fn get(&self, token: &str) -> Option<&str> {
        self.map.get(token).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Number of distinct base forms.
    pub fn base_form_count(&self) -> usize {
        self.map.values().collect::<HashSet<_>>().len()
    }
}

/// Set of stop tokens. Entries are normalized at load, so every entry maps
/// to itself under renewed normalization.
#[derive(Debug, Clone, Default)]
pub struct StopList {
    set: HashSet<String>,
}

impl StopList {
    /// Loads one token per line; `#` comments and blank lines are ignored.
    pub fn load(path: &Path, config: &TokenizerConfig) -> Result<Self, TextError> {
        let content = std::fs::read_to_string(path).map_err(|source| TextError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let entries = content
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect();
        Self::from_entries(entries, config)
    }

    pub fn from_entries(
        entries: Vec<String>,
        config: &TokenizerConfig,
    ) -> Result<Self, TextError> {
        let mut set = HashSet::with_capacity(entries.len());
        for entry in entries {
            let normalized = normalize_text(&entry, config);
            if normalized.is_empty() {
                return Err(TextError::BadEntry {
                    path: Path::new("<memory>").to_path_buf(),
                    line: 0,
                    message: "stop entry empty after normalization".to_string(),
                });
            }
            set.insert(normalized);
        }
        Ok(Self { set })
    }

    pub fn contains(&self, token: &str) -> bool {
        self.set.contains(token)
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> TokenizerConfig {
        TokenizerConfig::default()
    }

    #[test]
    fn lexicon_keys_are_normalized_at_load() {
        // surface stored with a kasra; lookups use stripped tokens
        let lex = LemmaLexicon::from_pairs(
            vec![("ک\u{0650}تابیں".to_string(), "کتاب".to_string())],
            &cfg(),
        )
        .unwrap();
        assert_eq!(lex.get("کتابیں"), Some("کتاب"));
    }

    #[test]
    fn duplicate_surface_rejected() {
        let err = LemmaLexicon::from_pairs(
            vec![
                ("کتابیں".to_string(), "کتاب".to_string()),
                ("کتابیں".to_string(), "کتب".to_string()),
            ],
            &cfg(),
        );
        assert!(matches!(err, Err(TextError::DuplicateSurface { .. })));
    }

    #[test]
    fn empty_pair_rejected() {
        let err = LemmaLexicon::from_pairs(vec![(String::new(), "x".to_string())], &cfg());
        assert!(err.is_err());
    }

    #[test]
    fn stoplist_entries_are_normalization_fixed_points() {
        let stops =
            StopList::from_entries(vec!["ی\u{0650}ہ".to_string(), "ABC".to_string()], &cfg())
                .unwrap();
        assert!(stops.contains("یہ"));
        assert!(stops.contains("abc"));
        assert!(!stops.contains("ABC"));
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let lex_path = dir.path().join("lexicon.tsv");
        std::fs::write(&lex_path, "# comment\nکتابیں\tکتاب\n\nگئے\tجانا\n").unwrap();
        let lex = LemmaLexicon::load(&lex_path, &cfg()).unwrap();
        assert_eq!(lex.len(), 2);
        assert_eq!(lex.base_form_count(), 2);
        assert_eq!(lex.get("گئے"), Some("جانا"));

        let stop_path = dir.path().join("stops.txt");
        std::fs::write(&stop_path, "یہ\n# skip\nوہ\n").unwrap();
        let stops = StopList::load(&stop_path, &cfg()).unwrap();
        assert_eq!(stops.len(), 2);
        assert!(stops.contains("وہ"));
    }

    #[test]
    fn malformed_lexicon_line_reports_location() {
        let dir = tempfile::tempdir().unwrap();
        let lex_path = dir.path().join("bad.tsv");
        std::fs::write(&lex_path, "only-one-field\n").unwrap();
        match LemmaLexicon::load(&lex_path, &cfg()) {
            Err(TextError::BadEntry { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected BadEntry, got {other:?}"),
        }
    }
}
