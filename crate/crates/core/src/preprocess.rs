//! Headline text to term sequences.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::ingest::Corpus;

const BUNDLED_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("corpus contains no documents")]
    EmptyCorpus,
    #[error("min_token_length must be at least 1")]
    InvalidMinLength,
    #[error("reading stopwords from {path}: {source}")]
    Stopwords {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessConfig {
    pub lowercase: bool,
    pub strip_punctuation: bool,
    pub remove_numbers: bool,
    #[serde(deserialize_with = "lowercase_set")]
    pub stopwords: BTreeSet<String>,
    pub min_token_length: usize,
    /// Porter stemming, applied last.
    pub stem: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            lowercase: true,
            strip_punctuation: true,
            remove_numbers: true,
            stopwords: default_stopwords(),
            min_token_length: 2,
            stem: false,
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<(), PreprocessError> {
        if self.min_token_length == 0 {
            return Err(PreprocessError::InvalidMinLength);
        }
        Ok(())
    }

    pub fn with_stopwords<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.stopwords = words.into_iter().map(|w| w.as_ref().to_lowercase()).collect();
        self
    }
}

fn lowercase_set<'de, D: Deserializer<'de>>(de: D) -> Result<BTreeSet<String>, D::Error> {
    let words = Vec::<String>::deserialize(de)?;
    Ok(words.iter().map(|w| w.to_lowercase()).collect())
}

/// The bundled English stopword list.
pub fn default_stopwords() -> BTreeSet<String> {
    parse_stopwords(BUNDLED_STOPWORDS)
}

/// Parses a one-word-per-line list; `#` starts a comment, blank lines are
/// ignored, words are lowercased.
pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or("").trim())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn load_stopwords(path: &Path) -> Result<BTreeSet<String>, PreprocessError> {
    std::fs::read_to_string(path)
        .map(|text| parse_stopwords(&text))
        .map_err(|source| PreprocessError::Stopwords {
            path: path.to_path_buf(),
            source,
        })
}

/// The terms of one document, in text order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermSequence {
    pub doc_id: String,
    pub terms: Vec<String>,
}

impl TermSequence {
    pub fn new<S: Into<String>>(doc_id: impl Into<String>, terms: impl IntoIterator<Item = S>) -> Self {
        TermSequence {
            doc_id: doc_id.into(),
            terms: terms.into_iter().map(Into::into).collect(),
        }
    }
}

fn is_punctuation(c: char) -> bool {
    !c.is_alphanumeric()
}

/// Splits `text` into terms.
///
/// Per whitespace-separated token: edge punctuation is trimmed; internal
/// punctuation becomes a token boundary when `strip_punctuation` is set;
/// all-digit tokens are dropped when `remove_numbers` is set; then
/// case-folding, the minimum length check, stopword removal and finally
/// stemming.
pub fn tokenize(text: &str, config: &PreprocessConfig) -> Vec<String> {
    let mut out = Vec::new();
    for raw in text.split_whitespace() {
        let trimmed = raw.trim_matches(is_punctuation);
        if trimmed.is_empty() {
            continue;
        }
        let pieces: Vec<&str> = if config.strip_punctuation {
            trimmed.split(is_punctuation).filter(|p| !p.is_empty()).collect()
        } else {
            vec![trimmed]
        };
        for piece in pieces {
            if config.remove_numbers && piece.chars().all(char::is_numeric) {
                continue;
            }
            let token = if config.lowercase {
                piece.to_lowercase()
            } else {
                piece.to_string()
            };
            if token.chars().count() < config.min_token_length {
                continue;
            }
            let is_stopword = if config.lowercase {
                config.stopwords.contains(&token)
            } else {
                config.stopwords.contains(&token.to_lowercase())
            };
            if is_stopword {
                continue;
            }
            out.push(if config.stem {
                porter_stemmer::stem(&token)
            } else {
                token
            });
        }
    }
    out
}

/// One [`TermSequence`] per document, in corpus order. Documents left with
/// no terms are kept so document counts match the corpus size.
pub fn preprocess_corpus(corpus: &Corpus, config: &PreprocessConfig) -> Result<Vec<TermSequence>, PreprocessError> {
    if corpus.is_empty() {
        return Err(PreprocessError::EmptyCorpus);
    }
    config.validate()?;
    Ok(corpus
        .documents()
        .iter()
        .map(|doc| TermSequence {
            doc_id: doc.id.clone(),
            terms: tokenize(&doc.headline, config),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Document;
    use proptest::prelude::*;

    fn defaults() -> PreprocessConfig {
        PreprocessConfig::default()
    }

    #[test]
    fn basic_lowercase_split() {
        assert_eq!(
            tokenize("Albuquerque Man Sentenced", &defaults()),
            ["albuquerque", "man", "sentenced"]
        );
    }

    #[test]
    fn empty_text() {
        assert!(tokenize("", &defaults()).is_empty());
    }

    #[test]
    fn hyphen_punctuation_and_numbers() {
        assert_eq!(
            tokenize("Bank-robbery suspect, 2014", &defaults()),
            ["bank", "robbery", "suspect"]
        );
    }

    #[test]
    fn stopwords_and_short_tokens_dropped() {
        assert_eq!(
            tokenize("Man Pleads Guilty to a Robbery of the U.S. Bank", &defaults()),
            ["man", "pleads", "guilty", "robbery", "bank"]
        );
    }

    #[test]
    fn punctuation_kept_when_disabled() {
        let cfg = PreprocessConfig {
            strip_punctuation: false,
            ..defaults()
        };
        assert_eq!(tokenize("\"Bank-robbery\" suspect", &cfg), ["bank-robbery", "suspect"]);
    }

    #[test]
    fn numbers_kept_when_disabled() {
        let cfg = PreprocessConfig {
            remove_numbers: false,
            ..defaults()
        };
        assert_eq!(
            tokenize("Sentenced to 120 months", &cfg),
            ["sentenced", "120", "months"]
        );
        // Mixed alphanumerics are never number-only.
        assert_eq!(tokenize("1st I-40 shooting", &defaults()), ["1st", "shooting"]);
    }

    #[test]
    fn case_preserved_but_stopwords_still_match() {
        let cfg = PreprocessConfig {
            lowercase: false,
            ..defaults()
        };
        assert_eq!(tokenize("The Navajo Man", &cfg), ["Navajo", "Man"]);
    }

    #[test]
    fn porter_stemming_last() {
        let cfg = PreprocessConfig {
            stem: true,
            ..defaults()
        };
        assert_eq!(
            tokenize("Robberies robbery sentenced", &cfg),
            ["robberi", "robberi", "sentenc"]
        );
    }

    #[test]
    fn stopword_file_parsing() {
        let set = parse_stopwords("# header\nThe\n\n  and # inline\n");
        assert_eq!(set.into_iter().collect::<Vec<_>>(), ["and", "the"]);
        assert_eq!(default_stopwords().len(), 174);
    }

    #[test]
    fn config_json_lowercases_stopwords() {
        let cfg: PreprocessConfig = serde_json::from_str(r#"{"stopwords":["Man","BANK"],"stem":true}"#).unwrap();
        assert!(cfg.stopwords.contains("man") && cfg.stopwords.contains("bank"));
        assert!(cfg.stem && cfg.lowercase);
        assert_eq!(cfg.min_token_length, 2);
    }

    #[test]
    fn corpus_preprocessing_keeps_empty_documents() {
        let corpus = Corpus::new(
            "t",
            vec![
                Document::new("a", "Bank Robbery").unwrap(),
                Document::new("b", "Of the and").unwrap(),
            ],
        )
        .unwrap();
        let seqs = preprocess_corpus(&corpus, &defaults()).unwrap();
        assert_eq!(
            seqs,
            vec![
                TermSequence::new("a", ["bank", "robbery"]),
                TermSequence::new("b", Vec::<String>::new())
            ]
        );
    }

    #[test]
    fn empty_corpus_rejected() {
        let corpus = Corpus::new("t", vec![]).unwrap();
        assert!(matches!(
            preprocess_corpus(&corpus, &defaults()),
            Err(PreprocessError::EmptyCorpus)
        ));
    }

    #[test]
    fn zero_min_length_rejected() {
        let corpus = Corpus::new("t", vec![Document::new("a", "x").unwrap()]).unwrap();
        let cfg = PreprocessConfig {
            min_token_length: 0,
            ..defaults()
        };
        assert!(matches!(
            preprocess_corpus(&corpus, &cfg),
            Err(PreprocessError::InvalidMinLength)
        ));
    }

    fn config_strategy() -> impl Strategy<Value = PreprocessConfig> {
        (any::<bool>(), any::<bool>(), any::<bool>(), 1usize..4).prop_map(
            |(lowercase, strip_punctuation, remove_numbers, min)| PreprocessConfig {
                lowercase,
                strip_punctuation,
                remove_numbers,
                min_token_length: min,
                ..PreprocessConfig::default()
            },
        )
    }

    proptest! {
        #[test]
        fn tokenize_is_idempotent(text in "[A-Za-z0-9 ,.'\"\\-!?é]{0,60}", cfg in config_strategy()) {
            let once = tokenize(&text, &cfg);
            let twice = tokenize(&once.join(" "), &cfg);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn output_terms_are_clean(text in "\\PC{0,80}", cfg in config_strategy()) {
            for term in tokenize(&text, &cfg) {
                prop_assert!(!term.is_empty());
                prop_assert!(!term.chars().any(char::is_whitespace));
                prop_assert!(!cfg.stopwords.contains(&term.to_lowercase()));
            }
        }

        #[test]
        fn lowercased_latin_has_no_capitals(text in "[\\p{Latin}0-9 ,.'\\-]{0,80}") {
            for term in tokenize(&text, &PreprocessConfig::default()) {
                prop_assert!(!term.chars().any(char::is_uppercase), "{}", term);
            }
        }
    }
}
