//! Corpus acquisition: crawling press-release listings, pulling headlines out
//! of HTML, and loading/saving headline corpora from flat files.

mod extract;
mod fetch;
mod load;

use std::collections::HashSet;
use std::path::PathBuf;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use extract::{extract_documents, ExtractionConfig};
pub use fetch::{crawl, fetch_pages, CrawlConfig};
pub use load::{load_corpus, load_pages, save_corpus, save_pages, write_jsonl, CorpusFormat};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("corpus contains no documents")]
    EmptyCorpus,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("fetching {url} failed: {reason}")]
    Fetch { url: String, reason: String },
    #[error("max_pages must be at least 1")]
    InvalidLimit,
    #[error("invalid url {0:?}")]
    InvalidUrl(String),
    #[error("invalid selector {selector:?}: {reason}")]
    InvalidSelector { selector: String, reason: String },
}

impl IngestError {
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            IngestError::Schema(_) | IngestError::EmptyCorpus | IngestError::Parse(_)
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IngestError::Io {
            path: path.into(),
            source,
        }
    }
}

/// One fetched HTML page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPage {
    pub url: url::Url,
    pub fetched_at: DateTime<Utc>,
    pub content: Vec<u8>,
}

/// A single headline. Each headline is one document of the corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub headline: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date: Option<NaiveDate>,
    #[serde(rename = "url", default, skip_serializing_if = "Option::is_none")]
    pub source_url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<String>,
}

impl Document {
    /// Builds a document with a whitespace-normalized headline. Fails when the
    /// headline is blank.
    pub fn new(id: impl Into<String>, headline: &str) -> Result<Self, IngestError> {
        let headline = normalize_whitespace(headline);
        if headline.is_empty() {
            return Err(IngestError::Schema("headline is empty".into()));
        }
        Ok(Document {
            id: id.into(),
            headline,
            date: None,
            source_url: None,
            body: None,
        })
    }
}

/// An ordered collection of headline documents with pairwise distinct ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub label: String,
    pub created_at: DateTime<Utc>,
    documents: Vec<Document>,
}

impl Corpus {
    pub fn new(label: impl Into<String>, documents: Vec<Document>) -> Result<Self, IngestError> {
        let mut seen = HashSet::with_capacity(documents.len());
        for doc in &documents {
            if doc.headline.trim().is_empty() {
                return Err(IngestError::Schema(format!(
                    "document {:?} has an empty headline",
                    doc.id
                )));
            }
            if !seen.insert(doc.id.as_str()) {
                return Err(IngestError::Schema(format!("duplicate document id {:?}", doc.id)));
            }
        }
        Ok(Corpus {
            label: label.into(),
            created_at: Utc::now(),
            documents,
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }
}

/// Collapses runs of whitespace to a single space and trims both ends.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whitespace_is_collapsed_and_trimmed() {
        assert_eq!(normalize_whitespace("  Man   Sentenced "), "Man Sentenced");
        assert_eq!(normalize_whitespace("a\t\nb"), "a b");
        assert_eq!(normalize_whitespace("   "), "");
    }

    #[test]
    fn corpus_rejects_duplicate_ids() {
        let docs = vec![Document::new("a", "one").unwrap(), Document::new("a", "two").unwrap()];
        assert!(matches!(Corpus::new("x", docs), Err(IngestError::Schema(_))));
    }

    #[test]
    fn blank_headline_is_rejected() {
        assert!(Document::new("a", " \t ").is_err());
    }
}
