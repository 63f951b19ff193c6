use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::Corpus;
use crate::preprocess::{self, PreprocessConfig, PreprocessError};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("gold labels reference unknown document {0:?}")]
    UnknownDocId(String),
    #[error("topic mismatch: {0}")]
    TopicMismatch(String),
    #[error("indicator {term:?} for topic {topic:?} does not preprocess to exactly one term")]
    InvalidIndicator { topic: String, term: String },
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error("reading {path}: {reason}")]
    Read { path: std::path::PathBuf, reason: String },
}

impl EvalError {
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            EvalError::UnknownDocId(_)
                | EvalError::TopicMismatch(_)
                | EvalError::InvalidIndicator { .. }
                | EvalError::Preprocess(PreprocessError::EmptyCorpus)
        )
    }
}

/// Hand-assigned topics per document plus the indicator term of each topic.
///
/// JSON form: `{"labels": {"doc_id": ["topic", ...]}, "topics": {"topic": "term"}}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldLabels {
    pub labels: BTreeMap<String, BTreeSet<String>>,
    #[serde(default)]
    pub topics: BTreeMap<String, String>,
}

impl GoldLabels {
    pub fn load(path: &Path) -> Result<Self, EvalError> {
        read_json(path)
    }
}

/// Reads a `{topic: term}` JSON object.
pub fn load_topic_terms(path: &Path) -> Result<BTreeMap<String, String>, EvalError> {
    read_json(path)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|e| EvalError::Read {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| EvalError::Read {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicMetrics {
    pub topic: String,
    /// Indicator term after preprocessing.
    pub term: String,
    /// Documents whose preprocessed headline contains the term.
    pub machine_count: usize,
    pub gold_count: usize,
    pub true_positives: usize,
    /// `None` when undefined (no machine hits but some gold documents).
    pub precision: Option<f64>,
    /// `None` when undefined (no gold documents but some machine hits).
    pub recall: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    /// One entry per topic, sorted by topic name.
    pub topics: Vec<TopicMetrics>,
}

/// Compares term-presence hits against gold labels, topic by topic.
///
/// A document is a machine hit for a topic when its preprocessed headline
/// contains the topic's indicator term. When both sets are empty, precision
/// and recall are 1.
pub fn evaluate(
    corpus: &Corpus,
    topic_terms: &BTreeMap<String, String>,
    gold: &GoldLabels,
    config: &PreprocessConfig,
) -> Result<EvalMetrics, EvalError> {
    if topic_terms.is_empty() {
        return Err(EvalError::TopicMismatch("no topics given".into()));
    }
    if !gold.topics.is_empty() && &gold.topics != topic_terms {
        return Err(EvalError::TopicMismatch(
            "topics in the gold file differ from the topic-term mapping".into(),
        ));
    }
    for (doc_id, labels) in &gold.labels {
        if corpus.get(doc_id).is_none() {
            return Err(EvalError::UnknownDocId(doc_id.clone()));
        }
        if let Some(topic) = labels.iter().find(|t| !topic_terms.contains_key(*t)) {
            return Err(EvalError::TopicMismatch(format!(
                "document {doc_id:?} is labelled with unknown topic {topic:?}"
            )));
        }
    }

    let sequences = preprocess::preprocess_corpus(corpus, config)?;
    let term_sets: Vec<(&str, HashSet<&str>)> = sequences
        .iter()
        .map(|s| (s.doc_id.as_str(), s.terms.iter().map(String::as_str).collect()))
        .collect();

    let mut topics = Vec::with_capacity(topic_terms.len());
    for (topic, raw_term) in topic_terms {
        let term = match preprocess::tokenize(raw_term, config).as_slice() {
            [single] => single.clone(),
            _ => {
                return Err(EvalError::InvalidIndicator {
                    topic: topic.clone(),
                    term: raw_term.clone(),
                })
            }
        };
        let machine: BTreeSet<&str> = term_sets
            .iter()
            .filter(|(_, terms)| terms.contains(term.as_str()))
            .map(|(id, _)| *id)
            .collect();
        let gold_docs: BTreeSet<&str> = gold
            .labels
            .iter()
            .filter(|(_, labels)| labels.contains(topic))
            .map(|(id, _)| id.as_str())
            .collect();
        let tp = machine.intersection(&gold_docs).count();
        let ratio = |num: usize, den: usize, other_empty: bool| match (den, other_empty) {
            (0, true) => Some(1.0),
            (0, false) => None,
            _ => Some(num as f64 / den as f64),
        };
        topics.push(TopicMetrics {
            topic: topic.clone(),
            term,
            machine_count: machine.len(),
            gold_count: gold_docs.len(),
            true_positives: tp,
            precision: ratio(tp, machine.len(), gold_docs.is_empty()),
            recall: ratio(tp, gold_docs.len(), machine.is_empty()),
        });
    }
    Ok(EvalMetrics { topics })
}
