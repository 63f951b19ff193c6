//! Term associations: phi-coefficient co-occurrence scores against a target
//! term, plus Apriori frequent itemsets and association rules over headlines
//! treated as transactions.

mod apriori;
mod rules;

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::TermDocumentMatrix;
use crate::round2;

pub use apriori::{mine_itemsets, Itemset};
pub use rules::{derive_rules, write_rules_csv, Rule};

/// Default association threshold.
pub const DEFAULT_THRESHOLD: f64 = 0.25;

/// Slack absorbing rounding when a score sits exactly on the threshold.
const SCORE_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum AssocError {
    #[error("term {0:?} is not in the vocabulary")]
    UnknownTerm(String),
    #[error("term {0:?} occurs in every document or in none; its correlation is undefined")]
    DegenerateTarget(String),
    #[error("at least 2 documents are needed, got {0}")]
    TooFewDocuments(usize),
    #[error("threshold must be in [0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("min_support must be in (0, 1], got {0}")]
    InvalidSupport(f64),
    #[error("min_confidence must be in (0, 1], got {0}")]
    InvalidConfidence(f64),
    #[error("malformed itemsets: {0}")]
    MalformedInput(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Association {
    pub term: String,
    pub score: f64,
}

/// Terms correlated with `target`, strongest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationResult {
    pub target: String,
    pub threshold: f64,
    pub pairs: Vec<Association>,
}

/// Phi coefficient from a 2×2 contingency table: `n` documents, `a` and `b`
/// containing each term, `both` containing the two.
///
/// Returns `None` when either term has zero variance.
pub fn phi(n: usize, a: usize, b: usize, both: usize) -> Option<f64> {
    if a == 0 || a == n || b == 0 || b == n {
        return None;
    }
    let (n, a, b, both) = (n as i128, a as i128, b as i128, both as i128);
    let num = n * both - a * b;
    let den = ((a * (n - a)) as f64).sqrt() * ((b * (n - b)) as f64).sqrt();
    Some((num as f64 / den).clamp(-1.0, 1.0))
}

fn overlap(tdm: &TermDocumentMatrix, target: &[bool], term: usize) -> usize {
    tdm.row(term).iter().filter(|p| target[p.doc]).count()
}

/// Correlation between the presence vectors of two terms, or `None` if
/// either is unknown or has zero variance.
pub fn score_pair(tdm: &TermDocumentMatrix, a: &str, b: &str) -> Option<f64> {
    let (ia, ib) = (tdm.term_index(a)?, tdm.term_index(b)?);
    let both = overlap(tdm, &tdm.incidence(ia), ib);
    phi(
        tdm.n_docs(),
        tdm.document_frequency(ia),
        tdm.document_frequency(ib),
        both,
    )
}

/// Scores every other term against `target` by the Pearson correlation of
/// binary presence vectors (the phi coefficient) and keeps those scoring at
/// least `threshold`. Zero-variance terms are skipped.
pub fn find_associations(
    tdm: &TermDocumentMatrix,
    target: &str,
    threshold: f64,
) -> Result<AssociationResult, AssocError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(AssocError::InvalidThreshold(threshold));
    }
    let n = tdm.n_docs();
    if n < 2 {
        return Err(AssocError::TooFewDocuments(n));
    }
    let t = tdm
        .term_index(target)
        .ok_or_else(|| AssocError::UnknownTerm(target.to_string()))?;
    let df_target = tdm.document_frequency(t);
    if df_target == 0 || df_target == n {
        return Err(AssocError::DegenerateTarget(target.to_string()));
    }

    let incidence = tdm.incidence(t);
    let mut pairs: Vec<Association> = (0..tdm.n_terms())
        .filter(|&u| u != t)
        .filter_map(|u| {
            let score = phi(n, df_target, tdm.document_frequency(u), overlap(tdm, &incidence, u))?;
            (score >= threshold - SCORE_EPS).then(|| Association {
                term: tdm.terms()[u].clone(),
                score,
            })
        })
        .collect();
    pairs.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.term.cmp(&b.term)));

    Ok(AssociationResult {
        target: target.to_string(),
        threshold,
        pairs,
    })
}

/// Writes `target,co_term,score` rows with scores rounded to two decimals.
pub fn write_associations_csv<W: Write>(result: &AssociationResult, out: W) -> Result<(), AssocError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["target", "co_term", "score"])?;
    for pair in &result.pairs {
        w.write_record([
            result.target.as_str(),
            pair.term.as_str(),
            &format!("{:.2}", round2(pair.score)),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
