use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::AssocError;
use crate::matrix::TermDocumentMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Itemset {
    /// Sorted, distinct terms.
    pub items: Vec<String>,
    /// Number of documents containing every item.
    pub count: usize,
    /// `count / N`.
    pub support: f64,
}

/// Document set of an itemset, one bit per document.
#[derive(Clone)]
struct DocSet(Vec<u64>);

impl DocSet {
    fn from_row(tdm: &TermDocumentMatrix, term: usize) -> Self {
        let mut words = vec![0u64; tdm.n_docs().div_ceil(64)];
        for p in tdm.row(term) {
            words[p.doc / 64] |= 1 << (p.doc % 64);
        }
        DocSet(words)
    }

    fn intersect(&self, other: &DocSet) -> DocSet {
        DocSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Smallest document count meeting `min_support`, with a 1e-9 slack so a
/// decimal threshold like 0.3 over 10 documents admits count 3.
pub(crate) fn min_count(min_support: f64, n_docs: usize) -> usize {
    (min_support * n_docs as f64 - 1e-9).ceil().max(0.0) as usize
}

/// Level-wise Apriori over documents as transactions.
///
/// Candidates of size k are joined from frequent (k-1)-itemsets sharing
/// their first k-2 items, pruned when any (k-1)-subset is infrequent, then
/// counted. Output is sorted by size, then lexicographically.
pub fn mine_itemsets(tdm: &TermDocumentMatrix, min_support: f64) -> Result<Vec<Itemset>, AssocError> {
    if !(min_support > 0.0 && min_support <= 1.0) {
        return Err(AssocError::InvalidSupport(min_support));
    }
    let n = tdm.n_docs();
    let threshold = min_count(min_support, n).max(1);

    // Term indices are in lexicographic order, so index vectors sort the same
    // way as the term vectors they stand for.
    let mut level: Vec<(Vec<usize>, DocSet)> = (0..tdm.n_terms())
        .map(|t| (vec![t], DocSet::from_row(tdm, t)))
        .filter(|(_, docs)| docs.len() >= threshold)
        .collect();

    let mut found: Vec<(Vec<usize>, usize)> = Vec::new();
    while !level.is_empty() {
        found.extend(level.iter().map(|(items, docs)| (items.clone(), docs.len())));
        let frequent: HashSet<&[usize]> = level.iter().map(|(items, _)| items.as_slice()).collect();

        let mut next = Vec::new();
        for i in 0..level.len() {
            for j in i + 1..level.len() {
                let (a, b) = (&level[i].0, &level[j].0);
                let k = a.len();
                if a[..k - 1] != b[..k - 1] {
                    // Level is sorted, so no later j shares this prefix.
                    break;
                }
                let mut candidate = a.clone();
                candidate.push(b[k - 1]);
                let all_subsets_frequent = (0..candidate.len() - 2).all(|skip| {
                    let subset: Vec<usize> = candidate
                        .iter()
                        .enumerate()
                        .filter(|&(pos, _)| pos != skip)
                        .map(|(_, &t)| t)
                        .collect();
                    frequent.contains(subset.as_slice())
                });
                if !all_subsets_frequent {
                    continue;
                }
                let docs = level[i].1.intersect(&level[j].1);
                if docs.len() >= threshold {
                    next.push((candidate, docs));
                }
            }
        }
        level = next;
    }

    Ok(found
        .into_iter()
        .map(|(items, count)| Itemset {
            items: items.iter().map(|&t| tdm.terms()[t].clone()).collect(),
            count,
            support: count as f64 / n as f64,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::build_tdm;
    use crate::preprocess::TermSequence;

    fn fixture() -> TermDocumentMatrix {
        build_tdm(&[
            TermSequence::new("d1", ["bank", "robbery"]),
            TermSequence::new("d2", ["bank", "robbery"]),
            TermSequence::new("d3", ["bank", "fraud"]),
            TermSequence::new("d4", ["child", "abuse"]),
        ])
        .unwrap()
    }

    fn summary(sets: &[Itemset]) -> Vec<(Vec<&str>, f64)> {
        sets.iter()
            .map(|s| (s.items.iter().map(String::as_str).collect(), s.support))
            .collect()
    }

    #[test]
    fn fixture_half_support() {
        let sets = mine_itemsets(&fixture(), 0.5).unwrap();
        assert_eq!(
            summary(&sets),
            vec![
                (vec!["bank"], 0.75),
                (vec!["robbery"], 0.5),
                (vec!["bank", "robbery"], 0.5)
            ]
        );
    }

    #[test]
    fn above_max_support_is_empty() {
        assert!(mine_itemsets(&fixture(), 0.76).unwrap().is_empty());
    }

    #[test]
    fn single_document_everything_frequent() {
        let tdm = build_tdm(&[TermSequence::new("d", ["a", "b"])]).unwrap();
        let sets = mine_itemsets(&tdm, 1.0).unwrap();
        assert_eq!(
            summary(&sets),
            vec![(vec!["a"], 1.0), (vec!["b"], 1.0), (vec!["a", "b"], 1.0)]
        );
    }

    #[test]
    fn invalid_support() {
        for s in [0.0, -0.1, 1.01, f64::NAN] {
            assert!(matches!(
                mine_itemsets(&fixture(), s),
                Err(AssocError::InvalidSupport(_))
            ));
        }
    }

    #[test]
    fn min_count_slack() {
        assert_eq!(min_count(0.3, 10), 3);
        assert_eq!(min_count(0.25, 4), 1);
        assert_eq!(min_count(0.26, 4), 2);
        assert_eq!(min_count(1.0, 7), 7);
    }

    #[test]
    fn wide_corpus_crosses_word_boundary() {
        // 130 documents exercise multi-word document bitsets.
        let seqs: Vec<TermSequence> = (0..130)
            .map(|i| {
                let mut terms = vec!["common"];
                if i % 2 == 0 {
                    terms.push("even");
                }
                if i >= 100 {
                    terms.push("late");
                }
                TermSequence::new(format!("d{i}"), terms)
            })
            .collect();
        let tdm = build_tdm(&seqs).unwrap();
        let sets = mine_itemsets(&tdm, 0.1).unwrap();
        let get = |items: &[&str]| sets.iter().find(|s| s.items == items).map(|s| s.count);
        assert_eq!(get(&["common"]), Some(130));
        assert_eq!(get(&["even"]), Some(65));
        assert_eq!(get(&["late"]), Some(30));
        assert_eq!(get(&["common", "even", "late"]), Some(15));
    }
}
