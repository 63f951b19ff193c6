//! Sparse term-document matrix (terms as rows) and term statistics.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::preprocess::TermSequence;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("no term sequences to build a matrix from")]
    EmptyInput,
    #[error("max_sparsity must be in (0, 1], got {0}")]
    InvalidSparsity(f64),
    #[error("no term has sparsity <= {max_sparsity}; relax the threshold")]
    EmptyResult { max_sparsity: f64 },
    #[error("malformed matrix: {0}")]
    Malformed(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// A non-zero cell of a term row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: usize,
    pub count: u32,
}

/// Term occurrence counts, terms × documents.
///
/// Terms are strictly sorted; each row holds its non-zero cells sorted by
/// document index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermDocumentMatrix {
    terms: Vec<String>,
    doc_ids: Vec<String>,
    rows: Vec<Vec<Posting>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermStats {
    pub term: String,
    /// Total occurrences across the corpus.
    pub collection_frequency: u64,
    /// Number of documents containing the term.
    pub document_frequency: usize,
}

impl TermDocumentMatrix {
    /// Assembles a matrix from raw parts, checking every structural invariant.
    pub fn from_parts(terms: Vec<String>, doc_ids: Vec<String>, rows: Vec<Vec<Posting>>) -> Result<Self, MatrixError> {
        if terms.len() != rows.len() {
            return Err(MatrixError::Malformed(format!(
                "{} terms but {} rows",
                terms.len(),
                rows.len()
            )));
        }
        if let Some(w) = terms.windows(2).find(|w| w[0] >= w[1]) {
            return Err(MatrixError::Malformed(format!(
                "terms not strictly sorted at {:?}, {:?}",
                w[0], w[1]
            )));
        }
        for (term, row) in terms.iter().zip(&rows) {
            if row.windows(2).any(|w| w[0].doc >= w[1].doc) {
                return Err(MatrixError::Malformed(format!("row {term:?} not sorted by document")));
            }
            if row.iter().any(|p| p.count == 0 || p.doc >= doc_ids.len()) {
                return Err(MatrixError::Malformed(format!(
                    "row {term:?} has a zero or out-of-range cell"
                )));
            }
        }
        Ok(TermDocumentMatrix { terms, doc_ids, rows })
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn n_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn term_index(&self, term: &str) -> Option<usize> {
        self.terms.binary_search_by(|t| t.as_str().cmp(term)).ok()
    }

    pub fn row(&self, term: usize) -> &[Posting] {
        &self.rows[term]
    }

    pub fn count(&self, term: usize, doc: usize) -> u32 {
        let row = &self.rows[term];
        row.binary_search_by_key(&doc, |p| p.doc)
            .map(|i| row[i].count)
            .unwrap_or(0)
    }

    pub fn document_frequency(&self, term: usize) -> usize {
        self.rows[term].len()
    }

    pub fn collection_frequency(&self, term: usize) -> u64 {
        self.rows[term].iter().map(|p| u64::from(p.count)).sum()
    }

    /// Number of stored (non-zero) cells.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Each document as the sorted set of term indices it contains.
    pub fn transactions(&self) -> Vec<Vec<usize>> {
        let mut docs = vec![Vec::new(); self.n_docs()];
        for (t, row) in self.rows.iter().enumerate() {
            for p in row {
                docs[p.doc].push(t);
            }
        }
        docs
    }

    /// Presence/absence of `term` in each document.
    pub fn incidence(&self, term: usize) -> Vec<bool> {
        let mut v = vec![false; self.n_docs()];
        for p in &self.rows[term] {
            v[p.doc] = true;
        }
        v
    }

    /// Keeps only the listed rows (indices ascending), documents unchanged.
    pub fn select_terms(&self, keep: &[usize]) -> TermDocumentMatrix {
        TermDocumentMatrix {
            terms: keep.iter().map(|&t| self.terms[t].clone()).collect(),
            doc_ids: self.doc_ids.clone(),
            rows: keep.iter().map(|&t| self.rows[t].clone()).collect(),
        }
    }
}

/// Counts term occurrences per document. The vocabulary is the sorted union
/// of all terms; documents keep input order, including empty ones.
pub fn build_tdm(sequences: &[TermSequence]) -> Result<TermDocumentMatrix, MatrixError> {
    if sequences.is_empty() {
        return Err(MatrixError::EmptyInput);
    }
    let mut by_term: BTreeMap<&str, Vec<Posting>> = BTreeMap::new();
    for (doc, seq) in sequences.iter().enumerate() {
        let mut counts: BTreeMap<&str, u32> = BTreeMap::new();
        for term in &seq.terms {
            *counts.entry(term.as_str()).or_default() += 1;
        }
        for (term, count) in counts {
            by_term.entry(term).or_default().push(Posting { doc, count });
        }
    }
    let (terms, rows) = by_term.into_iter().map(|(t, r)| (t.to_string(), r)).unzip();
    Ok(TermDocumentMatrix {
        terms,
        doc_ids: sequences.iter().map(|s| s.doc_id.clone()).collect(),
        rows,
    })
}

/// Per-term counts, sorted by document frequency descending, ties by term.
pub fn term_frequencies(tdm: &TermDocumentMatrix) -> Vec<TermStats> {
    let mut stats: Vec<TermStats> = (0..tdm.n_terms())
        .map(|t| TermStats {
            term: tdm.terms[t].clone(),
            collection_frequency: tdm.collection_frequency(t),
            document_frequency: tdm.document_frequency(t),
        })
        .collect();
    stats.sort_by(|a, b| {
        b.document_frequency
            .cmp(&a.document_frequency)
            .then_with(|| a.term.cmp(&b.term))
    });
    stats
}

/// Keeps term `t` iff `1 - df(t)/N <= max_sparsity`.
///
/// The comparison is done as `N - df <= max_sparsity * N` with a 1e-9 slack
/// so decimal thresholds such as 0.8 keep their boundary terms.
pub fn remove_sparse_terms(tdm: &TermDocumentMatrix, max_sparsity: f64) -> Result<TermDocumentMatrix, MatrixError> {
    if !(max_sparsity > 0.0 && max_sparsity <= 1.0) {
        return Err(MatrixError::InvalidSparsity(max_sparsity));
    }
    let n = tdm.n_docs() as f64;
    let allowed_absent = max_sparsity * n + 1e-9;
    let keep: Vec<usize> = (0..tdm.n_terms())
        .filter(|&t| (tdm.n_docs() - tdm.document_frequency(t)) as f64 <= allowed_absent)
        .collect();
    if keep.is_empty() {
        return Err(MatrixError::EmptyResult { max_sparsity });
    }
    Ok(tdm.select_terms(&keep))
}

/// Writes `term,doc_id,count` triples sorted by (term, doc_id).
pub fn write_triples<W: Write>(tdm: &TermDocumentMatrix, out: W) -> Result<(), MatrixError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["term", "doc_id", "count"])?;
    for (term, row) in tdm.terms.iter().zip(&tdm.rows) {
        let mut cells: Vec<(&str, u32)> = row.iter().map(|p| (tdm.doc_ids[p.doc].as_str(), p.count)).collect();
        cells.sort_unstable();
        for (doc, count) in cells {
            w.write_record([term.as_str(), doc, &count.to_string()])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a triple list written by [`write_triples`].
///
/// Documents without any cell cannot be recovered from triples, so the
/// caller may pass the full document list; otherwise documents are the
/// distinct ids of the file in sorted order.
pub fn read_triples<R: Read>(input: R, doc_ids: Option<&[String]>) -> Result<TermDocumentMatrix, MatrixError> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["term", "doc_id", "count"] {
        return Err(MatrixError::Malformed(format!("unexpected header {:?}", headers)));
    }
    let mut triples = Vec::new();
    for record in reader.records() {
        let record = record?;
        let count: u32 = record[2]
            .parse()
            .map_err(|_| MatrixError::Malformed(format!("bad count {:?}", &record[2])))?;
        triples.push((record[0].to_string(), record[1].to_string(), count));
    }

    let doc_ids: Vec<String> = match doc_ids {
        Some(ids) => ids.to_vec(),
        None => {
            let mut ids: Vec<String> = triples.iter().map(|t| t.1.clone()).collect();
            ids.sort();
            ids.dedup();
            ids
        }
    };
    let doc_index: BTreeMap<&str, usize> = doc_ids.iter().enumerate().map(|(i, d)| (d.as_str(), i)).collect();

    let mut by_term: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    for (term, doc, count) in triples {
        let &d = doc_index
            .get(doc.as_str())
            .ok_or_else(|| MatrixError::Malformed(format!("unknown document {doc:?}")))?;
        by_term.entry(term).or_default().push(Posting { doc: d, count });
    }
    let (terms, mut rows): (Vec<String>, Vec<Vec<Posting>>) = by_term.into_iter().unzip();
    for row in &mut rows {
        row.sort_by_key(|p| p.doc);
    }
    TermDocumentMatrix::from_parts(terms, doc_ids, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn fixture() -> TermDocumentMatrix {
        build_tdm(&[
            TermSequence::new("d1", ["bank", "robbery"]),
            TermSequence::new("d2", ["bank", "robbery"]),
            TermSequence::new("d3", ["bank", "fraud"]),
            TermSequence::new("d4", ["child", "abuse"]),
        ])
        .unwrap()
    }

    fn df_of(stats: &[TermStats], term: &str) -> usize {
        stats.iter().find(|s| s.term == term).unwrap().document_frequency
    }

    #[test]
    fn single_doc_counts() {
        let tdm = build_tdm(&[TermSequence::new("d1", ["bank", "bank", "robbery"])]).unwrap();
        assert_eq!(tdm.terms(), ["bank", "robbery"]);
        assert_eq!(tdm.count(0, 0), 2);
        assert_eq!(tdm.count(1, 0), 1);
        let stats = term_frequencies(&tdm);
        assert_eq!((stats[0].collection_frequency, stats[0].document_frequency), (2, 1));
        assert_eq!((stats[1].collection_frequency, stats[1].document_frequency), (1, 1));
    }

    #[test]
    fn empty_document_column() {
        let tdm = build_tdm(&[
            TermSequence::new("d1", Vec::<String>::new()),
            TermSequence::new("d2", ["man"]),
        ])
        .unwrap();
        assert_eq!((tdm.n_terms(), tdm.n_docs()), (1, 2));
        assert_eq!(tdm.count(0, 0), 0);
        assert_eq!(tdm.count(0, 1), 1);
    }

    #[test]
    fn empty_input() {
        assert!(matches!(build_tdm(&[]), Err(MatrixError::EmptyInput)));
    }

    #[test]
    fn fixture_document_frequencies() {
        let stats = term_frequencies(&fixture());
        assert_eq!(df_of(&stats, "bank"), 3);
        assert_eq!(df_of(&stats, "robbery"), 2);
        for t in ["fraud", "child", "abuse"] {
            assert_eq!(df_of(&stats, t), 1);
        }
        let order: Vec<_> = stats.iter().map(|s| s.term.as_str()).collect();
        assert_eq!(order, ["bank", "robbery", "abuse", "child", "fraud"]);
    }

    #[test]
    fn sparsity_filter_on_fixture() {
        let kept = remove_sparse_terms(&fixture(), 0.5).unwrap();
        assert_eq!(kept.terms(), ["bank", "robbery"]);
        assert_eq!(kept.doc_ids(), fixture().doc_ids());
        assert_eq!(remove_sparse_terms(&fixture(), 1.0).unwrap(), fixture());
    }

    #[test]
    fn sparsity_boundary_ten_docs() {
        // df = 0..=9 across 10 terms over 10 docs; 0.8 keeps exactly df >= 2.
        let seqs: Vec<TermSequence> = (0..10)
            .map(|d| {
                let terms: Vec<String> = (1..10).filter(|&df| d < df).map(|df| format!("t{df}")).collect();
                TermSequence::new(format!("d{d}"), terms)
            })
            .collect();
        let tdm = build_tdm(&seqs).unwrap();
        let kept = remove_sparse_terms(&tdm, 0.8).unwrap();
        for t in 0..kept.n_terms() {
            assert!(kept.document_frequency(t) >= 2);
        }
        assert_eq!(kept.n_terms(), 8);
    }

    #[test]
    fn sparsity_errors() {
        assert!(matches!(
            remove_sparse_terms(&fixture(), 0.0),
            Err(MatrixError::InvalidSparsity(_))
        ));
        assert!(matches!(
            remove_sparse_terms(&fixture(), 1.5),
            Err(MatrixError::InvalidSparsity(_))
        ));
        assert!(matches!(
            remove_sparse_terms(&fixture(), 0.1),
            Err(MatrixError::EmptyResult { .. })
        ));
    }

    #[test]
    fn triples_csv_format() {
        let mut buf = Vec::new();
        write_triples(&fixture(), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text,
            "term,doc_id,count\nabuse,d4,1\nbank,d1,1\nbank,d2,1\nbank,d3,1\nchild,d4,1\nfraud,d3,1\nrobbery,d1,1\nrobbery,d2,1\n"
        );
        let ids = fixture().doc_ids().to_vec();
        assert_eq!(read_triples(&buf[..], Some(&ids)).unwrap(), fixture());
    }

    #[test]
    fn from_parts_rejects_unsorted_terms() {
        let err = TermDocumentMatrix::from_parts(vec!["b".into(), "a".into()], vec!["d".into()], vec![vec![], vec![]]);
        assert!(matches!(err, Err(MatrixError::Malformed(_))));
    }

    fn corpus_strategy() -> impl Strategy<Value = Vec<TermSequence>> {
        prop::collection::vec(prop::collection::vec(0u8..8, 0..7), 1..10).prop_map(|docs| {
            docs.into_iter()
                .enumerate()
                .map(|(i, ts)| TermSequence::new(format!("doc{i}"), ts.into_iter().map(|t| format!("w{t}"))))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn counts_match_naive_recount(seqs in corpus_strategy()) {
            let tdm = build_tdm(&seqs).unwrap();
            for (t, term) in tdm.terms().iter().enumerate() {
                let mut cf = 0u64;
                let mut df = 0usize;
                for (d, seq) in seqs.iter().enumerate() {
                    let n = seq.terms.iter().filter(|x| *x == term).count() as u32;
                    prop_assert_eq!(tdm.count(t, d), n);
                    cf += u64::from(n);
                    df += usize::from(n > 0);
                }
                prop_assert_eq!(tdm.collection_frequency(t), cf);
                prop_assert_eq!(tdm.document_frequency(t), df);
                prop_assert!(df as u64 <= cf);
            }
        }

        #[test]
        fn sparse_filter_is_submatrix(seqs in corpus_strategy(), s in 0.05f64..=1.0) {
            let tdm = build_tdm(&seqs).unwrap();
            if let Ok(kept) = remove_sparse_terms(&tdm, s) {
                prop_assert_eq!(kept.doc_ids(), tdm.doc_ids());
                for (k, term) in kept.terms().iter().enumerate() {
                    let t = tdm.term_index(term).unwrap();
                    for d in 0..tdm.n_docs() {
                        prop_assert_eq!(kept.count(k, d), tdm.count(t, d));
                    }
                }
            }
        }

        #[test]
        fn triples_round_trip(seqs in corpus_strategy()) {
            let tdm = build_tdm(&seqs).unwrap();
            let mut buf = Vec::new();
            write_triples(&tdm, &mut buf).unwrap();
            prop_assert_eq!(read_triples(&buf[..], Some(tdm.doc_ids())).unwrap(), tdm);
        }
    }
}
