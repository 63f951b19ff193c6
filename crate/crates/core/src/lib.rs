//! Crime-theme mining over news headline corpora.
//!
//! The pipeline turns a collection of press-release headlines into:
//!
//! * a sparse term-document matrix with collection and document frequencies,
//! * phi-coefficient term associations and Apriori itemsets/rules,
//! * a hierarchical clustering of terms (exported as Newick),
//! * a deterministic word-cloud layout rendered as SVG.
//!
//! [`pipeline::run_report`] runs every stage and writes a report directory;
//! [`pipeline::evaluate`] compares indicator-term hits with hand labels.
//!
//! ```
//! use newsmine_core::{ingest::{Corpus, Document}, preprocess, matrix};
//!
//! let corpus = Corpus::new("demo", vec![
//!     Document::new("d1", "Bank Robbery Suspect Arrested").unwrap(),
//!     Document::new("d2", "Second Bank Robbery in Albuquerque").unwrap(),
//! ]).unwrap();
//! let seqs = preprocess::preprocess_corpus(&corpus, &Default::default()).unwrap();
//! let tdm = matrix::build_tdm(&seqs).unwrap();
//! let stats = matrix::term_frequencies(&tdm);
//! assert_eq!(stats[0].term, "bank");
//! assert_eq!(stats[0].document_frequency, 2);
//! ```

pub mod associate;
pub mod cloud;
pub mod cluster;
pub mod ingest;
pub mod matrix;
pub mod pipeline;
pub mod preprocess;
pub mod svg;

mod error;

pub use associate::{AssociationResult, Itemset, Rule};
pub use cloud::{CloudConfig, PlacedWord, WordCloudLayout};
pub use cluster::{Dendrogram, DistanceMatrix, Linkage};
pub use error::{Error, Result};
pub use ingest::{Corpus, Document, RawPage};
pub use matrix::{TermDocumentMatrix, TermStats};
pub use pipeline::{EvalMetrics, GoldLabels, PipelineConfig, ReportBundle};
pub use preprocess::{PreprocessConfig, TermSequence};

/// Rounds half away from zero to two decimals, the precision used in every
/// human-facing table.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}
