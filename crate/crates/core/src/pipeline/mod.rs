//! End-to-end report generation and the gold-label evaluation.

mod config;
mod evaluate;
mod report;

pub use config::{ClusterConfig, ConfigError, PipelineConfig};
pub use evaluate::{evaluate, load_topic_terms, EvalError, EvalMetrics, GoldLabels, TopicMetrics};
pub use report::{
    association_file_name, run_report, write_frequencies_csv, write_itemsets_csv, ReportBundle, ReportError, Stage,
    DEFAULT_FOCUS_TERMS,
};
