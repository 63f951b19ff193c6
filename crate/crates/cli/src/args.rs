use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use newsmine_core::Linkage;

#[derive(Debug, Parser)]
#[command(
    name = "newsmine",
    version,
    about = "Mine crime news headlines for frequent terms, associations and term clusters"
)]
pub struct Cli {
    /// JSON pipeline config; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// More logging (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Crawl a listing page and its pagination links, saving raw HTML.
    Fetch(FetchArgs),
    /// Convert jsonl, csv, a directory of .txt files or fetched pages into a corpus.
    Ingest(IngestArgs),
    /// Term frequencies, most widespread first.
    Freq(FreqArgs),
    /// Terms correlated with a target term.
    Assoc(AssocArgs),
    /// Frequent itemsets and association rules.
    Rules(RulesArgs),
    /// Hierarchical clustering of the common terms.
    Cluster(ClusterArgs),
    /// Word cloud as SVG.
    Cloud(CloudArgs),
    /// Run every analysis and write a report directory.
    Report(ReportArgs),
    /// Compare term presence with hand-labelled topics.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    #[arg(long)]
    pub url: String,
    #[arg(long, default_value_t = 10)]
    pub max_pages: usize,
    /// Minimum gap between requests to the same host.
    #[arg(long, default_value_t = 1000)]
    pub delay_ms: u64,
    /// CSS selector for links to follow.
    #[arg(long)]
    pub pagination_selector: Option<String>,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Jsonl,
    Csv,
    TxtDir,
    /// Pages saved by `fetch`.
    HtmlDir,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Guessed from the input path when omitted (html-dir must be explicit).
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// CSS selector for headlines (html-dir only).
    #[arg(long)]
    pub headline_selector: Option<String>,
    /// CSS selector for dates (html-dir only).
    #[arg(long)]
    pub date_selector: Option<String>,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

/// Corpus input plus preprocessing overrides shared by the analysis commands.
#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Corpus file (jsonl or csv) or directory of .txt files.
    #[arg(long, value_name = "PATH")]
    pub corpus: PathBuf,
    /// Apply Porter stemming.
    #[arg(long)]
    pub stem: bool,
    /// Stopword list, one word per line, replacing the built-in list.
    #[arg(long, value_name = "FILE")]
    pub stopwords: Option<PathBuf>,
    #[arg(long)]
    pub min_token_length: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FreqArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Only the N most frequent terms.
    #[arg(long)]
    pub top: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AssocArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long)]
    pub term: String,
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RulesArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long)]
    pub min_support: Option<f64>,
    #[arg(long)]
    pub min_confidence: Option<f64>,
    /// Also write the frequent itemsets here.
    #[arg(long, value_name = "FILE")]
    pub itemsets: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long)]
    pub max_sparsity: Option<f64>,
    #[arg(long)]
    pub linkage: Option<Linkage>,
    /// Print the membership of this many flat clusters.
    #[arg(long)]
    pub clusters: Option<usize>,
    /// Dendrogram in Newick format.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Also draw the dendrogram as SVG.
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CloudArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_words: Option<usize>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub height: Option<f64>,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Comma-separated focus terms for association tables.
    #[arg(long, value_delimiter = ',')]
    pub focus: Option<Vec<String>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// `{"labels": {doc_id: [topic]}, "topics": {topic: term}}`
    #[arg(long, value_name = "FILE")]
    pub gold: PathBuf,
    /// `{topic: term}`; defaults to the topics in the gold file.
    #[arg(long, value_name = "FILE")]
    pub topics: Option<PathBuf>,
}
