use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::config::PipelineConfig;
use crate::associate::{self, AssociationResult, Itemset, Rule};
use crate::cloud::{self, WordCloudLayout};
use crate::cluster::{self, Clusters};
use crate::ingest::Corpus;
use crate::matrix::{self, TermDocumentMatrix, TermStats};
use crate::preprocess;
use crate::{round2, Error};

/// Number of focus terms picked when the config names none.
pub const DEFAULT_FOCUS_TERMS: usize = 5;
/// Rules listed in the markdown report (the CSV has all of them).
const REPORT_RULES: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Preprocess,
    Matrix,
    Cloud,
    Cluster,
    Associations,
    Itemsets,
    Rules,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Preprocess => "preprocess",
            Stage::Matrix => "matrix",
            Stage::Cloud => "cloud",
            Stage::Cluster => "cluster",
            Stage::Associations => "associations",
            Stage::Itemsets => "itemsets",
            Stage::Rules => "rules",
            Stage::Write => "write",
        })
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ReportError {
    pub fn is_data_error(&self) -> bool {
        match self {
            ReportError::Stage { source, .. } => source.is_data_error(),
            ReportError::Io { .. } | ReportError::Csv(_) => false,
        }
    }
}

fn at<E: Into<Error>>(stage: Stage) -> impl FnOnce(E) -> ReportError {
    move |e| ReportError::Stage {
        stage,
        source: Box::new(e.into()),
    }
}

/// Paths of everything a report run wrote.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportBundle {
    pub dir: PathBuf,
    pub report_md: PathBuf,
    pub frequencies_csv: PathBuf,
    /// `None` when the vocabulary is empty.
    pub cloud_svg: Option<PathBuf>,
    /// `None` when clustering was skipped.
    pub dendrogram_newick: Option<PathBuf>,
    pub dendrogram_svg: Option<PathBuf>,
    /// (focus term, CSV path) for each association table written.
    pub association_csvs: Vec<(String, PathBuf)>,
    pub itemsets_csv: PathBuf,
    pub rules_csv: PathBuf,
}

struct ClusterOutcome {
    terms_kept: usize,
    newick: String,
    svg: Vec<u8>,
    clusters: Clusters,
}

enum FocusOutcome {
    Table(AssociationResult),
    Skipped(String),
}

/// Everything computed by a run, before anything touches the disk.
struct Analysis {
    tdm: TermDocumentMatrix,
    stats: Vec<TermStats>,
    cloud: Result<WordCloudLayout, String>,
    cluster: Result<ClusterOutcome, String>,
    focus: Vec<(String, FocusOutcome)>,
    itemsets: Vec<Itemset>,
    rules: Vec<Rule>,
}

fn analyze(corpus: &Corpus, config: &PipelineConfig) -> Result<Analysis, ReportError> {
    config.validate().map_err(at(Stage::Config))?;
    let sequences = preprocess::preprocess_corpus(corpus, &config.preprocess).map_err(at(Stage::Preprocess))?;
    let tdm = matrix::build_tdm(&sequences).map_err(at(Stage::Matrix))?;
    let stats = matrix::term_frequencies(&tdm);

    let cloud = if stats.is_empty() {
        Err("no terms left after preprocessing".to_string())
    } else {
        Ok(cloud::layout_cloud(&stats, &config.cloud).map_err(at(Stage::Cloud))?)
    };

    let cluster = cluster_terms(&tdm, config)?;

    let focus_terms: Vec<String> = match &config.focus_terms {
        Some(terms) => terms.clone(),
        None => stats.iter().take(DEFAULT_FOCUS_TERMS).map(|s| s.term.clone()).collect(),
    };
    let focus = focus_terms
        .into_iter()
        .map(|term| {
            let outcome = match associate::find_associations(&tdm, &term, config.assoc_threshold) {
                Ok(result) => FocusOutcome::Table(result),
                Err(e) => FocusOutcome::Skipped(e.to_string()),
            };
            (term, outcome)
        })
        .collect();

    let itemsets = associate::mine_itemsets(&tdm, config.min_support).map_err(at(Stage::Itemsets))?;
    let rules = associate::derive_rules(&itemsets, config.min_confidence).map_err(at(Stage::Rules))?;

    Ok(Analysis {
        tdm,
        stats,
        cloud,
        cluster,
        focus,
        itemsets,
        rules,
    })
}

fn cluster_terms(
    tdm: &TermDocumentMatrix,
    config: &PipelineConfig,
) -> Result<Result<ClusterOutcome, String>, ReportError> {
    if tdm.n_docs() < 2 {
        // every term distance would be zero
        return Ok(Err("fewer than 2 documents".to_string()));
    }
    let filtered = match matrix::remove_sparse_terms(tdm, config.cluster.max_sparsity) {
        Ok(m) => m,
        Err(matrix::MatrixError::EmptyResult { .. }) => {
            return Ok(Err(format!(
                "no term has sparsity at most {:.2}",
                config.cluster.max_sparsity
            )))
        }
        Err(e) => return Err(at(Stage::Cluster)(e)),
    };
    if filtered.n_terms() < 2 {
        return Ok(Err(format!(
            "fewer than 2 terms remain after the sparsity filter ({} left)",
            filtered.n_terms()
        )));
    }
    let dist = cluster::term_distances(&filtered).map_err(at(Stage::Cluster))?;
    let dendro = cluster::agglomerate(&dist, config.cluster.linkage).map_err(at(Stage::Cluster))?;
    let k = config.cluster.clusters.min(filtered.n_terms());
    let clusters = cluster::cut_tree(&dendro, k).map_err(at(Stage::Cluster))?;
    Ok(Ok(ClusterOutcome {
        terms_kept: filtered.n_terms(),
        newick: cluster::to_newick(&dendro) + "\n",
        svg: cluster::render_dendrogram_svg(&dendro),
        clusters,
    }))
}

fn to_bytes<E>(f: impl FnOnce(&mut Vec<u8>) -> Result<(), E>) -> Result<Vec<u8>, E> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

/// File name for a focus term's association table.
pub fn association_file_name(term: &str) -> String {
    let safe: String = term
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("assoc_{safe}.csv")
}

/// Runs the whole pipeline and writes its artifacts to `out_dir`.
///
/// Files are written to a temporary sibling directory which replaces
/// `out_dir` only once everything succeeded; on failure nothing is left
/// behind. Identical inputs give byte-identical files.
pub fn run_report(corpus: &Corpus, config: &PipelineConfig, out_dir: &Path) -> Result<ReportBundle, ReportError> {
    let analysis = analyze(corpus, config)?;

    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ReportError::Io { path, source }
    };
    let parent = match out_dir.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent).map_err(io_err(&parent))?;
    let staging = tempfile::Builder::new()
        .prefix(".newsmine-report-")
        .tempdir_in(&parent)
        .map_err(io_err(&parent))?;
    let tmp = staging.path();

    let write = |name: &str, bytes: &[u8]| -> Result<(), ReportError> {
        let path = tmp.join(name);
        fs::write(&path, bytes).map_err(io_err(&path))
    };
    write(
        "frequencies.csv",
        &to_bytes(|b| write_frequencies_csv(&analysis.stats, b))?,
    )?;
    if let Ok(layout) = &analysis.cloud {
        write("cloud.svg", &cloud::render_svg(layout))?;
    }
    if let Ok(outcome) = &analysis.cluster {
        write("dendrogram.newick", outcome.newick.as_bytes())?;
        write("dendrogram.svg", &outcome.svg)?;
    }
    let mut association_files = Vec::new();
    for (term, outcome) in &analysis.focus {
        if let FocusOutcome::Table(result) = outcome {
            let name = association_file_name(term);
            let bytes = to_bytes(|b| associate::write_associations_csv(result, b)).map_err(at(Stage::Write))?;
            write(&name, &bytes)?;
            association_files.push((term.clone(), name));
        }
    }
    write(
        "itemsets.csv",
        &to_bytes(|b| write_itemsets_csv(&analysis.itemsets, b))?,
    )?;
    let rules = to_bytes(|b| associate::write_rules_csv(&analysis.rules, b)).map_err(at(Stage::Write))?;
    write("rules.csv", &rules)?;
    write("report.md", render_markdown(corpus, config, &analysis).as_bytes())?;

    if out_dir.exists() {
        fs::remove_dir_all(out_dir).map_err(io_err(out_dir))?;
    }
    let kept = staging.keep();
    if let Err(e) = fs::rename(&kept, out_dir) {
        let _ = fs::remove_dir_all(&kept);
        return Err(io_err(out_dir)(e));
    }

    let dir = out_dir.to_path_buf();
    let path = |name: &str| dir.join(name);
    Ok(ReportBundle {
        report_md: path("report.md"),
        frequencies_csv: path("frequencies.csv"),
        cloud_svg: analysis.cloud.is_ok().then(|| path("cloud.svg")),
        dendrogram_newick: analysis.cluster.is_ok().then(|| path("dendrogram.newick")),
        dendrogram_svg: analysis.cluster.is_ok().then(|| path("dendrogram.svg")),
        association_csvs: association_files
            .into_iter()
            .map(|(term, name)| (term, path(&name)))
            .collect(),
        itemsets_csv: path("itemsets.csv"),
        rules_csv: path("rules.csv"),
        dir,
    })
}

/// Writes `term,document_frequency,collection_frequency` in frequency order.
pub fn write_frequencies_csv<W: std::io::Write>(stats: &[TermStats], out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["term", "document_frequency", "collection_frequency"])?;
    for s in stats {
        w.write_record([
            s.term.clone(),
            s.document_frequency.to_string(),
            s.collection_frequency.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `items,count,support` with items joined by `;`.
pub fn write_itemsets_csv<W: std::io::Write>(itemsets: &[Itemset], out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["items", "count", "support"])?;
    for s in itemsets {
        w.write_record([s.items.join(";"), s.count.to_string(), format!("{:.4}", s.support)])?;
    }
    w.flush()?;
    Ok(())
}

fn md_cell(text: &str) -> String {
    text.replace('|', "\\|")
}

fn render_markdown(corpus: &Corpus, config: &PipelineConfig, a: &Analysis) -> String {
    let mut md = String::new();
    let label = if corpus.label.is_empty() {
        "corpus"
    } else {
        corpus.label.as_str()
    };
    let _ = writeln!(md, "# Headline analysis: {}\n", md_cell(label));
    let _ = writeln!(md, "- Headlines (documents): {}", a.tdm.n_docs());
    let _ = writeln!(md, "- Distinct terms: {}", a.tdm.n_terms());
    let _ = writeln!(md, "- Non-zero matrix cells: {}", a.tdm.nnz());
    let _ = writeln!(
        md,
        "- Stemming: {}\n",
        if config.preprocess.stem { "on" } else { "off" }
    );

    md.push_str("## Term frequencies\n\n");
    md.push_str("Counts are plain frequencies: *documents* is the number of headlines containing the term, *occurrences* the total number of times it appears.\n\n");
    md.push_str("| Rank | Term | Documents | Occurrences |\n|---:|---|---:|---:|\n");
    for (rank, s) in a.stats.iter().take(config.top_terms).enumerate() {
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} |",
            rank + 1,
            md_cell(&s.term),
            s.document_frequency,
            s.collection_frequency
        );
    }
    md.push_str("\nFull table: `frequencies.csv`.\n\n");

    md.push_str("## Word cloud\n\n");
    match &a.cloud {
        Ok(layout) => {
            md.push_str("![Word cloud](cloud.svg)\n\n");
            let _ = writeln!(
                md,
                "{} of {} selected terms placed (seed {}).",
                layout.placed.len(),
                layout.placed.len() + layout.dropped.len(),
                layout.config.seed
            );
            if !layout.dropped.is_empty() {
                let _ = writeln!(md, "Dropped for lack of space: {}.", layout.dropped.join(", "));
            }
            md.push('\n');
        }
        Err(reason) => {
            let _ = writeln!(md, "_Skipped: {reason}._\n");
        }
    }

    md.push_str("## Term clusters\n\n");
    match &a.cluster {
        Ok(outcome) => {
            let _ = writeln!(
                md,
                "{} terms with sparsity at most {:.2}, clustered with {} linkage on Euclidean distances between term rows.\n",
                outcome.terms_kept, config.cluster.max_sparsity, config.cluster.linkage
            );
            md.push_str("![Dendrogram](dendrogram.svg)\n\nNewick tree: `dendrogram.newick`.\n\n");
            md.push_str("| Cluster | Terms |\n|---:|---|\n");
            for (i, group) in outcome.clusters.groups().iter().enumerate() {
                let terms: Vec<String> = group.iter().map(|t| md_cell(t)).collect();
                let _ = writeln!(md, "| {} | {} |", i + 1, terms.join(", "));
            }
            md.push('\n');
        }
        Err(reason) => {
            let _ = writeln!(md, "_Skipped: {reason}._\n");
        }
    }

    let _ = writeln!(md, "## Term associations (threshold {:.2})\n", config.assoc_threshold);
    md.push_str("Scores are the correlation between the presence of the focus term and of the co-occurring term across headlines.\n\n");
    if a.focus.is_empty() {
        md.push_str("_No focus terms._\n\n");
    }
    for (term, outcome) in &a.focus {
        let df = a.tdm.term_index(term).map(|t| a.tdm.document_frequency(t));
        match df {
            Some(df) => {
                let _ = writeln!(
                    md,
                    "### \"{}\" ({} of {} headlines)\n",
                    md_cell(term),
                    df,
                    a.tdm.n_docs()
                );
            }
            None => {
                let _ = writeln!(md, "### \"{}\"\n", md_cell(term));
            }
        }
        match outcome {
            FocusOutcome::Table(result) if result.pairs.is_empty() => {
                md.push_str("_No term reaches the threshold._\n\n");
            }
            FocusOutcome::Table(result) => {
                md.push_str("| Term | Co-occurrence |\n|---|---:|\n");
                for pair in &result.pairs {
                    let _ = writeln!(md, "| {} | {:.2} |", md_cell(&pair.term), round2(pair.score));
                }
                let _ = writeln!(md, "\nCSV: `{}`.\n", association_file_name(term));
            }
            FocusOutcome::Skipped(reason) => {
                let _ = writeln!(md, "_Skipped: {reason}._\n");
            }
        }
    }

    let _ = writeln!(
        md,
        "## Frequent itemsets and rules (min support {:.2}, min confidence {:.2})\n",
        config.min_support, config.min_confidence
    );
    let _ = writeln!(
        md,
        "{} frequent itemsets (`itemsets.csv`), {} rules (`rules.csv`).\n",
        a.itemsets.len(),
        a.rules.len()
    );
    if !a.rules.is_empty() {
        md.push_str("| Rule | Support | Confidence | Lift |\n|---|---:|---:|---:|\n");
        for r in a.rules.iter().take(REPORT_RULES) {
            let _ = writeln!(
                md,
                "| {{{}}} → {{{}}} | {:.2} | {:.2} | {:.2} |",
                md_cell(&r.antecedent.join(", ")),
                md_cell(&r.consequent.join(", ")),
                r.support,
                r.confidence,
                r.lift
            );
        }
        if a.rules.len() > REPORT_RULES {
            let _ = writeln!(md, "\nShowing the first {REPORT_RULES} rules.");
        }
    }
    md
}
