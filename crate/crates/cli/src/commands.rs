use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use newsmine_core::associate::{self, find_associations};
use newsmine_core::cloud::{layout_cloud, render_svg};
use newsmine_core::cluster::{agglomerate, cut_tree, render_dendrogram_svg, term_distances, to_newick};
use newsmine_core::ingest::{self, CorpusFormat, CrawlConfig, ExtractionConfig};
use newsmine_core::matrix::{build_tdm, remove_sparse_terms, term_frequencies};
use newsmine_core::pipeline::{self, load_topic_terms, write_frequencies_csv, write_itemsets_csv, GoldLabels};
use newsmine_core::preprocess::{load_stopwords, preprocess_corpus};
use newsmine_core::{Corpus, PipelineConfig, TermDocumentMatrix};

use crate::args::*;

/// Config file (or defaults) with the shared corpus flags applied.
fn base_config(config: Option<&Path>, corpus: &CorpusArgs) -> Result<PipelineConfig> {
    let mut cfg = match config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if corpus.stem {
        cfg.preprocess.stem = true;
    }
    if let Some(path) = &corpus.stopwords {
        cfg.preprocess.stopwords = load_stopwords(path)?;
    }
    if let Some(n) = corpus.min_token_length {
        cfg.preprocess.min_token_length = n;
    }
    Ok(cfg)
}

fn load(args: &CorpusArgs) -> Result<Corpus> {
    let corpus = ingest::load_corpus(&args.corpus, CorpusFormat::detect(&args.corpus))?;
    log::info!("loaded {} headlines from {}", corpus.len(), args.corpus.display());
    Ok(corpus)
}

fn matrix(corpus: &Corpus, cfg: &PipelineConfig) -> Result<TermDocumentMatrix> {
    let sequences = preprocess_corpus(corpus, &cfg.preprocess)?;
    Ok(build_tdm(&sequences)?)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

pub fn fetch(args: FetchArgs) -> Result<()> {
    let mut crawl = CrawlConfig {
        max_pages: args.max_pages,
        delay: Duration::from_millis(args.delay_ms),
        ..Default::default()
    };
    if let Some(sel) = args.pagination_selector {
        crawl.pagination_selector = sel;
    }
    let pages = ingest::crawl(&args.url, &crawl)?;
    ingest::save_pages(&pages, &args.out)?;
    eprintln!("saved {} pages to {}", pages.len(), args.out.display());
    Ok(())
}

pub fn ingest(args: IngestArgs) -> Result<()> {
    let format = args.format.unwrap_or(match CorpusFormat::detect(&args.input) {
        CorpusFormat::Jsonl => InputFormat::Jsonl,
        CorpusFormat::Csv => InputFormat::Csv,
        CorpusFormat::TxtDir => InputFormat::TxtDir,
    });
    let label = args
        .out
        .file_stem()
        .map_or_else(|| "corpus".to_string(), |s| s.to_string_lossy().into_owned());
    let corpus = match format {
        InputFormat::Jsonl => ingest::load_corpus(&args.input, CorpusFormat::Jsonl)?,
        InputFormat::Csv => ingest::load_corpus(&args.input, CorpusFormat::Csv)?,
        InputFormat::TxtDir => ingest::load_corpus(&args.input, CorpusFormat::TxtDir)?,
        InputFormat::HtmlDir => {
            let mut extract = ExtractionConfig::default();
            if let Some(sel) = args.headline_selector {
                extract.headline_selector = sel;
            }
            if let Some(sel) = args.date_selector {
                extract = extract.with_date_selector(sel);
            }
            let mut documents = Vec::new();
            for page in ingest::load_pages(&args.input)? {
                documents.extend(ingest::extract_documents(&page, &extract)?);
            }
            if documents.is_empty() {
                return Err(ingest::IngestError::EmptyCorpus.into());
            }
            Corpus::new(label, documents)?
        }
    };
    ingest::save_corpus(&corpus, &args.out)?;
    eprintln!("wrote {} headlines to {}", corpus.len(), args.out.display());
    Ok(())
}

pub fn freq(config: Option<&Path>, args: FreqArgs) -> Result<()> {
    let cfg = base_config(config, &args.corpus)?;
    cfg.validate()?;
    let corpus = load(&args.corpus)?;
    let mut stats = term_frequencies(&matrix(&corpus, &cfg)?);
    if let Some(n) = args.top {
        stats.truncate(n);
    }
    eprintln!("{} headlines", corpus.len());
    write_frequencies_csv(&stats, io::stdout().lock())?;
    Ok(())
}

pub fn assoc(config: Option<&Path>, args: AssocArgs) -> Result<()> {
    let mut cfg = base_config(config, &args.corpus)?;
    if let Some(t) = args.threshold {
        cfg.assoc_threshold = t;
    }
    cfg.validate()?;
    let tdm = matrix(&load(&args.corpus)?, &cfg)?;
    // the target goes through the same normalisation as the headlines
    let term = newsmine_core::preprocess::tokenize(&args.term, &cfg.preprocess)
        .into_iter()
        .next()
        .unwrap_or_else(|| args.term.to_lowercase());
    let result = find_associations(&tdm, &term, cfg.assoc_threshold)?;
    associate::write_associations_csv(&result, io::stdout().lock())?;
    Ok(())
}

pub fn rules(config: Option<&Path>, args: RulesArgs) -> Result<()> {
    let mut cfg = base_config(config, &args.corpus)?;
    if let Some(s) = args.min_support {
        cfg.min_support = s;
    }
    if let Some(c) = args.min_confidence {
        cfg.min_confidence = c;
    }
    cfg.validate()?;
    let tdm = matrix(&load(&args.corpus)?, &cfg)?;
    let itemsets = associate::mine_itemsets(&tdm, cfg.min_support)?;
    if let Some(path) = &args.itemsets {
        let mut buf = Vec::new();
        write_itemsets_csv(&itemsets, &mut buf)?;
        write_file(path, &buf)?;
    }
    let rules = associate::derive_rules(&itemsets, cfg.min_confidence)?;
    eprintln!("{} frequent itemsets, {} rules", itemsets.len(), rules.len());
    associate::write_rules_csv(&rules, io::stdout().lock())?;
    Ok(())
}

pub fn cluster(config: Option<&Path>, args: ClusterArgs) -> Result<()> {
    let mut cfg = base_config(config, &args.corpus)?;
    if let Some(s) = args.max_sparsity {
        cfg.cluster.max_sparsity = s;
    }
    if let Some(l) = args.linkage {
        cfg.cluster.linkage = l;
    }
    if let Some(k) = args.clusters {
        cfg.cluster.clusters = k;
    }
    cfg.validate()?;
    let tdm = remove_sparse_terms(&matrix(&load(&args.corpus)?, &cfg)?, cfg.cluster.max_sparsity)?;
    let dendro = agglomerate(&term_distances(&tdm)?, cfg.cluster.linkage)?;
    write_file(&args.out, (to_newick(&dendro) + "\n").as_bytes())?;
    if let Some(svg) = &args.svg {
        write_file(svg, &render_dendrogram_svg(&dendro))?;
    }
    eprintln!("clustered {} terms ({} linkage)", tdm.n_terms(), cfg.cluster.linkage);
    if args.clusters.is_some() {
        let flat = cut_tree(&dendro, cfg.cluster.clusters)?;
        let mut out = io::stdout().lock();
        for (i, members) in flat.groups().iter().enumerate() {
            writeln!(out, "{}\t{}", i + 1, members.join(" "))?;
        }
    }
    Ok(())
}

pub fn cloud(config: Option<&Path>, args: CloudArgs) -> Result<()> {
    let mut cfg = base_config(config, &args.corpus)?;
    if let Some(seed) = args.seed {
        cfg.cloud.seed = seed;
    }
    if let Some(n) = args.max_words {
        cfg.cloud.max_words = n;
    }
    if let Some(w) = args.width {
        cfg.cloud.canvas.0 = w;
    }
    if let Some(h) = args.height {
        cfg.cloud.canvas.1 = h;
    }
    cfg.validate()?;
    let stats = term_frequencies(&matrix(&load(&args.corpus)?, &cfg)?);
    let layout = layout_cloud(&stats, &cfg.cloud)?;
    write_file(&args.out, &render_svg(&layout))?;
    eprintln!("placed {} words", layout.placed.len());
    if !layout.dropped.is_empty() {
        eprintln!("no room for: {}", layout.dropped.join(", "));
    }
    Ok(())
}

pub fn report(config: Option<&Path>, args: ReportArgs) -> Result<()> {
    let mut cfg = base_config(config, &args.corpus)?;
    if let Some(focus) = args.focus {
        cfg.focus_terms = Some(focus);
    }
    if let Some(seed) = args.seed {
        cfg.cloud.seed = seed;
    }
    cfg.validate()?;
    let bundle = pipeline::run_report(&load(&args.corpus)?, &cfg, &args.out)?;
    eprintln!("report written to {}", bundle.report_md.display());
    Ok(())
}

pub fn eval(config: Option<&Path>, args: EvalArgs) -> Result<()> {
    let cfg = base_config(config, &args.corpus)?;
    cfg.validate()?;
    let gold = GoldLabels::load(&args.gold)?;
    let topics = match &args.topics {
        Some(path) => load_topic_terms(path)?,
        None => gold.topics.clone(),
    };
    if topics.is_empty() {
        bail!("no topics: pass --topics or add a \"topics\" object to the gold file");
    }
    let metrics = pipeline::evaluate(&load(&args.corpus)?, &topics, &gold, &cfg.preprocess)?;
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &metrics)?;
    writeln!(out)?;
    Ok(())
}
