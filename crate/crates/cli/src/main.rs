//! `newsmine` command-line tool.
//!
//! Exit status: 0 on success, 1 for usage errors (bad flags or config
//! values), 2 for problems with the input data (empty corpus, schema errors,
//! unknown terms), 3 for everything else.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use newsmine_core::associate::AssocError;
use newsmine_core::cloud::CloudError;
use newsmine_core::cluster::ClusterError;
use newsmine_core::ingest::IngestError;
use newsmine_core::matrix::MatrixError;
use newsmine_core::pipeline::{ConfigError, EvalError, ReportError};
use newsmine_core::preprocess::PreprocessError;

use args::{Cli, Command};

const USAGE: u8 = 1;
const DATA: u8 = 2;
const RUNTIME: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    let config = cli.config.as_deref();
    let result = match cli.command {
        Command::Fetch(a) => commands::fetch(a),
        Command::Ingest(a) => commands::ingest(a),
        Command::Freq(a) => commands::freq(config, a),
        Command::Assoc(a) => commands::assoc(config, a),
        Command::Rules(a) => commands::rules(config, a),
        Command::Cluster(a) => commands::cluster(config, a),
        Command::Cloud(a) => commands::cloud(config, a),
        Command::Report(a) => commands::report(config, a),
        Command::Eval(a) => commands::eval(config, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<ConfigError>() {
            return match e {
                ConfigError::Invalid(_) => USAGE,
                ConfigError::Json { .. } => DATA,
                ConfigError::Io { .. } => RUNTIME,
            };
        }
        if let Some(e) = cause.downcast_ref::<IngestError>() {
            return match e {
                IngestError::InvalidLimit | IngestError::InvalidUrl(_) | IngestError::InvalidSelector { .. } => USAGE,
                e if e.is_data_error() => DATA,
                _ => RUNTIME,
            };
        }
        if let Some(e) = cause.downcast_ref::<PreprocessError>() {
            return match e {
                PreprocessError::EmptyCorpus => DATA,
                PreprocessError::InvalidMinLength => USAGE,
                PreprocessError::Stopwords { .. } => RUNTIME,
            };
        }
        if let Some(e) = cause.downcast_ref::<AssocError>() {
            return match e {
                AssocError::UnknownTerm(_)
                | AssocError::DegenerateTarget(_)
                | AssocError::TooFewDocuments(_)
                | AssocError::MalformedInput(_) => DATA,
                AssocError::Csv(_) => RUNTIME,
                _ => USAGE,
            };
        }
        if let Some(e) = cause.downcast_ref::<MatrixError>() {
            return match e {
                MatrixError::InvalidSparsity(_) => USAGE,
                _ => DATA,
            };
        }
        if let Some(e) = cause.downcast_ref::<ClusterError>() {
            return match e {
                ClusterError::InvalidK { .. } => USAGE,
                _ => DATA,
            };
        }
        if let Some(e) = cause.downcast_ref::<CloudError>() {
            return match e {
                CloudError::EmptyStats => DATA,
                _ => USAGE,
            };
        }
        if let Some(e) = cause.downcast_ref::<EvalError>() {
            return if e.is_data_error() { DATA } else { RUNTIME };
        }
        if let Some(e) = cause.downcast_ref::<ReportError>() {
            return if e.is_data_error() { DATA } else { RUNTIME };
        }
    }
    RUNTIME
}
