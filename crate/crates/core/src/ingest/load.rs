use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{normalize_whitespace, Corpus, Document, IngestError, RawPage};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
    Csv,
    TxtDir,
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "csv" => Ok(CorpusFormat::Csv),
            "txt-dir" | "txt_dir" => Ok(CorpusFormat::TxtDir),
            other => Err(format!(
                "unknown corpus format {other:?} (expected jsonl, csv or txt-dir)"
            )),
        }
    }
}

impl CorpusFormat {
    /// Guesses the format from a path: directories are `txt-dir`, `.csv`
    /// files are CSV, everything else JSONL.
    pub fn detect(path: &Path) -> Self {
        if path.is_dir() {
            CorpusFormat::TxtDir
        } else if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            CorpusFormat::Csv
        } else {
            CorpusFormat::Jsonl
        }
    }
}

/// Loads a corpus. The label is the file (or directory) stem.
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Corpus, IngestError> {
    let documents = match format {
        CorpusFormat::Jsonl => read_jsonl(path)?,
        CorpusFormat::Csv => read_csv(path)?,
        CorpusFormat::TxtDir => read_txt_dir(path)?,
    };
    if documents.is_empty() {
        return Err(IngestError::EmptyCorpus);
    }
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Corpus::new(label, documents)
}

pub fn save_corpus(corpus: &Corpus, path: &Path) -> Result<(), IngestError> {
    let file = File::create(path).map_err(|e| IngestError::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_jsonl(corpus, &mut out).map_err(|e| IngestError::io(path, e))?;
    out.flush().map_err(|e| IngestError::io(path, e))
}

/// Writes one JSON object per document, in corpus order.
pub fn write_jsonl<W: Write>(corpus: &Corpus, out: &mut W) -> std::io::Result<()> {
    for doc in corpus.documents() {
        serde_json::to_writer(&mut *out, doc)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn read_jsonl(path: &Path) -> Result<Vec<Document>, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    let mut docs = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| IngestError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        let value: Value =
            serde_json::from_str(&line).map_err(|e| IngestError::Parse(format!("{}:{lineno}: {e}", path.display())))?;
        let Value::Object(obj) = value else {
            return Err(IngestError::Schema(format!(
                "{}:{lineno}: expected a JSON object",
                path.display()
            )));
        };
        let field = |name: &str| -> Result<Option<String>, IngestError> {
            match obj.get(name) {
                None | Some(Value::Null) => Ok(None),
                Some(Value::String(s)) => Ok(Some(s.clone())),
                Some(Value::Number(n)) => Ok(Some(n.to_string())),
                Some(other) => Err(IngestError::Schema(format!(
                    "{}:{lineno}: field {name:?} must be a string, got {other}",
                    path.display()
                ))),
            }
        };
        let headline = field("headline")?
            .ok_or_else(|| IngestError::Schema(format!("{}:{lineno}: missing \"headline\"", path.display())))?;
        let id = field("id")?.unwrap_or_else(|| lineno.to_string());
        let date = field("date")?.map(|d| parse_iso_date(&d, path, lineno)).transpose()?;
        docs.push(make_document(
            id,
            &headline,
            date,
            field("url")?,
            field("body")?,
            path,
            lineno,
        )?);
    }
    Ok(docs)
}

fn read_csv(path: &Path) -> Result<Vec<Document>, IngestError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let headline_col = column("headline")
        .ok_or_else(|| IngestError::Schema(format!("{}: missing required column \"headline\"", path.display())))?;
    let (id_col, date_col, url_col, body_col) = (column("id"), column("date"), column("url"), column("body"));

    let mut docs = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = row + 1;
        let get = |col: Option<usize>| {
            col.and_then(|c| record.get(c))
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
        };
        let headline = record.get(headline_col).unwrap_or_default();
        let id = get(id_col).unwrap_or_else(|| row.to_string());
        let date = get(date_col).map(|d| parse_iso_date(&d, path, row + 1)).transpose()?;
        docs.push(make_document(
            id,
            headline,
            date,
            get(url_col),
            get(body_col),
            path,
            row + 1,
        )?);
    }
    Ok(docs)
}

fn read_txt_dir(path: &Path) -> Result<Vec<Document>, IngestError> {
    let mut files = Vec::new();
    for entry in fs::read_dir(path).map_err(|e| IngestError::io(path, e))? {
        let entry = entry.map_err(|e| IngestError::io(path, e))?;
        let p = entry.path();
        if p.is_file() && p.extension().is_some_and(|e| e == "txt") {
            files.push(p);
        }
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));

    let mut docs = Vec::new();
    for file in files {
        let text = fs::read_to_string(&file).map_err(|e| IngestError::io(&file, e))?;
        let (first, rest) = text.split_once('\n').unwrap_or((&text, ""));
        let id = file
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let body = Some(rest.trim()).filter(|b| !b.is_empty()).map(str::to_string);
        docs.push(make_document(id, first, None, None, body, &file, 1)?);
    }
    Ok(docs)
}

fn make_document(
    id: String,
    headline: &str,
    date: Option<NaiveDate>,
    source_url: Option<String>,
    body: Option<String>,
    path: &Path,
    line: usize,
) -> Result<Document, IngestError> {
    let headline = normalize_whitespace(headline);
    if headline.is_empty() {
        return Err(IngestError::Schema(format!(
            "{}:{line}: empty headline",
            path.display()
        )));
    }
    Ok(Document {
        id,
        headline,
        date,
        source_url,
        body,
    })
}

fn parse_iso_date(raw: &str, path: &Path, line: usize) -> Result<NaiveDate, IngestError> {
    NaiveDate::parse_from_str(raw.trim(), "%Y-%m-%d")
        .map_err(|e| IngestError::Schema(format!("{}:{line}: date {raw:?} is not ISO-8601 ({e})", path.display())))
}

fn csv_error(path: &Path, err: csv::Error) -> IngestError {
    if err.is_io_error() {
        match err.into_kind() {
            csv::ErrorKind::Io(e) => IngestError::io(path, e),
            _ => unreachable!(),
        }
    } else {
        IngestError::Parse(format!("{}: {err}", path.display()))
    }
}

#[derive(Serialize, Deserialize)]
struct PageEntry {
    url: String,
    fetched_at: DateTime<Utc>,
    file: String,
}

const MANIFEST: &str = "manifest.jsonl";

/// Stores fetched pages as `page-NNNN.html` files plus a `manifest.jsonl`
/// recording url and fetch time of each.
pub fn save_pages(pages: &[RawPage], dir: &Path) -> Result<(), IngestError> {
    fs::create_dir_all(dir).map_err(|e| IngestError::io(dir, e))?;
    let manifest_path = dir.join(MANIFEST);
    let mut manifest = BufWriter::new(File::create(&manifest_path).map_err(|e| IngestError::io(&manifest_path, e))?);
    for (i, page) in pages.iter().enumerate() {
        let name = format!("page-{i:04}.html");
        let file = dir.join(&name);
        fs::write(&file, &page.content).map_err(|e| IngestError::io(&file, e))?;
        let entry = PageEntry {
            url: page.url.to_string(),
            fetched_at: page.fetched_at,
            file: name,
        };
        serde_json::to_writer(&mut manifest, &entry).map_err(|e| IngestError::io(&manifest_path, e.into()))?;
        manifest
            .write_all(b"\n")
            .map_err(|e| IngestError::io(&manifest_path, e))?;
    }
    manifest.flush().map_err(|e| IngestError::io(&manifest_path, e))
}

/// Reads pages written by [`save_pages`], in manifest order.
pub fn load_pages(dir: &Path) -> Result<Vec<RawPage>, IngestError> {
    let manifest_path = dir.join(MANIFEST);
    let file = File::open(&manifest_path).map_err(|e| IngestError::io(&manifest_path, e))?;
    let mut pages = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| IngestError::io(&manifest_path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: PageEntry =
            serde_json::from_str(&line).map_err(|e| IngestError::Parse(format!("{}: {e}", manifest_path.display())))?;
        let url = url::Url::parse(&entry.url).map_err(|_| IngestError::InvalidUrl(entry.url.clone()))?;
        let path = dir.join(&entry.file);
        let content = fs::read(&path).map_err(|e| IngestError::io(&path, e))?;
        pages.push(RawPage {
            url,
            fetched_at: entry.fetched_at,
            content,
        });
    }
    Ok(pages)
}
