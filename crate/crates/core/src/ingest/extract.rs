use chrono::NaiveDate;
use scraper::{ElementRef, Html, Selector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{normalize_whitespace, Document, IngestError, RawPage};

const DEFAULT_DATE_FORMATS: &[&str] = &["%Y-%m-%d", "%B %d, %Y", "%b %d, %Y", "%m/%d/%Y", "%m.%d.%Y"];

/// CSS selector rules locating headlines (and optionally their dates) on a
/// listing page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractionConfig {
    pub headline_selector: String,
    /// Searched inside each headline's ancestors, nearest first.
    pub date_selector: Option<String>,
    /// `chrono` formats tried in order against the date text or its
    /// `datetime` attribute.
    pub date_formats: Vec<String>,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            headline_selector: "h2 a, h3 a".into(),
            date_selector: None,
            date_formats: DEFAULT_DATE_FORMATS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl ExtractionConfig {
    pub fn new(headline_selector: impl Into<String>) -> Self {
        ExtractionConfig {
            headline_selector: headline_selector.into(),
            ..Default::default()
        }
    }

    pub fn with_date_selector(mut self, selector: impl Into<String>) -> Self {
        self.date_selector = Some(selector.into());
        self
    }
}

pub(crate) fn compile_selector(selector: &str) -> Result<Selector, IngestError> {
    Selector::parse(selector).map_err(|e| IngestError::InvalidSelector {
        selector: selector.to_string(),
        reason: e.to_string(),
    })
}

/// Pulls one [`Document`] per headline node, in document order.
///
/// Ids are `<first 16 hex digits of sha256(url)>-<ordinal>`, so re-extracting
/// the same page always produces the same ids. A page with no matching nodes
/// yields an empty vector.
pub fn extract_documents(page: &RawPage, config: &ExtractionConfig) -> Result<Vec<Document>, IngestError> {
    let headline_sel = compile_selector(&config.headline_selector)?;
    let date_sel = config.date_selector.as_deref().map(compile_selector).transpose()?;

    let text = std::str::from_utf8(&page.content)
        .map_err(|e| IngestError::Parse(format!("{}: content is not UTF-8 ({e})", page.url)))?;
    let html = Html::parse_document(text);
    let prefix = url_hash(page.url.as_str());

    let mut docs = Vec::new();
    for node in html.select(&headline_sel) {
        let headline = normalize_whitespace(&node.text().collect::<String>());
        if headline.is_empty() {
            continue;
        }
        let date = date_sel
            .as_ref()
            .and_then(|sel| find_date(node, sel, &headline_sel, &config.date_formats));
        let source_url = link_target(node)
            .and_then(|href| page.url.join(href).ok())
            .map(|u| u.to_string())
            .or_else(|| Some(page.url.to_string()));
        docs.push(Document {
            id: format!("{prefix}-{}", docs.len()),
            headline,
            date,
            source_url,
            body: None,
        });
    }
    Ok(docs)
}

fn url_hash(url: &str) -> String {
    let digest = Sha256::digest(url.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn link_target(node: ElementRef<'_>) -> Option<&str> {
    if let Some(href) = node.value().attr("href") {
        return Some(href);
    }
    let anchor = Selector::parse("a[href]").expect("static selector");
    node.select(&anchor).next().and_then(|a| a.value().attr("href"))
}

/// Nearest date match in an enclosing element. The search stops at the first
/// ancestor holding several headlines, so undated stories do not borrow a
/// neighbour's date.
fn find_date(node: ElementRef<'_>, selector: &Selector, headlines: &Selector, formats: &[String]) -> Option<NaiveDate> {
    for ancestor in node.ancestors().filter_map(ElementRef::wrap) {
        if ancestor.select(headlines).nth(1).is_some() {
            return None;
        }
        if let Some(found) = ancestor.select(selector).next() {
            let raw = found
                .value()
                .attr("datetime")
                .map(str::to_string)
                .unwrap_or_else(|| normalize_whitespace(&found.text().collect::<String>()));
            return parse_date(&raw, formats);
        }
    }
    None
}

pub(crate) fn parse_date(raw: &str, formats: &[String]) -> Option<NaiveDate> {
    let raw = raw.trim();
    // ISO timestamps: keep the date part.
    let candidates = [raw, raw.get(..10).unwrap_or(raw)];
    candidates
        .iter()
        .find_map(|text| formats.iter().find_map(|fmt| NaiveDate::parse_from_str(text, fmt).ok()))
}
