use std::collections::{HashMap, HashSet, VecDeque};
use std::time::{Duration, Instant};

use chrono::Utc;
use scraper::Html;
use url::Url;

use super::extract::compile_selector;
use super::{IngestError, RawPage};

/// Options for a breadth-first pagination crawl.
#[derive(Debug, Clone)]
pub struct CrawlConfig {
    pub max_pages: usize,
    /// Minimum gap between two requests to the same host.
    pub delay: Duration,
    /// Links matching this selector are followed.
    pub pagination_selector: String,
    pub timeout: Duration,
    pub user_agent: String,
}

impl Default for CrawlConfig {
    fn default() -> Self {
        CrawlConfig {
            max_pages: 10,
            delay: Duration::from_millis(1000),
            pagination_selector: "a[rel~=next], .pagination a, .pager a, a.next".into(),
            timeout: Duration::from_secs(30),
            user_agent: concat!("newsmine/", env!("CARGO_PKG_VERSION")).into(),
        }
    }
}

/// Crawls from `start_url` with the default pagination selector.
pub fn fetch_pages(start_url: &str, max_pages: usize, delay_ms: u64) -> Result<Vec<RawPage>, IngestError> {
    let config = CrawlConfig {
        max_pages,
        delay: Duration::from_millis(delay_ms),
        ..Default::default()
    };
    crawl(start_url, &config)
}

/// Breadth-first crawl following pagination links.
///
/// Returns at most `config.max_pages` pages. Links to other hosts are skipped.
/// A failure on the start page is an error; failures on later pages are
/// logged and skipped. `file://` URLs are read straight from disk.
pub fn crawl(start_url: &str, config: &CrawlConfig) -> Result<Vec<RawPage>, IngestError> {
    if config.max_pages == 0 {
        return Err(IngestError::InvalidLimit);
    }
    let start = Url::parse(start_url).map_err(|_| IngestError::InvalidUrl(start_url.to_string()))?;
    if !matches!(start.scheme(), "http" | "https" | "file") {
        return Err(IngestError::InvalidUrl(start_url.to_string()));
    }
    let pagination = compile_selector(&config.pagination_selector)?;
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(config.timeout))
        .http_status_as_error(false)
        .user_agent(config.user_agent.as_str())
        .build()
        .into();

    let mut fetcher = Fetcher {
        agent,
        delay: config.delay,
        last_request: HashMap::new(),
    };
    let mut queue = VecDeque::from([start.clone()]);
    let mut seen: HashSet<Url> = HashSet::from([start.clone()]);
    let mut pages = Vec::new();

    while let Some(url) = queue.pop_front() {
        if pages.len() >= config.max_pages {
            break;
        }
        let content = match fetcher.get(&url) {
            Ok(content) => content,
            Err(reason) if url == start => {
                return Err(IngestError::Fetch {
                    url: url.to_string(),
                    reason,
                })
            }
            Err(reason) => {
                log::warn!("skipping {url}: {reason}");
                continue;
            }
        };

        let html = Html::parse_document(&String::from_utf8_lossy(&content));
        for link in html.select(&pagination) {
            let Some(href) = link.value().attr("href") else {
                continue;
            };
            let Ok(mut next) = url.join(href) else {
                continue;
            };
            next.set_fragment(None);
            if !same_host(&start, &next) {
                log::debug!("not following cross-host link {next}");
                continue;
            }
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }

        pages.push(RawPage {
            url,
            fetched_at: Utc::now(),
            content,
        });
    }
    Ok(pages)
}

fn same_host(a: &Url, b: &Url) -> bool {
    a.scheme() == b.scheme() && a.host_str() == b.host_str() && a.port_or_known_default() == b.port_or_known_default()
}

struct Fetcher {
    agent: ureq::Agent,
    delay: Duration,
    last_request: HashMap<Option<String>, Instant>,
}

impl Fetcher {
    fn get(&mut self, url: &Url) -> Result<Vec<u8>, String> {
        if url.scheme() == "file" {
            let path = url.to_file_path().map_err(|_| "not a local path".to_string())?;
            return std::fs::read(&path).map_err(|e| e.to_string());
        }

        let host = url.host_str().map(str::to_string);
        if let Some(last) = self.last_request.get(&host) {
            let elapsed = last.elapsed();
            if elapsed < self.delay {
                std::thread::sleep(self.delay - elapsed);
            }
        }
        let result = self.agent.get(url.as_str()).call();
        self.last_request.insert(host, Instant::now());

        let mut response = result.map_err(|e| e.to_string())?;
        let status = response.status().as_u16();
        if status >= 400 {
            return Err(format!("HTTP {status}"));
        }
        response.body_mut().read_to_vec().map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_pages_is_invalid_limit() {
        assert!(matches!(
            fetch_pages("http://example.org/", 0, 0),
            Err(IngestError::InvalidLimit)
        ));
    }

    #[test]
    fn malformed_url_is_rejected() {
        assert!(matches!(
            fetch_pages("not a url", 1, 0),
            Err(IngestError::InvalidUrl(_))
        ));
        assert!(matches!(
            fetch_pages("ftp://example.org/", 1, 0),
            Err(IngestError::InvalidUrl(_))
        ));
    }

    #[test]
    fn unreachable_start_is_fetch_error() {
        // Port 1 on loopback refuses connections immediately.
        assert!(matches!(
            fetch_pages("http://127.0.0.1:1/", 1, 0),
            Err(IngestError::Fetch { .. })
        ));
    }

    #[test]
    fn host_comparison_includes_port() {
        let a = Url::parse("http://h:80/x").unwrap();
        assert!(same_host(&a, &Url::parse("http://h/y").unwrap()));
        assert!(!same_host(&a, &Url::parse("http://h:81/y").unwrap()));
        assert!(!same_host(&a, &Url::parse("http://g/y").unwrap()));
    }
}
