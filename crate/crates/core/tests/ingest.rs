use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use newsmine_core::ingest::{
    self, crawl, extract_documents, load_corpus, load_pages, save_corpus, save_pages, CorpusFormat, CrawlConfig,
    ExtractionConfig, IngestError,
};
use newsmine_core::{Corpus, Document};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn site_url() -> String {
    url::Url::from_file_path(data("site/index.html")).unwrap().to_string()
}

#[test]
fn file_site_crawl_follows_pagination_once() {
    let pages = crawl(
        &site_url(),
        &CrawlConfig {
            max_pages: 5,
            ..Default::default()
        },
    )
    .unwrap();
    let names: Vec<_> = pages
        .iter()
        .map(|p| p.url.path_segments().unwrap().next_back().unwrap().to_string())
        .collect();
    // page2 links back to index; the cross-host link is ignored
    assert_eq!(names, ["index.html", "page2.html"]);

    let one = crawl(
        &site_url(),
        &CrawlConfig {
            max_pages: 1,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(one.len(), 1);
}

#[test]
fn extraction_from_crawled_site() {
    let pages = crawl(&site_url(), &CrawlConfig::default()).unwrap();
    let cfg = ExtractionConfig::default().with_date_selector("time");
    let docs: Vec<Document> = pages.iter().flat_map(|p| extract_documents(p, &cfg).unwrap()).collect();
    let heads: Vec<_> = docs.iter().map(|d| d.headline.as_str()).collect();
    assert_eq!(
        heads,
        [
            "Bank robbery suspect arrested",
            "Man sentenced for child abuse",
            "Assault reported downtown",
            "Bank fraud scheme charged",
        ]
    );
    assert_eq!(docs[0].date.unwrap().to_string(), "2014-03-02");
    assert_eq!(docs[2].date, None);
    assert_eq!(docs[3].date.unwrap().to_string(), "2014-03-04");
    assert_eq!(docs[2].source_url.as_deref(), Some("https://elsewhere.example/x.html"));
    // ids are stable per page and unique across pages
    let again: Vec<Document> = pages.iter().flat_map(|p| extract_documents(p, &cfg).unwrap()).collect();
    assert_eq!(docs, again);
    Corpus::new("site", docs).unwrap();
}

#[test]
fn pages_round_trip_through_disk() {
    let pages = crawl(&site_url(), &CrawlConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    save_pages(&pages, dir.path()).unwrap();
    let back = load_pages(dir.path()).unwrap();
    assert_eq!(back.len(), pages.len());
    for (a, b) in pages.iter().zip(&back) {
        assert_eq!(a.url, b.url);
        assert_eq!(a.content, b.content);
    }
}

#[test]
fn corpus_round_trip() {
    let corpus = load_corpus(&data("headlines.jsonl"), CorpusFormat::Jsonl).unwrap();
    assert_eq!(corpus.len(), 40);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("copy.jsonl");
    save_corpus(&corpus, &out).unwrap();
    let back = load_corpus(&out, CorpusFormat::detect(&out)).unwrap();
    assert_eq!(back.documents(), corpus.documents());
}

#[test]
fn empty_file_is_empty_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("none.jsonl");
    std::fs::write(&p, "\n").unwrap();
    let err = load_corpus(&p, CorpusFormat::Jsonl).unwrap_err();
    assert!(matches!(err, IngestError::EmptyCorpus));
    assert!(err.is_data_error());
}

/// Minimal HTTP/1.1 server with fixed routes; records request arrival times.
struct Server {
    base: String,
    hits: Arc<Mutex<Vec<(String, Instant)>>>,
}

fn serve(routes: Vec<(&'static str, u16, String)>) -> Server {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    let hits = Arc::new(Mutex::new(Vec::new()));
    let log = Arc::clone(&hits);
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { break };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            if reader.read_line(&mut request_line).is_err() {
                continue;
            }
            let mut line = String::new();
            while reader.read_line(&mut line).map(|n| n > 2).unwrap_or(false) {
                line.clear();
            }
            let path = request_line.split_whitespace().nth(1).unwrap_or("/").to_string();
            log.lock().unwrap().push((path.clone(), Instant::now()));
            let (status, body) = routes
                .iter()
                .find(|(p, _, _)| *p == path)
                .map(|(_, s, b)| (*s, b.clone()))
                .unwrap_or((404, "not found".into()));
            let _ = write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Type: text/html\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
        }
    });
    Server { base, hits }
}

#[test]
fn http_crawl_with_delay_and_broken_link() {
    let server = serve(vec![
        (
            "/",
            200,
            r#"<h2><a href="/a">Police arrest robbery suspect</a></h2>
               <div class="pager"><a href="/p2">2</a><a href="/missing">3</a></div>"#
                .into(),
        ),
        ("/p2", 200, r#"<h2><a href="/b">Fraud charges filed</a></h2>"#.into()),
    ]);
    let cfg = CrawlConfig {
        max_pages: 10,
        delay: Duration::from_millis(150),
        ..Default::default()
    };
    let pages = crawl(&format!("{}/", server.base), &cfg).unwrap();
    assert_eq!(pages.len(), 2, "the 404 page is skipped");

    let hits = server.hits.lock().unwrap().clone();
    let paths: Vec<_> = hits.iter().map(|(p, _)| p.as_str()).collect();
    assert_eq!(paths, ["/", "/p2", "/missing"]);
    for pair in hits.windows(2) {
        assert!(pair[1].1 - pair[0].1 >= Duration::from_millis(140));
    }

    let docs = extract_documents(&pages[1], &ExtractionConfig::default()).unwrap();
    assert_eq!(docs[0].headline, "Fraud charges filed");
    assert_eq!(
        docs[0].source_url.as_deref(),
        Some(format!("{}/b", server.base).as_str())
    );
}

#[test]
fn http_start_page_failure_is_fetch_error() {
    let server = serve(vec![]);
    let err = ingest::fetch_pages(&format!("{}/", server.base), 3, 0).unwrap_err();
    assert!(matches!(err, IngestError::Fetch { .. }), "{err}");
}
