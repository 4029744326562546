//! Corpus construction: query strings from the keyword matrix, page
//! loading, main-article extraction and the three-part corpus file format.
//!
//! The main article is approximated by every run of running text at least
//! `min_run_chars` long. Navigation bars, menus and footers are short runs
//! and fall below the threshold.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use encoding_rs::Encoding;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use url::Url;

pub const DEFAULT_MIN_RUN_CHARS: usize = 130;
pub const ANCHOR: &str = "لبنان";
pub const CORPUS_EXT: &str = ".corpus.txt";
pub const USER_AGENT: &str = concat!("slcsas-ingest/", env!("CARGO_PKG_VERSION"));

const URL_PREFIX: &str = "URL: ";
const TITLE_PREFIX: &str = "TITLE: ";

/// Punctuation allowed inside a text run, besides letters, digits and whitespace.
const RUN_PUNCT: &[char] = &[
    '.', ',', '،', '؛', '؟', '!', '"', '\'', '(', ')', '%', ':', '–', '-', '«', '»', '“', '”', '‘', '’', ';',
    '?',
];

/// Elements whose content never reaches the body.
const SKIPPED_ELEMENTS: &[&str] = &["script", "style", "title", "noscript", "template"];

/// Elements that end a text run.
const BLOCK_ELEMENTS: &[&str] = &[
    "address",
    "article",
    "aside",
    "blockquote",
    "body",
    "br",
    "dd",
    "div",
    "dl",
    "dt",
    "fieldset",
    "figcaption",
    "figure",
    "footer",
    "form",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "head",
    "header",
    "hr",
    "html",
    "li",
    "main",
    "nav",
    "ol",
    "p",
    "pre",
    "section",
    "table",
    "tbody",
    "td",
    "tfoot",
    "th",
    "thead",
    "tr",
    "ul",
    "option",
    "select",
    "button",
    "iframe",
];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("no seeds")]
    NoSeeds,
    #[error("duplicate query: {0}")]
    DuplicateQuery(String),
    #[error("seed file line {line}: {message}")]
    SeedFile { line: usize, message: String },
    #[error("no main content")]
    NoMainContent,
    #[error("malformed corpus file: {0}")]
    MalformedCorpusFile(String),
    #[error("invalid document: {0}")]
    InvalidDocument(String),
    #[error("{source_url}: content is not valid {encoding}")]
    Encoding {
        source_url: String,
        encoding: &'static str,
    },
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPage {
    pub source_url: String,
    pub html: String,
}

impl RawPage {
    /// Decodes `bytes` using, in order: a byte-order mark, the transport
    /// charset hint, a `charset=` declaration near the top of the page, UTF-8.
    /// Malformed input is an error, never replaced.
    pub fn from_bytes(
        source_url: &str,
        bytes: &[u8],
        charset_hint: Option<&str>,
    ) -> Result<Self, IngestError> {
        let (encoding, bom_len) = match Encoding::for_bom(bytes) {
            Some((e, n)) => (e, n),
            // a UTF-16 label without a BOM is read as UTF-8, as browsers do
            None => (
                charset_hint
                    .and_then(|l| Encoding::for_label(l.trim().as_bytes()))
                    .or_else(|| sniff_meta_charset(bytes))
                    .unwrap_or(encoding_rs::UTF_8)
                    .output_encoding(),
                0,
            ),
        };
        let html = encoding
            .decode_without_bom_handling_and_without_replacement(&bytes[bom_len..])
            .ok_or(IngestError::Encoding {
                source_url: source_url.to_string(),
                encoding: encoding.name(),
            })?
            .into_owned();
        Ok(Self {
            source_url: source_url.to_string(),
            html,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, IngestError> {
        let bytes = fs::read(path).map_err(io_err(path))?;
        Self::from_bytes(&path.display().to_string(), &bytes, None)
    }
}

fn sniff_meta_charset(bytes: &[u8]) -> Option<&'static Encoding> {
    let head = &bytes[..bytes.len().min(2048)];
    let lower: Vec<u8> = head.iter().map(u8::to_ascii_lowercase).collect();
    let pos = lower.windows(8).position(|w| w == b"charset=")?;
    let rest = &head[pos + 8..];
    let rest = rest
        .strip_prefix(b"\"")
        .or_else(|| rest.strip_prefix(b"'"))
        .unwrap_or(rest);
    let end = rest
        .iter()
        .position(|b| !(b.is_ascii_alphanumeric() || b"-_:.".contains(b)))
        .unwrap_or(rest.len());
    Encoding::for_label(&rest[..end])
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub url: String,
    pub title: String,
    pub body: String,
}

/// First 16 hex digits of the SHA-256 of the URL.
pub fn document_id(url: &str) -> String {
    let digest = Sha256::digest(url.as_bytes());
    hex::encode(&digest[..8])
}

fn contains_tag(s: &str) -> bool {
    s.as_bytes()
        .windows(2)
        .any(|w| w[0] == b'<' && (w[1].is_ascii_alphabetic() || w[1] == b'/'))
}

impl Document {
    pub fn new(url: &str, title: &str, body: &str) -> Result<Self, IngestError> {
        let invalid = |m: &str| Err(IngestError::InvalidDocument(m.to_string()));
        if url.trim().is_empty() {
            return invalid("empty url");
        }
        if url.contains('\n') || title.contains('\n') {
            return invalid("url and title must be single lines");
        }
        if body.trim().is_empty() {
            return invalid("empty body");
        }
        if contains_tag(body) {
            return invalid("body contains markup");
        }
        Ok(Self {
            id: document_id(url),
            url: url.to_string(),
            title: title.to_string(),
            body: body.to_string(),
        })
    }

    pub fn file_name(&self) -> String {
        format!("{}{CORPUS_EXT}", self.id)
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&compile_corpus_file(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySeed {
    pub keyword_ar: String,
    pub keyword_en: String,
    pub anchor: String,
}

impl QuerySeed {
    pub fn new(keyword_ar: &str, keyword_en: &str) -> Self {
        Self {
            keyword_ar: keyword_ar.to_string(),
            keyword_en: keyword_en.to_string(),
            anchor: ANCHOR.to_string(),
        }
    }

    pub fn query(&self) -> String {
        let kw = self.keyword_ar.trim();
        if kw.split_whitespace().nth(1).is_some() {
            format!("\"{kw}\" {}", self.anchor)
        } else {
            format!("{kw} {}", self.anchor)
        }
    }
}

/// Reads `keyword_ar<TAB>keyword_en` lines; `#` starts a comment line.
pub fn load_query_seeds(tsv: &str) -> Result<Vec<QuerySeed>, IngestError> {
    let mut seeds = Vec::new();
    for (i, line) in tsv.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: &str| IngestError::SeedFile {
            line: i + 1,
            message: message.to_string(),
        };
        let (ar, en) = line
            .split_once('\t')
            .ok_or_else(|| err("expected two tab-separated columns"))?;
        if ar.trim().is_empty() || !ar.chars().any(is_arabic_letter) {
            return Err(err("keyword_ar must be Arabic text"));
        }
        seeds.push(QuerySeed::new(ar.trim(), en.trim()));
    }
    Ok(seeds)
}

fn is_arabic_letter(c: char) -> bool {
    ('\u{0621}'..='\u{064A}').contains(&c)
}

/// One query per seed, in order.
pub fn build_query_list(seeds: &[QuerySeed]) -> Result<Vec<String>, IngestError> {
    if seeds.is_empty() {
        return Err(IngestError::NoSeeds);
    }
    let mut seen = HashSet::new();
    seeds
        .iter()
        .map(|s| {
            let q = s.query();
            if seen.insert(q.clone()) {
                Ok(q)
            } else {
                Err(IngestError::DuplicateQuery(q))
            }
        })
        .collect()
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn find_ci(hay: &str, needle: &str) -> Option<usize> {
    let n = needle.len();
    hay.as_bytes()
        .windows(n)
        .position(|w| w.eq_ignore_ascii_case(needle.as_bytes()))
}

fn tag_name(tag: &str) -> String {
    tag.trim_start_matches(['<', '/'])
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase()
}

/// Visible text with block boundaries turned into blank lines.
fn visible_text(html: &str) -> String {
    let mut out = String::with_capacity(html.len());
    let mut rest = html;
    while let Some(lt) = rest.find('<') {
        let after = &rest[lt + 1..];
        let is_markup = after
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || matches!(c, '/' | '!' | '?'));
        if !is_markup {
            out.push_str(&html_escape::decode_html_entities(&rest[..=lt]));
            rest = after;
            continue;
        }
        out.push_str(&html_escape::decode_html_entities(&rest[..lt]));
        rest = &rest[lt..];
        if rest.starts_with("<!--") {
            rest = rest.find("-->").map_or("", |e| &rest[e + 3..]);
            continue;
        }
        let Some(gt) = rest.find('>') else {
            rest = "";
            break;
        };
        let tag = &rest[..=gt];
        rest = &rest[gt + 1..];
        let name = tag_name(tag);
        if !tag.starts_with("</") && SKIPPED_ELEMENTS.contains(&name.as_str()) {
            rest = find_ci(rest, &format!("</{name}")).map_or("", |e| {
                let close = &rest[e..];
                close.find('>').map_or("", |g| &close[g + 1..])
            });
            out.push_str("\n\n");
        } else if BLOCK_ELEMENTS.contains(&name.as_str()) {
            out.push_str("\n\n");
        }
    }
    out.push_str(&html_escape::decode_html_entities(rest));
    out
}

fn is_run_char(c: char) -> bool {
    c.is_alphanumeric() || c.is_whitespace() || RUN_PUNCT.contains(&c) || crate::segmenter::is_diacritic(c)
}

/// Maximal runs of running text, whitespace-collapsed.
fn text_runs(text: &str) -> Vec<String> {
    let mut runs = Vec::new();
    let mut cur = String::new();
    let mut newlines = 0;
    let mut flush = |cur: &mut String| {
        let r = collapse_ws(cur);
        if !r.is_empty() {
            runs.push(r);
        }
        cur.clear();
    };
    for c in text.chars() {
        if c == '\n' {
            newlines += 1;
            if newlines >= 2 {
                flush(&mut cur);
                continue;
            }
        } else if !c.is_whitespace() {
            newlines = 0;
        }
        if is_run_char(c) {
            cur.push(c);
        } else {
            flush(&mut cur);
        }
    }
    flush(&mut cur);
    runs
}

fn extract_title(html: &str) -> String {
    let Some(open) = find_ci(html, "<title") else {
        return String::new();
    };
    let after = &html[open..];
    let Some(gt) = after.find('>') else {
        return String::new();
    };
    let inner = &after[gt + 1..];
    let end = find_ci(inner, "</title").unwrap_or(inner.len());
    collapse_ws(&html_escape::decode_html_entities(&inner[..end]))
}

/// Title and main-article body of a page.
pub fn extract_main_article(page: &RawPage, min_run_chars: usize) -> Result<(String, String), IngestError> {
    let title = extract_title(&page.html);
    let body = text_runs(&visible_text(&page.html))
        .into_iter()
        .filter(|r| r.chars().count() >= min_run_chars)
        .collect::<Vec<_>>()
        .join("\n");
    if body.is_empty() {
        return Err(IngestError::NoMainContent);
    }
    Ok((title, body))
}

/// Builds the corpus document for a page.
pub fn page_to_document(page: &RawPage, min_run_chars: usize) -> Result<Document, IngestError> {
    let (title, body) = extract_main_article(page, min_run_chars)?;
    Document::new(&page.source_url, &title, &body)
}

fn needs_escape(line: &str) -> bool {
    line.trim_start_matches(' ').starts_with(URL_PREFIX)
}

/// Serializes to `URL: ..`, `TITLE: ..`, a blank line and the body.
///
/// Body lines that start with spaces followed by `URL: ` get one extra space.
pub fn compile_corpus_file(doc: &Document) -> String {
    let mut out = format!("{URL_PREFIX}{}\n{TITLE_PREFIX}{}\n\n", doc.url, doc.title);
    for (i, line) in doc.body.split('\n').enumerate() {
        if i > 0 {
            out.push('\n');
        }
        if needs_escape(line) {
            out.push(' ');
        }
        out.push_str(line);
    }
    out.push('\n');
    out
}

pub fn parse_corpus_file(text: &str) -> Result<Document, IngestError> {
    let malformed = |m: &str| IngestError::MalformedCorpusFile(m.to_string());
    let mut parts = text.splitn(4, '\n');
    let url = parts
        .next()
        .and_then(|l| l.strip_prefix(URL_PREFIX))
        .ok_or_else(|| malformed("missing URL line"))?;
    let title = parts
        .next()
        .and_then(|l| l.strip_prefix(TITLE_PREFIX))
        .ok_or_else(|| malformed("missing TITLE line"))?;
    if parts.next() != Some("") {
        return Err(malformed("missing blank line after TITLE"));
    }
    let raw = parts.next().ok_or_else(|| malformed("missing body"))?;
    let raw = raw.strip_suffix('\n').unwrap_or(raw);
    let body = raw
        .split('\n')
        .map(|l| match l.strip_prefix(' ') {
            Some(rest) if needs_escape(l) => rest,
            _ => l,
        })
        .collect::<Vec<_>>()
        .join("\n");
    Document::new(url, title, &body).map_err(|e| IngestError::MalformedCorpusFile(e.to_string()))
}

/// Drops documents whose whitespace-normalized body was already seen.
pub fn dedup_documents(docs: Vec<Document>) -> Vec<Document> {
    let mut seen = HashSet::new();
    docs.into_iter()
        .filter(|d| seen.insert(collapse_ws(&d.body)))
        .collect()
}

/// Writes one `<id>.corpus.txt` per document; returns the written paths.
pub fn write_corpus_dir(dir: &Path, docs: &[Document]) -> Result<Vec<PathBuf>, IngestError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    docs.iter()
        .map(|d| {
            let path = dir.join(d.file_name());
            fs::write(&path, compile_corpus_file(d)).map_err(io_err(&path))?;
            Ok(path)
        })
        .collect()
}

/// Reads every `.corpus.txt` file of `dir`, ordered by document id.
pub fn read_corpus_dir(dir: &Path) -> Result<Vec<Document>, IngestError> {
    let mut docs = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if !path.to_string_lossy().ends_with(CORPUS_EXT) {
            continue;
        }
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let doc = parse_corpus_file(&text)
            .map_err(|e| IngestError::MalformedCorpusFile(format!("{}: {e}", path.display())))?;
        docs.push(doc);
    }
    docs.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(docs)
}

#[derive(Debug, Clone)]
pub struct FetchOptions {
    /// Minimum spacing between two requests to the same host.
    pub politeness_delay: Duration,
    pub timeout: Duration,
    /// Hosts fetched at the same time.
    pub parallelism: usize,
    pub user_agent: String,
}

impl Default for FetchOptions {
    fn default() -> Self {
        Self {
            politeness_delay: Duration::from_millis(1000),
            timeout: Duration::from_secs(30),
            parallelism: 4,
            user_agent: USER_AGENT.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchFailure {
    pub url: String,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct FetchOutcome {
    pub pages: Vec<RawPage>,
    pub failures: Vec<FetchFailure>,
}

enum Target {
    File(PathBuf),
    Http(Url),
}

fn classify_target(s: &str) -> Result<Target, String> {
    match Url::parse(s) {
        Ok(u) if u.scheme() == "file" => u
            .to_file_path()
            .map(Target::File)
            .map_err(|_| "not a local file url".to_string()),
        Ok(u) if matches!(u.scheme(), "http" | "https") => Ok(Target::Http(u)),
        // single letters are Windows drive prefixes, i.e. paths
        Ok(u) if u.scheme().len() > 1 => Err(format!("unsupported scheme {}", u.scheme())),
        _ => Ok(Target::File(PathBuf::from(s))),
    }
}

fn fetch_http(client: &reqwest::blocking::Client, url: &Url) -> Result<RawPage, String> {
    let resp = client
        .get(url.clone())
        .send()
        .and_then(|r| r.error_for_status())
        .map_err(|e| e.to_string())?;
    let charset = resp
        .headers()
        .get(reqwest::header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .and_then(|ct| {
            ct.split(';').find_map(|p| {
                p.trim()
                    .strip_prefix("charset=")
                    .map(|c| c.trim_matches('"').to_string())
            })
        });
    let bytes = resp.bytes().map_err(|e| e.to_string())?;
    RawPage::from_bytes(url.as_str(), &bytes, charset.as_deref()).map_err(|e| e.to_string())
}

/// Loads every URL or path. Local files never touch the network; remote
/// hosts are fetched in parallel, each host sequentially with the delay.
/// Results keep the input order.
pub fn fetch_pages(urls: &[String], opts: &FetchOptions) -> FetchOutcome {
    let results: Vec<Mutex<Option<Result<RawPage, String>>>> =
        urls.iter().map(|_| Mutex::new(None)).collect();
    let set = |i: usize, r: Result<RawPage, String>| {
        *results[i].lock().expect("result slot") = Some(r);
    };

    let mut by_host: BTreeMap<String, Vec<(usize, Url)>> = BTreeMap::new();
    for (i, u) in urls.iter().enumerate() {
        match classify_target(u) {
            Ok(Target::File(p)) => set(
                i,
                fs::read(&p)
                    .map_err(|e| e.to_string())
                    .and_then(|b| RawPage::from_bytes(u, &b, None).map_err(|e| e.to_string())),
            ),
            Ok(Target::Http(url)) => {
                let host = url.host_str().unwrap_or_default().to_string();
                by_host.entry(host).or_default().push((i, url));
            }
            Err(m) => set(i, Err(m)),
        }
    }

    if !by_host.is_empty() {
        let client = reqwest::blocking::Client::builder()
            .user_agent(opts.user_agent.clone())
            .timeout(opts.timeout)
            .build();
        match client {
            Err(e) => {
                for (i, _) in by_host.values().flatten() {
                    set(*i, Err(e.to_string()));
                }
            }
            Ok(client) => {
                let hosts: Vec<_> = by_host.into_values().collect();
                let work = || {
                    hosts.par_iter().for_each(|queue| {
                        let mut last: Option<Instant> = None;
                        for (i, url) in queue {
                            if let Some(t) = last {
                                let since = t.elapsed();
                                if since < opts.politeness_delay {
                                    thread::sleep(opts.politeness_delay - since);
                                }
                            }
                            last = Some(Instant::now());
                            set(*i, fetch_http(&client, url));
                        }
                    })
                };
                match rayon::ThreadPoolBuilder::new()
                    .num_threads(opts.parallelism.max(1))
                    .build()
                {
                    Ok(pool) => pool.install(work),
                    Err(_) => work(),
                }
            }
        }
    }

    let mut out = FetchOutcome::default();
    for (u, slot) in urls.iter().zip(results) {
        match slot
            .into_inner()
            .expect("result slot")
            .expect("every url handled")
        {
            Ok(p) => out.pages.push(p),
            Err(message) => out.failures.push(FetchFailure {
                url: u.clone(),
                message,
            }),
        }
    }
    out
}
