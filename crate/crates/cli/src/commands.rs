use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use slcsas::corpus_ingest::{
    dedup_documents, fetch_pages, page_to_document, read_corpus_dir, write_corpus_dir, FetchOptions,
};
use slcsas::eval::{self, FutureClass};
use slcsas::report::{render_index, ReportOptions, ReportPage, INDEX_FILE};
use slcsas::{Annotation, Document, DocumentAnalysis, EngineConfig};

use crate::config::Config;
use crate::{AnalyzeArgs, EvalArgs, Global, IngestArgs, RuleArgs};

pub const SUCCESS: u8 = 0;
pub const EMPTY_RESULT: u8 = 1;
pub const USAGE_ERROR: u8 = 2;

pub const ANNOTATIONS_FILE: &str = "annotations.jsonl";
pub const REPORTS_DIR: &str = "reports";

fn load_config(global: &Global) -> Result<Config> {
    let mut c = Config::from_env();
    if let Some(p) = &global.config {
        c.apply_file(p)?;
    }
    if let Some(j) = global.jobs {
        c.parallelism = j;
    }
    Ok(c)
}

fn apply_rule_args(c: &mut Config, a: &RuleArgs) -> Result<()> {
    let set = |slot: &mut Option<PathBuf>, v: &Option<PathBuf>| {
        if v.is_some() {
            slot.clone_from(v);
        }
    };
    set(&mut c.rules_path, &a.rules);
    set(&mut c.variables_path, &a.variables);
    set(&mut c.semantic_map_path, &a.semantic_map);
    set(&mut c.lexicon_dir, &a.lexicon_dir);
    if let Some(b) = &a.boundaries {
        c.boundaries = b.parse().with_context(|| format!("--boundaries {b}"))?;
    }
    c.strict_adjacency |= a.strict_adjacency;
    Ok(())
}

/// HTML files of a directory, or the entries of a URL list.
fn ingest_sources(input: &Path) -> Result<Vec<String>> {
    if input.is_dir() {
        let mut files: Vec<String> = fs::read_dir(input)
            .with_context(|| format!("cannot read {}", input.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.is_file()
                    && p.extension()
                        .and_then(|e| e.to_str())
                        .is_some_and(|e| e.eq_ignore_ascii_case("html") || e.eq_ignore_ascii_case("htm"))
            })
            .map(|p| p.display().to_string())
            .collect();
        files.sort();
        return Ok(files);
    }
    let text = fs::read_to_string(input).with_context(|| format!("cannot read {}", input.display()))?;
    let base = input.parent().unwrap_or(Path::new("."));
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            // relative paths in a list are relative to the list
            let p = Path::new(l);
            if l.contains("://") || p.is_absolute() {
                l.to_string()
            } else {
                base.join(p).display().to_string()
            }
        })
        .collect())
}

pub fn ingest(global: &Global, a: &IngestArgs) -> Result<u8> {
    let mut c = load_config(global)?;
    if let Some(n) = a.min_run_chars {
        c.min_run_chars = n;
    }
    if let Some(d) = a.delay {
        c.delay_ms = d;
    }
    c.validate()?;
    let Some(out) = &global.out else {
        bail!("ingest needs --out <corpus-dir>");
    };
    let sources = ingest_sources(&a.input)?;
    let opts = FetchOptions {
        politeness_delay: Duration::from_millis(c.delay_ms),
        parallelism: c.parallelism,
        ..FetchOptions::default()
    };
    let fetched = fetch_pages(&sources, &opts);
    for f in &fetched.failures {
        eprintln!("fetch failed: {}: {}", f.url, f.message);
    }

    let mut docs = Vec::new();
    let mut rejected = 0;
    for page in &fetched.pages {
        match page_to_document(page, c.min_run_chars) {
            Ok(d) => docs.push(d),
            Err(e) => {
                rejected += 1;
                eprintln!("rejected: {}: {e}", page.source_url);
            }
        }
    }
    let before = docs.len();
    let docs = dedup_documents(docs);
    let duplicates = before - docs.len();
    if !docs.is_empty() {
        write_corpus_dir(out, &docs)?;
    }
    println!(
        "pages={} documents={} rejected={rejected} duplicates={duplicates} failures={}",
        fetched.pages.len(),
        docs.len(),
        fetched.failures.len()
    );
    Ok(if docs.is_empty() { EMPTY_RESULT } else { SUCCESS })
}

fn run_engine(c: &Config, docs: &[Document]) -> Result<Vec<DocumentAnalysis>> {
    c.validate()?;
    let engine = c.rule_set()?.engine(
        c.lexicons()?,
        EngineConfig {
            boundaries: c.boundaries,
            strict_adjacency: c.strict_adjacency,
        },
    )?;
    Ok(engine.analyze_corpus(docs, c.parallelism))
}

fn write_jsonl(path: &Path, analyses: &[DocumentAnalysis]) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for a in analyses.iter().flat_map(|d| &d.annotations) {
        serde_json::to_writer(&mut w, a)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn analyze(global: &Global, a: &AnalyzeArgs) -> Result<u8> {
    let mut c = load_config(global)?;
    apply_rule_args(&mut c, &a.rules)?;
    c.show_all_negative_fields |= a.show_all_negative_fields;
    let docs = read_corpus_dir(&a.corpus)?;
    let analyses = run_engine(&c, &docs)?;

    let out = global.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let reports = out.join(REPORTS_DIR);
    fs::create_dir_all(&reports).with_context(|| format!("cannot create {}", reports.display()))?;
    write_jsonl(&out.join(ANNOTATIONS_FILE), &analyses)?;

    let opts = ReportOptions {
        generated_at: a
            .clock
            .clone()
            .unwrap_or_else(|| chrono::Utc::now().format("%Y-%m-%dT%H:%M:%SZ").to_string()),
        show_all_negative_fields: c.show_all_negative_fields,
    };
    // both lists are ordered by document id
    let mut pages = Vec::with_capacity(docs.len());
    for (doc, analysis) in docs.iter().zip(&analyses) {
        let page = ReportPage::new(doc, analysis, &opts)?;
        let path = reports.join(page.file_name());
        fs::write(&path, page.to_html()).with_context(|| format!("cannot write {}", path.display()))?;
        pages.push(page);
    }
    let index = reports.join(INDEX_FILE);
    fs::write(&index, render_index(&pages, &opts.generated_at))
        .with_context(|| format!("cannot write {}", index.display()))?;

    let sentences: usize = analyses.iter().map(|d| d.sentences.len()).sum();
    let future: usize = analyses.iter().map(DocumentAnalysis::future_sentences).sum();
    let annotations: Vec<&Annotation> = analyses.iter().flat_map(|d| &d.annotations).collect();
    println!("sentences={sentences} future={future}");
    let per_class: Vec<String> = FutureClass::ALL
        .iter()
        .map(|k| {
            let n = annotations.iter().filter(|x| x.class_label == k.label()).count();
            format!("{}={n}", k.label())
        })
        .collect();
    println!("class_hits={} {}", annotations.len(), per_class.join(" "));
    Ok(SUCCESS)
}

fn read_jsonl(path: &Path) -> Result<Vec<Annotation>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("{}: line {}", path.display(), i + 1)))
        .collect()
}

pub fn eval(global: &Global, a: &EvalArgs) -> Result<u8> {
    let gold_text =
        fs::read_to_string(&a.gold).with_context(|| format!("cannot read {}", a.gold.display()))?;
    let gold = eval::load_gold(&gold_text).with_context(|| a.gold.display().to_string())?;

    let (annotations, sentences) = match (&a.corpus, &a.annotations) {
        (Some(dir), _) => {
            let mut c = load_config(global)?;
            apply_rule_args(&mut c, &a.rules)?;
            let docs = read_corpus_dir(dir)?;
            let analyses = run_engine(&c, &docs)?;
            let n = analyses.iter().map(|d| d.sentences.len()).sum();
            let anns = analyses.into_iter().flat_map(|d| d.annotations).collect();
            (anns, n)
        }
        (None, Some(path)) => (read_jsonl(path)?, 0),
        (None, None) => bail!("eval needs --corpus or --annotations"),
    };

    let report = eval::score(&annotations, &gold).with_sentences(sentences);
    println!("{}", eval::distribution(&gold).render_table());
    print!("{}", report.render_table());
    if let Some(path) = &a.report {
        fs::write(path, report.to_json() + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(SUCCESS)
}
