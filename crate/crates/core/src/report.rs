//! HTML result pages.
//!
//! Positive markers are highlighted yellow, the search field of a negative
//! marker that cancelled a rule is shaded red with the marker as hover text,
//! and excerpts are underlined. Sentences are grouped by semantic category.
//! Pages are single files with inline styling.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use html_escape::{encode_double_quoted_attribute as attr, encode_text as text};
use thiserror::Error;
use url::Url;

use crate::corpus_ingest::Document;
use crate::engine::{Annotation, DocumentAnalysis, RejectReason, RejectionTrace};
use crate::eval::FutureClass;
use crate::segmenter::{Sentence, Span};

pub const INDEX_FILE: &str = "index.html";
pub const NO_MATCHES: &str = "no matches";

const STYLE: &str = "body { font-family: 'Noto Naskh Arabic', 'Arial', sans-serif; margin: 2em auto; max-width: 60em; line-height: 1.9; }
header { border-bottom: 1px solid #ccc; margin-bottom: 1em; }
.meta { color: #666; font-size: 0.85em; }
mark.pm { background: #ffeb3b; }
span.nf { background: #f8a5a5; }
u.ex { text-decoration: underline; }
table { border-collapse: collapse; }
td, th { border: 1px solid #ccc; padding: 0.2em 0.6em; }
";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("{doc_id}: span {span:?} is outside sentence {sentence}")]
    SpanOutOfBounds {
        doc_id: String,
        sentence: usize,
        span: Span,
    },
    #[error("{doc_id}: no sentence {sentence}")]
    UnknownSentence { doc_id: String, sentence: usize },
    #[error("annotation for {found} passed with document {doc_id}")]
    ForeignAnnotation { doc_id: String, found: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReportOptions {
    /// Injected timestamp, so identical inputs render identical pages.
    pub generated_at: String,
    /// Shade negative fields of every rendered sentence, not only those of
    /// rules that fired elsewhere in it.
    pub show_all_negative_fields: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedSentence {
    pub index: usize,
    pub html: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportPage {
    pub doc: Document,
    /// Category to its sentences, categories in name order.
    pub groups: Vec<(String, Vec<RenderedSentence>)>,
    pub generated_at: String,
    /// Annotation count per class label.
    pub class_counts: BTreeMap<String, usize>,
}

#[derive(Default, Clone, PartialEq, Eq)]
struct Cover {
    marker: bool,
    excerpt: bool,
    negative: Vec<String>,
}

fn check(doc: &str, s: &Sentence, span: Span) -> Result<Span, ReportError> {
    let (a, b) = span;
    if a <= b && b <= s.text.len() && s.text.is_char_boundary(a) && s.text.is_char_boundary(b) {
        Ok(span)
    } else {
        Err(ReportError::SpanOutOfBounds {
            doc_id: doc.to_string(),
            sentence: s.index,
            span,
        })
    }
}

/// Sentence text with nested highlight elements, split at every span edge
/// so the elements never overlap.
fn render_sentence(
    s: &Sentence,
    markers: &[Span],
    excerpts: &[Span],
    negatives: &[(Span, String)],
) -> String {
    let mut cuts: BTreeSet<usize> = [0, s.text.len()].into();
    for &(a, b) in markers
        .iter()
        .chain(excerpts)
        .chain(negatives.iter().map(|(sp, _)| sp))
    {
        cuts.insert(a);
        cuts.insert(b);
    }
    let cuts: Vec<usize> = cuts.into_iter().collect();
    let inside = |sp: &Span, a: usize, b: usize| sp.0 <= a && b <= sp.1 && sp.0 < sp.1;
    let mut out = String::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let mut titles: Vec<String> = negatives
            .iter()
            .filter(|(sp, _)| inside(sp, a, b))
            .map(|(_, m)| m.clone())
            .collect();
        titles.dedup();
        let cover = Cover {
            marker: markers.iter().any(|sp| inside(sp, a, b)),
            excerpt: excerpts.iter().any(|sp| inside(sp, a, b)),
            negative: titles,
        };
        let mut close = String::new();
        if cover.excerpt {
            out.push_str("<u class=\"ex\">");
            close.insert_str(0, "</u>");
        }
        if !cover.negative.is_empty() {
            let _ = write!(
                out,
                "<span class=\"nf\" title=\"{}\">",
                attr(&cover.negative.join(" | "))
            );
            close.insert_str(0, "</span>");
        }
        if cover.marker {
            out.push_str("<mark class=\"pm\">");
            close.insert_str(0, "</mark>");
        }
        out.push_str(&text(&s.text[a..b]));
        out.push_str(&close);
    }
    out
}

impl ReportPage {
    pub fn new(
        doc: &Document,
        analysis: &DocumentAnalysis,
        opts: &ReportOptions,
    ) -> Result<Self, ReportError> {
        let id = doc.id.as_str();
        let sentence = |i: usize| {
            analysis
                .sentences
                .get(i)
                .filter(|s| s.index == i)
                .or_else(|| analysis.sentences.iter().find(|s| s.index == i))
                .ok_or_else(|| ReportError::UnknownSentence {
                    doc_id: id.to_string(),
                    sentence: i,
                })
        };

        let mut by_cat: BTreeMap<&str, BTreeMap<usize, Vec<&Annotation>>> = BTreeMap::new();
        let mut class_counts = BTreeMap::new();
        for a in &analysis.annotations {
            if a.doc_id != doc.id {
                return Err(ReportError::ForeignAnnotation {
                    doc_id: doc.id.clone(),
                    found: a.doc_id.clone(),
                });
            }
            let s = sentence(a.sentence_index)?;
            for &sp in a.positive_marker_spans.iter().chain(&a.excerpt_span) {
                check(id, s, sp)?;
            }
            by_cat
                .entry(&a.category)
                .or_default()
                .entry(a.sentence_index)
                .or_default()
                .push(a);
            *class_counts.entry(a.class_label.clone()).or_insert(0) += 1;
        }

        let fired: BTreeSet<(usize, &str)> = analysis
            .annotations
            .iter()
            .map(|a| (a.sentence_index, a.rule_id.as_str()))
            .collect();
        let mut negatives: BTreeMap<usize, Vec<(Span, String)>> = BTreeMap::new();
        for t in &analysis.traces {
            let (RejectReason::NegativeFound, Some(sp)) = (t.reason, t.negative_field_span) else {
                continue;
            };
            if !opts.show_all_negative_fields && !fired.contains(&(t.sentence_index, t.rule_id.as_str())) {
                continue;
            }
            let s = sentence(t.sentence_index)?;
            check(id, s, sp)?;
            negatives
                .entry(t.sentence_index)
                .or_default()
                .push((sp, negative_title(t)));
        }

        let mut groups = Vec::new();
        for (cat, sentences) in by_cat {
            let mut rendered = Vec::new();
            for (idx, anns) in sentences {
                let s = sentence(idx)?;
                let markers: Vec<Span> = anns
                    .iter()
                    .flat_map(|a| a.positive_marker_spans.iter().copied())
                    .collect();
                let excerpts: Vec<Span> = anns.iter().filter_map(|a| a.excerpt_span).collect();
                let neg = negatives.get(&idx).map_or(&[][..], Vec::as_slice);
                rendered.push(RenderedSentence {
                    index: idx,
                    html: render_sentence(s, &markers, &excerpts, neg),
                });
            }
            groups.push((cat.to_string(), rendered));
        }

        Ok(Self {
            doc: doc.clone(),
            groups,
            generated_at: opts.generated_at.clone(),
            class_counts,
        })
    }

    pub fn annotation_count(&self) -> usize {
        self.class_counts.values().sum()
    }

    pub fn file_name(&self) -> String {
        format!("{}.html", self.doc.id)
    }

    pub fn to_html(&self) -> String {
        let d = &self.doc;
        let heading = if d.title.is_empty() { &d.url } else { &d.title };
        let mut out = String::new();
        let _ = write!(
            out,
            "<!DOCTYPE html>\n<html lang=\"ar\" dir=\"rtl\">\n<head>\n<meta charset=\"utf-8\">\n<title>{}</title>\n<style>\n{STYLE}</style>\n</head>\n<body>\n<header>\n<h1>{}</h1>\n<p class=\"meta\" dir=\"ltr\">{} · {}</p>\n</header>\n",
            text(heading),
            link(&d.url, heading),
            link(&d.url, &d.url),
            text(&self.generated_at),
        );
        if self.groups.is_empty() {
            let _ = writeln!(out, "<p class=\"no-matches\">{NO_MATCHES}</p>");
        }
        for (cat, sentences) in &self.groups {
            let _ = writeln!(out, "<section class=\"category\">\n<h2>{}</h2>\n<ol>", text(cat));
            for s in sentences {
                let _ = writeln!(out, "<li value=\"{}\">{}</li>", s.index + 1, s.html);
            }
            out.push_str("</ol>\n</section>\n");
        }
        out.push_str("</body>\n</html>\n");
        out
    }
}

fn negative_title(t: &RejectionTrace) -> String {
    match &t.negative_marker {
        Some(m) => format!("{}: {m}", t.rule_id),
        None => t.rule_id.clone(),
    }
}

/// An anchor for web and file URLs; anything else is shown as plain text.
fn link(url: &str, label: &str) -> String {
    match Url::parse(url) {
        Ok(u) if matches!(u.scheme(), "http" | "https" | "file") => {
            format!("<a href=\"{}\">{}</a>", attr(url), text(label))
        }
        _ => text(label).into_owned(),
    }
}

/// Renders the page for one analyzed document.
pub fn render_html(
    doc: &Document,
    analysis: &DocumentAnalysis,
    opts: &ReportOptions,
) -> Result<String, ReportError> {
    Ok(ReportPage::new(doc, analysis, opts)?.to_html())
}

/// Index of report pages in document-id order, with per-class counts.
pub fn render_index(pages: &[ReportPage], generated_at: &str) -> String {
    let mut pages: Vec<&ReportPage> = pages.iter().collect();
    pages.sort_by(|a, b| a.doc.id.cmp(&b.doc.id));
    let mut labels: Vec<String> = FutureClass::ALL.iter().map(|c| c.label().to_string()).collect();
    let extra: BTreeSet<&String> = pages
        .iter()
        .flat_map(|p| p.class_counts.keys())
        .filter(|l| !labels.contains(l))
        .collect();
    labels.extend(extra.into_iter().cloned());

    let mut out = format!(
        "<!DOCTYPE html>\n<html lang=\"ar\" dir=\"rtl\">\n<head>\n<meta charset=\"utf-8\">\n<title>index</title>\n<style>\n{STYLE}</style>\n</head>\n<body>\n<header>\n<h1>{} documents</h1>\n<p class=\"meta\" dir=\"ltr\">{}</p>\n</header>\n<table>\n<thead><tr><th>document</th>",
        pages.len(),
        text(generated_at)
    );
    for l in &labels {
        let _ = write!(out, "<th>{}</th>", text(l));
    }
    out.push_str("<th>total</th></tr></thead>\n<tbody>\n");
    for p in &pages {
        let title = if p.doc.title.is_empty() {
            &p.doc.id
        } else {
            &p.doc.title
        };
        let _ = write!(
            out,
            "<tr><td><a href=\"{}\">{}</a></td>",
            attr(&p.file_name()),
            text(title)
        );
        for l in &labels {
            let _ = write!(out, "<td>{}</td>", p.class_counts.get(l).copied().unwrap_or(0));
        }
        let _ = writeln!(out, "<td>{}</td></tr>", p.annotation_count());
    }
    out.push_str("</tbody>\n</table>\n</body>\n</html>\n");
    out
}
