//! Applies linguistic rules to sentences.
//!
//! Forms of a rule are tried in order. The first form searches the whole
//! sentence; every matched positive form moves the start of the search
//! field to the word after its match, and a form with a field length only
//! looks that many words ahead. A positive form must be found, a negative
//! form must not be. Rules may also require a morphological confirmation of
//! the matched verb.
//!
//! A rule can fire several times in one sentence: each occurrence of its
//! first positive form starts an independent attempt, and attempts do not
//! overlap on that first form.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus_ingest::Document;
use crate::morpho_lite::{analyze_token, is_future_verb_with_siin, strip_clitics, Lexicons, Verdict};
use crate::rule_language::{
    compile_pattern, next_word, ExtractMode, LinguisticRule, Matcher, MorphGate, PatternError, PatternMatch,
    Polarity, VariableTable,
};
use crate::segmenter::{tokenize, Boundaries, Segmenter, Sentence, Span, Token, TokenKind};

const QAD: &str = "قد";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Annotation {
    pub doc_id: String,
    pub sentence_index: usize,
    pub rule_id: String,
    pub category: String,
    pub class_label: String,
    /// Byte spans in the sentence text, ordered and disjoint.
    pub positive_marker_spans: Vec<Span>,
    pub excerpt_span: Option<Span>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RejectReason {
    PositiveNotFound,
    NegativeFound,
    MorphRejected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionTrace {
    pub doc_id: String,
    pub sentence_index: usize,
    pub rule_id: String,
    pub failed_form_index: usize,
    pub reason: RejectReason,
    /// Search field of the negative form that was found.
    pub negative_field_span: Option<Span>,
    /// The negative form as written in the rule.
    pub negative_marker: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EngineConfig {
    pub boundaries: Boundaries,
    /// When set, punctuation between the words of a marker blocks the match.
    pub strict_adjacency: bool,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("rule {rule}, form {form}: {source}")]
    Pattern {
        rule: String,
        form: usize,
        source: PatternError,
    },
}

#[derive(Debug, Clone)]
struct CompiledForm {
    polarity: Polarity,
    matcher: Matcher,
    field_words: usize,
    text: String,
}

#[derive(Debug, Clone)]
struct CompiledRule {
    rule: LinguisticRule,
    forms: Vec<CompiledForm>,
    first_positive: usize,
}

/// Annotations and rejections of one rule on one sentence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleOutcome {
    pub annotations: Vec<Annotation>,
    pub traces: Vec<RejectionTrace>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentAnalysis {
    pub doc_id: String,
    pub sentences: Vec<Sentence>,
    pub annotations: Vec<Annotation>,
    pub traces: Vec<RejectionTrace>,
}

impl DocumentAnalysis {
    /// Distinct sentences carrying at least one annotation.
    pub fn future_sentences(&self) -> usize {
        self.annotations
            .iter()
            .map(|a| a.sentence_index)
            .collect::<BTreeSet<_>>()
            .len()
    }
}

#[derive(Debug, Clone, Copy)]
struct Field {
    start: usize,
    end: usize,
}

/// Rules, variables and lexicons, compiled once and shared read-only.
#[derive(Debug, Clone)]
pub struct Engine {
    rules: Vec<CompiledRule>,
    lexicons: Lexicons,
    config: EngineConfig,
}

impl Engine {
    pub fn new(
        rules: &[LinguisticRule],
        vars: &VariableTable,
        lexicons: Lexicons,
        config: EngineConfig,
    ) -> Result<Self, EngineError> {
        let compiled = rules
            .iter()
            .map(|rule| {
                let forms = rule
                    .forms
                    .iter()
                    .enumerate()
                    .map(|(i, f)| {
                        let matcher =
                            compile_pattern(&f.pattern, vars).map_err(|source| EngineError::Pattern {
                                rule: rule.id.clone(),
                                form: i,
                                source,
                            })?;
                        Ok(CompiledForm {
                            polarity: f.polarity,
                            matcher,
                            field_words: f.search_field_words,
                            text: f.pattern.to_string(),
                        })
                    })
                    .collect::<Result<Vec<_>, EngineError>>()?;
                let first_positive = forms
                    .iter()
                    .position(|f| f.polarity == Polarity::Positive)
                    .expect("parsed rules have a positive form");
                Ok(CompiledRule {
                    rule: rule.clone(),
                    forms,
                    first_positive,
                })
            })
            .collect::<Result<Vec<_>, EngineError>>()?;
        Ok(Self {
            rules: compiled,
            lexicons,
            config,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn lexicons(&self) -> &Lexicons {
        &self.lexicons
    }

    pub fn rules(&self) -> impl Iterator<Item = &LinguisticRule> {
        self.rules.iter().map(|r| &r.rule)
    }

    pub fn segmenter(&self) -> Segmenter {
        Segmenter::new(self.config.boundaries)
    }

    /// First annotation of rule `rule_index`, or the first rejection if it never fires.
    pub fn match_rule(
        &self,
        rule_index: usize,
        sentence: &Sentence,
        tokens: &[Token],
    ) -> Result<Annotation, RejectionTrace> {
        let mut out = self.match_rule_all(rule_index, sentence, tokens);
        if out.annotations.is_empty() {
            Err(out.traces.remove(0))
        } else {
            Ok(out.annotations.remove(0))
        }
    }

    pub fn match_rule_all(&self, rule_index: usize, sentence: &Sentence, tokens: &[Token]) -> RuleOutcome {
        let rule = &self.rules[rule_index];
        let mut out = RuleOutcome::default();
        let trace = |form: usize, reason: RejectReason, field: Option<(Span, String)>| {
            let (negative_field_span, negative_marker) = match field {
                Some((s, m)) => (Some(s), Some(m)),
                None => (None, None),
            };
            RejectionTrace {
                doc_id: sentence.doc_id.clone(),
                sentence_index: sentence.index,
                rule_id: rule.rule.id.clone(),
                failed_form_index: form,
                reason,
                negative_field_span,
                negative_marker,
            }
        };

        for (i, form) in rule.forms[..rule.first_positive].iter().enumerate() {
            let field = self.field(tokens, 0, form.field_words);
            if self.find(form, tokens, field).is_some() {
                out.traces.push(trace(
                    i,
                    RejectReason::NegativeFound,
                    Some((field_span(tokens, field), form.text.clone())),
                ));
                return out;
            }
        }

        let head = &rule.forms[rule.first_positive];
        let head_field = self.field(tokens, 0, head.field_words);
        let mut cursor = head_field;
        while let Some(m) = self.find(head, tokens, cursor) {
            cursor.start = m.last + 1;
            match self.attempt(rule, sentence, tokens, m) {
                Ok(a) => out.annotations.push(a),
                Err((form, reason, field)) => out.traces.push(trace(form, reason, field)),
            }
        }
        if out.annotations.is_empty() && out.traces.is_empty() {
            out.traces
                .push(trace(rule.first_positive, RejectReason::PositiveNotFound, None));
        }
        out
    }

    #[allow(clippy::type_complexity)]
    fn attempt(
        &self,
        rule: &CompiledRule,
        sentence: &Sentence,
        tokens: &[Token],
        head: PatternMatch,
    ) -> Result<Annotation, (usize, RejectReason, Option<(Span, String)>)> {
        let mut spans: Vec<Span> = head.spans.clone();
        let mut next_start = head.last + 1;
        for (i, form) in rule.forms.iter().enumerate().skip(rule.first_positive + 1) {
            let field = self.field(tokens, next_start, form.field_words);
            let found = self.find(form, tokens, field);
            match (form.polarity, found) {
                (Polarity::Positive, Some(m)) => {
                    spans.extend_from_slice(&m.spans);
                    next_start = m.last + 1;
                }
                (Polarity::Positive, None) => return Err((i, RejectReason::PositiveNotFound, None)),
                (Polarity::Negative, Some(_)) => {
                    return Err((
                        i,
                        RejectReason::NegativeFound,
                        Some((field_span(tokens, field), form.text.clone())),
                    ))
                }
                (Polarity::Negative, None) => {}
            }
        }

        let morph_fail = (rule.first_positive, RejectReason::MorphRejected, None);
        match rule.rule.morph {
            Some(MorphGate::Qad) => {
                let verb = self.qad_verb(tokens, &head).ok_or(morph_fail)?;
                spans.push(tokens[verb].span);
            }
            Some(MorphGate::Siin) if !is_future_verb_with_siin(&tokens[head.last].shadow, &self.lexicons) => {
                return Err(morph_fail);
            }
            Some(MorphGate::Siin) | None => {}
        }

        spans.sort_unstable();
        spans.dedup();
        let excerpt_span = match rule.rule.extract {
            ExtractMode::Sentence => None,
            ExtractMode::FromMarkerToEnd => Some((spans[0].0, sentence.text.len())),
        };
        Ok(Annotation {
            doc_id: sentence.doc_id.clone(),
            sentence_index: sentence.index,
            rule_id: rule.rule.id.clone(),
            category: rule.rule.category.clone(),
            class_label: rule.rule.class_label.clone(),
            positive_marker_spans: spans,
            excerpt_span,
        })
    }

    /// Index of the confirmed imperfective verb after the particle, if any.
    fn qad_verb(&self, tokens: &[Token], head: &PatternMatch) -> Option<usize> {
        let particle = head
            .tokens
            .iter()
            .copied()
            .find(|&i| strip_clitics(&tokens[i].shadow).1 == QAD)?;
        let verb = next_word(tokens, particle, self.config.strict_adjacency)?;
        let v = analyze_token(&tokens[verb].shadow, &self.lexicons);
        let excluded = self.lexicons.qad_exclusions.contains(&v.stem)
            || self.lexicons.qad_exclusions.contains(&tokens[verb].shadow);
        (v.verdict == Verdict::PresentVerb && !excluded).then_some(verb)
    }

    /// The search field starting at `start`, cut after `words` Word tokens when non-zero.
    fn field(&self, tokens: &[Token], start: usize, words: usize) -> Field {
        let start = start.min(tokens.len());
        let mut end = tokens.len();
        if words > 0 {
            let mut seen = 0;
            for (i, t) in tokens.iter().enumerate().skip(start) {
                if t.kind == TokenKind::Word {
                    seen += 1;
                    if seen == words {
                        end = i + 1;
                        break;
                    }
                }
            }
        }
        Field { start, end }
    }

    fn find(&self, form: &CompiledForm, tokens: &[Token], field: Field) -> Option<PatternMatch> {
        let scope = &tokens[..field.end];
        (field.start..field.end).find_map(|i| form.matcher.match_at(scope, i, self.config.strict_adjacency))
    }

    pub fn classify_sentence(&self, sentence: &Sentence, tokens: &[Token]) -> Vec<Annotation> {
        self.classify_sentence_traced(sentence, tokens).0
    }

    /// Annotations in rule order, then span order, plus every rejection.
    pub fn classify_sentence_traced(
        &self,
        sentence: &Sentence,
        tokens: &[Token],
    ) -> (Vec<Annotation>, Vec<RejectionTrace>) {
        let mut annotations = Vec::new();
        let mut traces = Vec::new();
        for i in 0..self.rules.len() {
            let out = self.match_rule_all(i, sentence, tokens);
            annotations.extend(out.annotations);
            traces.extend(out.traces);
        }
        (annotations, traces)
    }

    pub fn analyze_document(&self, doc: &Document) -> DocumentAnalysis {
        let sentences = self.segmenter().segment(&doc.id, &doc.body);
        let mut annotations = Vec::new();
        let mut traces = Vec::new();
        for s in &sentences {
            let tokens = tokenize(&s.text);
            let (a, t) = self.classify_sentence_traced(s, &tokens);
            annotations.extend(a);
            traces.extend(t);
        }
        DocumentAnalysis {
            doc_id: doc.id.clone(),
            sentences,
            annotations,
            traces,
        }
    }

    /// Analyzes documents on up to `jobs` threads; results are ordered by document id.
    pub fn analyze_corpus(&self, docs: &[Document], jobs: usize) -> Vec<DocumentAnalysis> {
        let mut out: Vec<DocumentAnalysis> = if jobs <= 1 {
            docs.iter().map(|d| self.analyze_document(d)).collect()
        } else {
            match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
                Ok(pool) => pool.install(|| docs.par_iter().map(|d| self.analyze_document(d)).collect()),
                Err(_) => docs.iter().map(|d| self.analyze_document(d)).collect(),
            }
        };
        out.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        out
    }
}

fn field_span(tokens: &[Token], field: Field) -> Span {
    if field.start >= field.end {
        let at = tokens
            .get(field.start)
            .map_or_else(|| tokens.last().map_or(0, |t| t.span.1), |t| t.span.0);
        return (at, at);
    }
    (tokens[field.start].span.0, tokens[field.end - 1].span.1)
}
