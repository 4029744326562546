//! Linguistic rule files.
//!
//! One rule per line, in logical order:
//!
//! ```text
//! [qad class:qad morph:qad] (و|ف)؟قد ::فعل_مضارع_قد -> مستقبل
//! -قبل > ::فعل_مضارع@5 <- مستقبل
//! ```
//!
//! The bracketed header is optional. `>` separates forms, a leading `-`
//! makes a form negative and a trailing `@N` limits its search field to N
//! words. `->` and `<-` both introduce the category.

use std::fmt;

use thiserror::Error;

use super::pattern::{Pattern, PatternError};
use super::semantic_map::SemanticMap;
use super::variables::VariableTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinguisticForm {
    pub polarity: Polarity,
    pub pattern: Pattern,
    /// Maximum words scanned; 0 means the rest of the sentence.
    pub search_field_words: usize,
}

/// Morphological check applied after the forms match.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorphGate {
    /// The word after the particle قد must be an imperfective verb.
    Qad,
    /// The matched word must be a س-prefixed imperfective verb.
    Siin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExtractMode {
    #[default]
    Sentence,
    FromMarkerToEnd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinguisticRule {
    pub id: String,
    pub forms: Vec<LinguisticForm>,
    pub category: String,
    pub class_label: String,
    pub morph: Option<MorphGate>,
    pub extract: ExtractMode,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("unresolved variable {name} at line {line}")]
    UnresolvedVariable { name: String, line: usize },
    #[error("rule has no positive marker (line {line})")]
    NoPositive { line: usize },
    #[error("category not in semantic map: {name} (line {line})")]
    UnknownCategory { name: String, line: usize },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Pattern { line: usize, source: PatternError },
    #[error("duplicate rule id {id} at line {line}")]
    DuplicateId { id: String, line: usize },
}

impl RuleError {
    pub fn line(&self) -> usize {
        match self {
            RuleError::UnresolvedVariable { line, .. }
            | RuleError::NoPositive { line }
            | RuleError::UnknownCategory { line, .. }
            | RuleError::Syntax { line, .. }
            | RuleError::Pattern { line, .. }
            | RuleError::DuplicateId { line, .. } => *line,
        }
    }
}

/// Parses a rule file with unbounded default search fields.
pub fn parse_rules(
    text: &str,
    vars: &VariableTable,
    map: &SemanticMap,
) -> Result<Vec<LinguisticRule>, RuleError> {
    parse_rules_with(text, vars, map, 0)
}

pub fn parse_rules_with(
    text: &str,
    vars: &VariableTable,
    map: &SemanticMap,
    default_field_words: usize,
) -> Result<Vec<LinguisticRule>, RuleError> {
    let mut rules: Vec<LinguisticRule> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let rule = parse_rule_line(line, line_no, vars, map, default_field_words)?;
        if rules.iter().any(|r| r.id == rule.id) {
            return Err(RuleError::DuplicateId {
                id: rule.id,
                line: line_no,
            });
        }
        rules.push(rule);
    }
    Ok(rules)
}

fn syntax(line: usize, message: impl Into<String>) -> RuleError {
    RuleError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_rule_line(
    line: &str,
    line_no: usize,
    vars: &VariableTable,
    map: &SemanticMap,
    default_field_words: usize,
) -> Result<LinguisticRule, RuleError> {
    let mut id = format!("rule{line_no}");
    let mut class_label = None;
    let mut morph = None;
    let mut extract = ExtractMode::Sentence;

    let mut body = line;
    if let Some(rest) = line.strip_prefix('[') {
        let (header, after) = rest
            .split_once(']')
            .ok_or_else(|| syntax(line_no, "unterminated rule header"))?;
        body = after;
        let mut parts = header.split_whitespace();
        id = parts
            .next()
            .ok_or_else(|| syntax(line_no, "empty rule header"))?
            .to_string();
        for d in parts {
            match d.split_once(':') {
                Some(("class", v)) if !v.is_empty() => class_label = Some(v.to_string()),
                Some(("morph", "qad")) => morph = Some(MorphGate::Qad),
                Some(("morph", "siin")) => morph = Some(MorphGate::Siin),
                Some(("extract", "sentence")) => extract = ExtractMode::Sentence,
                Some(("extract", "from-marker-to-end")) => extract = ExtractMode::FromMarkerToEnd,
                _ => return Err(syntax(line_no, format!("unknown directive `{d}`"))),
            }
        }
    }

    let arrow = [body.rfind("->"), body.rfind("<-")]
        .into_iter()
        .flatten()
        .max()
        .ok_or_else(|| syntax(line_no, "missing `->` before the category"))?;
    let category = body[arrow + 2..].trim();
    if category.is_empty() || category.contains(char::is_whitespace) {
        return Err(syntax(line_no, "category must be a single name"));
    }
    if !map.contains(category) {
        return Err(RuleError::UnknownCategory {
            name: category.to_string(),
            line: line_no,
        });
    }

    let mut forms = Vec::new();
    for raw in body[..arrow].split('>') {
        forms.push(parse_form(raw.trim(), line_no, vars, default_field_words)?);
    }
    if !forms.iter().any(|f| f.polarity == Polarity::Positive) {
        return Err(RuleError::NoPositive { line: line_no });
    }
    Ok(LinguisticRule {
        class_label: class_label.unwrap_or_else(|| id.clone()),
        id,
        forms,
        category: category.to_string(),
        morph,
        extract,
    })
}

fn parse_form(
    raw: &str,
    line_no: usize,
    vars: &VariableTable,
    default_field_words: usize,
) -> Result<LinguisticForm, RuleError> {
    let (polarity, mut src) = match raw.strip_prefix('-') {
        Some(rest) => (Polarity::Negative, rest.trim_start()),
        None => (Polarity::Positive, raw),
    };
    let mut search_field_words = default_field_words;
    if let Some((head, n)) = src.rsplit_once('@') {
        search_field_words = n
            .trim()
            .parse()
            .map_err(|_| syntax(line_no, format!("bad search field length `@{n}`")))?;
        src = head.trim_end();
    }
    if src.is_empty() {
        return Err(syntax(line_no, "empty linguistic form"));
    }
    let pattern = Pattern::parse(src).map_err(|source| RuleError::Pattern {
        line: line_no,
        source,
    })?;
    if let Some(name) = pattern.var_refs().into_iter().find(|n| !vars.contains(n)) {
        return Err(RuleError::UnresolvedVariable { name, line: line_no });
    }
    Ok(LinguisticForm {
        polarity,
        pattern,
        search_field_words,
    })
}

impl fmt::Display for LinguisticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.polarity == Polarity::Negative {
            f.write_str("-")?;
        }
        write!(f, "{}", self.pattern)?;
        if self.search_field_words > 0 {
            write!(f, "@{}", self.search_field_words)?;
        }
        Ok(())
    }
}

impl fmt::Display for LinguisticRule {
    /// Canonical one-line form; parsing it yields an equal rule.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} class:{}", self.id, self.class_label)?;
        match self.morph {
            Some(MorphGate::Qad) => f.write_str(" morph:qad")?,
            Some(MorphGate::Siin) => f.write_str(" morph:siin")?,
            None => {}
        }
        if self.extract == ExtractMode::FromMarkerToEnd {
            f.write_str(" extract:from-marker-to-end")?;
        }
        f.write_str("] ")?;
        for (i, form) in self.forms.iter().enumerate() {
            if i > 0 {
                f.write_str(" > ")?;
            }
            write!(f, "{form}")?;
        }
        write!(f, " -> {}", self.category)
    }
}
