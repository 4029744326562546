//! Sentence segmentation and word tokenization.
//!
//! Sentences end at typographic boundaries: a period followed by whitespace
//! (or end of text), the Arabic question mark `؟` or `!` under the same
//! condition, and newlines. Each trigger can be switched off independently;
//! [`Boundaries::dot_space_only`] keeps only the period rule.
//!
//! Tokens keep their original surface for rendering and carry a *shadow*
//! (diacritics and tatweel removed) that the rule matcher compares against.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Byte range `(start, end)` into some owning string.
pub type Span = (usize, usize);

pub const TATWEEL: char = '\u{0640}';

/// Short-vowel and gemination marks: fathatan through sukun.
pub fn is_diacritic(c: char) -> bool {
    ('\u{064B}'..='\u{0652}').contains(&c)
}

/// Diacritic- and tatweel-free form of `s`.
pub fn shadow(s: &str) -> String {
    s.chars().filter(|&c| c != TATWEEL && !is_diacritic(c)).collect()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SegmentError {
    #[error("unknown boundary trigger `{0}` (expected dot-space, question, exclamation, newline or all)")]
    UnknownTrigger(String),
}

/// Which boundary triggers are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Boundaries {
    pub dot_space: bool,
    pub question: bool,
    pub exclamation: bool,
    pub newline: bool,
}

impl Default for Boundaries {
    fn default() -> Self {
        Self {
            dot_space: true,
            question: true,
            exclamation: true,
            newline: true,
        }
    }
}

impl Boundaries {
    pub fn dot_space_only() -> Self {
        Self {
            dot_space: true,
            question: false,
            exclamation: false,
            newline: false,
        }
    }

    fn none() -> Self {
        Self {
            dot_space: false,
            question: false,
            exclamation: false,
            newline: false,
        }
    }

    /// Whether `c` closes a sentence given the character after it.
    pub fn is_trigger(&self, c: char, next: Option<char>) -> bool {
        let spaced = next.is_none_or(char::is_whitespace);
        match c {
            '\n' => self.newline,
            '.' => self.dot_space && spaced,
            '؟' => self.question && spaced,
            '!' => self.exclamation && spaced,
            _ => false,
        }
    }
}

impl FromStr for Boundaries {
    type Err = SegmentError;

    /// Comma-separated trigger names, e.g. `dot-space,newline`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut b = Boundaries::none();
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            match name {
                "all" => b = Boundaries::default(),
                "dot-space" => b.dot_space = true,
                "question" => b.question = true,
                "exclamation" => b.exclamation = true,
                "newline" => b.newline = true,
                other => return Err(SegmentError::UnknownTrigger(other.to_string())),
            }
        }
        Ok(b)
    }
}

impl fmt::Display for Boundaries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.dot_space, "dot-space"),
            (self.question, "question"),
            (self.exclamation, "exclamation"),
            (self.newline, "newline"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, n)| *n)
        .collect();
        f.write_str(&names.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub doc_id: String,
    /// Position in the document, starting at 0.
    pub index: usize,
    /// Trimmed extent in the document body.
    pub span: Span,
    pub text: String,
}

#[derive(Debug, Clone, Default)]
pub struct Segmenter {
    pub boundaries: Boundaries,
}

impl Segmenter {
    pub fn new(boundaries: Boundaries) -> Self {
        Self { boundaries }
    }

    pub fn segment(&self, doc_id: &str, body: &str) -> Vec<Sentence> {
        let mut out = Vec::new();
        let mut start = 0;
        let mut chars = body.char_indices().peekable();
        while let Some((i, c)) = chars.next() {
            let next = chars.peek().map(|&(_, n)| n);
            if self.boundaries.is_trigger(c, next) {
                let end = i + c.len_utf8();
                push_sentence(&mut out, doc_id, body, start, end);
                start = end;
            }
        }
        push_sentence(&mut out, doc_id, body, start, body.len());
        out
    }
}

fn push_sentence(out: &mut Vec<Sentence>, doc_id: &str, body: &str, start: usize, end: usize) {
    let raw = &body[start..end];
    let text = raw.trim();
    if text.is_empty() {
        return;
    }
    let lead = raw.len() - raw.trim_start().len();
    let s = start + lead;
    out.push(Sentence {
        doc_id: doc_id.to_string(),
        index: out.len(),
        span: (s, s + text.len()),
        text: text.to_string(),
    });
}

/// Segments with every boundary trigger enabled and an empty document id.
pub fn segment(body: &str) -> Vec<Sentence> {
    Segmenter::default().segment("", body)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Word,
    Punct,
    Digit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// Original text with tatweel removed; diacritics kept.
    pub surface: String,
    /// Matching form: no diacritics, no tatweel.
    pub shadow: String,
    /// Byte range in the sentence text (tatweel included).
    pub span: Span,
    pub kind: TokenKind,
}

fn is_word_char(c: char) -> bool {
    c.is_alphabetic() || is_diacritic(c) || c == TATWEEL
}

pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((start, c)) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        let kind = if is_word_char(c) {
            TokenKind::Word
        } else if c.is_numeric() {
            TokenKind::Digit
        } else {
            TokenKind::Punct
        };
        let mut end = start + c.len_utf8();
        if kind != TokenKind::Punct {
            while let Some(&(j, n)) = chars.peek() {
                let same = match kind {
                    TokenKind::Word => is_word_char(n),
                    _ => n.is_numeric() && !is_word_char(n),
                };
                if !same {
                    break;
                }
                end = j + n.len_utf8();
                chars.next();
            }
        }
        let raw = &text[start..end];
        let (surface, kind) = match kind {
            TokenKind::Word => {
                let s: String = raw.chars().filter(|&ch| ch != TATWEEL).collect();
                // bare tatweel or marks carry no letters
                if shadow(&s).is_empty() {
                    (raw.to_string(), TokenKind::Punct)
                } else {
                    (s, TokenKind::Word)
                }
            }
            k => (raw.to_string(), k),
        };
        let shadow = if kind == TokenKind::Word {
            shadow(&surface)
        } else {
            surface.clone()
        };
        tokens.push(Token {
            surface,
            shadow,
            span: (start, end),
            kind,
        });
    }
    tokens
}
