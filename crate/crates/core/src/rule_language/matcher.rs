//! Compiled marker patterns.
//!
//! A pattern is compiled into a small NFA over three kinds of input: the
//! characters of a word's shadow, a word separator, and whole-word token
//! classes. Words are fed one at a time; a run of separator edges in the
//! pattern (created when an optional group between two spaced elements is
//! skipped) consumes a single separator in the input, and separators at
//! either end of the pattern are ignored. Matches always cover whole words.

use super::pattern::{Element, Join, Pattern, PatternError};
use super::variables::{TokenClass, VariableTable};
use crate::segmenter::{shadow, Span, Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Edge {
    Char(char, usize),
    Space(usize),
    Eps(usize),
    Class(TokenClass, usize),
}

/// Result of a successful match, in token indices of the input slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternMatch {
    pub first: usize,
    pub last: usize,
    /// Indices of the matched Word tokens, in order.
    pub tokens: Vec<usize>,
    /// Byte spans of the matched words.
    pub spans: Vec<Span>,
}

#[derive(Debug, Clone)]
pub struct Matcher {
    edges: Vec<Vec<Edge>>,
    start: usize,
    accept: usize,
    first_chars: Vec<char>,
    first_classes: Vec<TokenClass>,
}

#[derive(Clone)]
struct StateSet {
    bits: Vec<u64>,
    list: Vec<usize>,
}

impl StateSet {
    fn new(n: usize) -> Self {
        Self {
            bits: vec![0; n.div_ceil(64)],
            list: Vec::new(),
        }
    }

    fn insert(&mut self, s: usize) -> bool {
        let (w, b) = (s / 64, 1u64 << (s % 64));
        if self.bits[w] & b != 0 {
            return false;
        }
        self.bits[w] |= b;
        self.list.push(s);
        true
    }

    fn contains(&self, s: usize) -> bool {
        self.bits[s / 64] & (1u64 << (s % 64)) != 0
    }

    fn is_empty(&self) -> bool {
        self.list.is_empty()
    }
}

struct Builder<'a> {
    edges: Vec<Vec<Edge>>,
    vars: &'a VariableTable,
}

impl Builder<'_> {
    fn state(&mut self) -> usize {
        self.edges.push(Vec::new());
        self.edges.len() - 1
    }

    fn edge(&mut self, from: usize, e: Edge) {
        self.edges[from].push(e);
    }

    fn seq(&mut self, p: &Pattern, mut cur: usize) -> Result<usize, PatternError> {
        for (i, el) in p.elements.iter().enumerate() {
            if i > 0 && p.joins[i - 1] == Join::Spaced {
                let s = self.state();
                self.edge(cur, Edge::Space(s));
                cur = s;
            }
            cur = self.element(el, cur)?;
        }
        Ok(cur)
    }

    fn element(&mut self, el: &Element, mut cur: usize) -> Result<usize, PatternError> {
        match el {
            Element::Literal(text) => {
                for c in shadow(text).chars() {
                    let s = self.state();
                    self.edge(cur, Edge::Char(c, s));
                    cur = s;
                }
                Ok(cur)
            }
            Element::Var(name) => {
                let class = self
                    .vars
                    .builtin(name)
                    .ok_or_else(|| PatternError::Unresolved(name.clone()))?;
                let s = self.state();
                self.edge(cur, Edge::Class(class, s));
                Ok(s)
            }
            Element::Alt(alts) => {
                let end = self.state();
                for alt in alts {
                    let s = self.state();
                    self.edge(cur, Edge::Eps(s));
                    let e = self.seq(alt, s)?;
                    self.edge(e, Edge::Eps(end));
                }
                Ok(end)
            }
            Element::Opt(p) => {
                let s = self.state();
                self.edge(cur, Edge::Eps(s));
                let e = self.seq(p, s)?;
                let end = self.state();
                self.edge(e, Edge::Eps(end));
                self.edge(cur, Edge::Eps(end));
                Ok(end)
            }
        }
    }
}

/// Compiles `p` after inlining its variables from `vars`.
pub fn compile_pattern(p: &Pattern, vars: &VariableTable) -> Result<Matcher, PatternError> {
    let expanded = vars.expand(p)?;
    let mut b = Builder {
        edges: Vec::new(),
        vars,
    };
    let start = b.state();
    let accept = b.seq(&expanded, start)?;
    let mut m = Matcher {
        edges: b.edges,
        start,
        accept,
        first_chars: Vec::new(),
        first_classes: Vec::new(),
    };
    let init = m.closure_from(&[start], true);
    if init.contains(accept) {
        return Err(PatternError::MatchesEmpty);
    }
    for &s in &init.list {
        for e in &m.edges[s] {
            match *e {
                Edge::Char(c, _) if !m.first_chars.contains(&c) => m.first_chars.push(c),
                Edge::Class(k, _) if !m.first_classes.contains(&k) => m.first_classes.push(k),
                _ => {}
            }
        }
    }
    Ok(m)
}

impl Matcher {
    pub fn state_count(&self) -> usize {
        self.edges.len()
    }

    /// Epsilon closure, optionally following separator edges too.
    fn closure_from(&self, seeds: &[usize], with_space: bool) -> StateSet {
        let mut set = StateSet::new(self.edges.len());
        let mut stack: Vec<usize> = Vec::new();
        for &s in seeds {
            if set.insert(s) {
                stack.push(s);
            }
        }
        while let Some(s) = stack.pop() {
            for e in &self.edges[s] {
                let t = match *e {
                    Edge::Eps(t) => t,
                    Edge::Space(t) if with_space => t,
                    _ => continue,
                };
                if set.insert(t) {
                    stack.push(t);
                }
            }
        }
        set
    }

    /// One input separator: at least one pattern separator, epsilons around it.
    fn step_space(&self, set: &StateSet) -> StateSet {
        let mut seeds = Vec::new();
        for &s in &set.list {
            for e in &self.edges[s] {
                if let Edge::Space(t) = *e {
                    seeds.push(t);
                }
            }
        }
        self.closure_from(&seeds, true)
    }

    fn step_char(&self, set: &StateSet, c: char) -> StateSet {
        let mut seeds = Vec::new();
        for &s in &set.list {
            for e in &self.edges[s] {
                if let Edge::Char(d, t) = *e {
                    if d == c {
                        seeds.push(t);
                    }
                }
            }
        }
        self.closure_from(&seeds, false)
    }

    fn accepting(&self, set: &StateSet) -> bool {
        self.closure_from(&set.list, true).contains(self.accept)
    }

    /// Feeds one word; returns the states alive at its end.
    fn feed_word(&self, at_start: &StateSet, word: &str) -> StateSet {
        let mut seeds = Vec::new();
        for &s in &at_start.list {
            for e in &self.edges[s] {
                if let Edge::Class(k, t) = *e {
                    if k.accepts(word) {
                        seeds.push(t);
                    }
                }
            }
        }
        let mut set = at_start.clone();
        for c in word.chars() {
            set = self.step_char(&set, c);
            if set.is_empty() {
                break;
            }
        }
        if word.is_empty() {
            set = StateSet::new(self.edges.len());
        }
        for t in seeds {
            set.insert(t);
        }
        self.closure_from(&set.list.clone(), false)
    }

    fn could_start(&self, word: &str) -> bool {
        word.chars().next().is_some_and(|c| self.first_chars.contains(&c))
            || self.first_classes.iter().any(|k| k.accepts(word))
    }

    /// Longest match starting at `tokens[start]`, which must be a Word.
    ///
    /// Consecutive pattern words are read from consecutive Word tokens.
    /// Punct tokens in between are skipped unless `strict` is set; any other
    /// token ends the input.
    pub fn match_at(&self, tokens: &[Token], start: usize, strict: bool) -> Option<PatternMatch> {
        let first = tokens.get(start)?;
        if first.kind != TokenKind::Word || !self.could_start(&first.shadow) {
            return None;
        }
        let mut cur = self.closure_from(&[self.start], true);
        let mut consumed: Vec<usize> = Vec::new();
        let mut best = None;
        let mut idx = start;
        loop {
            if !consumed.is_empty() {
                cur = self.step_space(&cur);
                if cur.is_empty() {
                    break;
                }
            }
            cur = self.feed_word(&cur, &tokens[idx].shadow);
            if cur.is_empty() {
                break;
            }
            consumed.push(idx);
            if self.accepting(&cur) {
                best = Some(consumed.len());
            }
            match next_word(tokens, idx, strict) {
                Some(n) => idx = n,
                None => break,
            }
        }
        let n = best?;
        let matched = &consumed[..n];
        Some(PatternMatch {
            first: matched[0],
            last: matched[n - 1],
            tokens: matched.to_vec(),
            spans: matched.iter().map(|&i| tokens[i].span).collect(),
        })
    }

    /// Whether the words, in order, form exactly one expansion of the pattern.
    pub fn full_match(&self, words: &[&str]) -> bool {
        if words.is_empty() {
            return false;
        }
        let mut cur = self.closure_from(&[self.start], true);
        for (i, w) in words.iter().enumerate() {
            if i > 0 {
                cur = self.step_space(&cur);
            }
            cur = self.feed_word(&cur, &shadow(w));
            if cur.is_empty() {
                return false;
            }
        }
        self.accepting(&cur)
    }
}

/// Index of the Word token that follows `idx`, skipping punctuation unless `strict`.
pub fn next_word(tokens: &[Token], idx: usize, strict: bool) -> Option<usize> {
    let mut j = idx + 1;
    while j < tokens.len() {
        match tokens[j].kind {
            TokenKind::Word => return Some(j),
            TokenKind::Punct if !strict => j += 1,
            _ => return None,
        }
    }
    None
}
