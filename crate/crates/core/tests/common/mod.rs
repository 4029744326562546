//! Test support: a brute-force reference classifier and a sentence generator.
//!
//! The reference never touches the engine or the pattern compiler. It
//! re-reads the rule and variable files with its own small parser, lists
//! every expansion of each marker, and scans sentences word by word.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use slcsas::morpho_lite::{analyze_token, is_future_verb_with_siin};
use slcsas::{Lexicons, Verdict};

pub type Span = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
enum Piece {
    Text(String),
    Gap,
    Class(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Word {
    Lit(String),
    Class(String),
}

fn cross(a: Vec<Vec<Piece>>, b: Vec<Vec<Piece>>) -> Vec<Vec<Piece>> {
    let mut out = Vec::new();
    for x in &a {
        for y in &b {
            let mut v = x.clone();
            v.extend(y.iter().cloned());
            out.push(v);
        }
    }
    out
}

struct Expander<'a> {
    chars: Vec<char>,
    pos: usize,
    vars: &'a BTreeMap<String, String>,
}

const BUILTIN_CLASSES: [&str; 2] = ["فعل_مضارع_س", "فعل_مضارع_قد"];

impl Expander<'_> {
    fn seq(&mut self) -> Vec<Vec<Piece>> {
        let mut acc = vec![vec![]];
        while let Some(&c) = self.chars.get(self.pos) {
            match c {
                ')' | '|' => break,
                c if c.is_whitespace() => {
                    self.pos += 1;
                    acc = cross(acc, vec![vec![Piece::Gap]]);
                }
                '(' => {
                    self.pos += 1;
                    let mut alts = self.seq();
                    while self.chars.get(self.pos) == Some(&'|') {
                        self.pos += 1;
                        alts.extend(self.seq());
                    }
                    assert_eq!(self.chars.get(self.pos), Some(&')'));
                    self.pos += 1;
                    if matches!(self.chars.get(self.pos), Some('؟') | Some('?')) {
                        self.pos += 1;
                        alts.push(vec![]);
                    }
                    acc = cross(acc, alts);
                }
                ':' => {
                    self.pos += 2;
                    let start = self.pos;
                    while self
                        .chars
                        .get(self.pos)
                        .is_some_and(|c| c.is_alphanumeric() || *c == '_')
                    {
                        self.pos += 1;
                    }
                    let name: String = self.chars[start..self.pos].iter().collect();
                    let alts = if let Some(body) = self.vars.get(&name) {
                        expand_text(body, self.vars)
                    } else {
                        assert!(BUILTIN_CLASSES.contains(&name.as_str()), "unknown {name}");
                        vec![vec![Piece::Class(name)]]
                    };
                    acc = cross(acc, alts);
                }
                c => {
                    self.pos += 1;
                    acc = cross(acc, vec![vec![Piece::Text(c.to_string())]]);
                }
            }
        }
        acc
    }
}

fn expand_text(src: &str, vars: &BTreeMap<String, String>) -> Vec<Vec<Piece>> {
    let mut e = Expander {
        chars: src.chars().collect(),
        pos: 0,
        vars,
    };
    let out = e.seq();
    assert_eq!(e.pos, e.chars.len(), "trailing input in {src}");
    out
}

/// Pieces to words: gaps separate words, leading and trailing gaps vanish.
fn to_words(pieces: &[Piece]) -> Vec<Word> {
    let mut words = Vec::new();
    let mut cur: Option<Word> = None;
    for p in pieces {
        match p {
            Piece::Gap => words.extend(cur.take()),
            Piece::Text(t) => match &mut cur {
                None => cur = Some(Word::Lit(t.clone())),
                Some(Word::Lit(s)) => s.push_str(t),
                Some(Word::Class(_)) => panic!("class glued to text"),
            },
            Piece::Class(c) => {
                assert!(cur.is_none(), "class glued to text");
                cur = Some(Word::Class(c.clone()));
            }
        }
    }
    words.extend(cur);
    words
}

pub fn expansions(src: &str, vars: &BTreeMap<String, String>) -> BTreeSet<Vec<WordKey>> {
    expand_text(src, vars)
        .iter()
        .map(|p| to_words(p).into_iter().map(WordKey::from).collect::<Vec<_>>())
        .filter(|w| !w.is_empty())
        .collect()
}

/// Orderable form of [`Word`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum WordKey {
    Lit(String),
    Class(String),
}

impl From<Word> for WordKey {
    fn from(w: Word) -> Self {
        match w {
            Word::Lit(s) => WordKey::Lit(s),
            Word::Class(s) => WordKey::Class(s),
        }
    }
}

pub fn parse_vars(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .map(str::trim)
        .filter(|l| l.starts_with("::"))
        .map(|l| {
            let (name, body) = l[2..].split_once('=').unwrap();
            (name.trim().to_string(), body.trim().to_string())
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct OracleRule {
    pub class: String,
    pub morph: Option<String>,
    pub expansions: Vec<Vec<WordKey>>,
}

pub fn parse_rules(rules: &str, vars_text: &str) -> Vec<OracleRule> {
    let vars = parse_vars(vars_text);
    let mut out = Vec::new();
    for line in rules.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (header, rest) = line[1..].split_once(']').unwrap();
        let mut id = "";
        let mut class = None;
        let mut morph = None;
        for (i, item) in header.split_whitespace().enumerate() {
            if i == 0 {
                id = item;
            } else if let Some(c) = item.strip_prefix("class:") {
                class = Some(c.to_string());
            } else if let Some(m) = item.strip_prefix("morph:") {
                morph = Some(m.to_string());
            }
        }
        let (pattern, _) = rest.rsplit_once("->").unwrap();
        assert!(!pattern.contains('>'), "reference handles single-form rules only");
        out.push(OracleRule {
            class: class.unwrap_or_else(|| id.to_string()),
            morph,
            expansions: expansions(pattern.trim(), &vars).into_iter().collect(),
        });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Word,
    Punct,
    Digit,
}

#[derive(Debug, Clone)]
struct Tok {
    kind: Kind,
    key: String,
    span: Span,
}

fn strip_marks(s: &str) -> String {
    s.chars()
        .filter(|&c| !('\u{064B}'..='\u{0652}').contains(&c) && c != '\u{0640}')
        .collect()
}

fn letter(c: char) -> bool {
    c.is_alphabetic() || ('\u{064B}'..='\u{0652}').contains(&c) || c == '\u{0640}'
}

fn toks(text: &str) -> Vec<Tok> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (start, c) = chars[i];
        let end_of = |j: usize| chars.get(j).map_or(text.len(), |x| x.0);
        if c.is_whitespace() {
            i += 1;
        } else if letter(c) {
            let mut j = i;
            while j < chars.len() && letter(chars[j].1) {
                j += 1;
            }
            let raw = &text[start..end_of(j)];
            let key = strip_marks(raw);
            let kind = if key.is_empty() { Kind::Punct } else { Kind::Word };
            out.push(Tok {
                kind,
                key,
                span: (start, end_of(j)),
            });
            i = j;
        } else if c.is_numeric() {
            let mut j = i;
            while j < chars.len() && chars[j].1.is_numeric() && !letter(chars[j].1) {
                j += 1;
            }
            out.push(Tok {
                kind: Kind::Digit,
                key: String::new(),
                span: (start, end_of(j)),
            });
            i = j;
        } else {
            out.push(Tok {
                kind: Kind::Punct,
                key: String::new(),
                span: (start, end_of(i + 1)),
            });
            i += 1;
        }
    }
    out
}

fn class_accepts(name: &str, w: &str) -> bool {
    match name {
        "فعل_مضارع_قد" => !w.is_empty(),
        "فعل_مضارع_س" => {
            let bare = ["و", "ف"]
                .iter()
                .find_map(|p| w.strip_prefix(p).filter(|r| !r.is_empty()))
                .unwrap_or(w);
            bare.starts_with('س') && bare.chars().count() >= 2
        }
        other => panic!("unknown class {other}"),
    }
}

fn word_ok(k: &WordKey, w: &str) -> bool {
    match k {
        WordKey::Lit(s) => s == w,
        WordKey::Class(c) => class_accepts(c, w),
    }
}

/// `(class_label, marker spans)` for every rule firing in `text`.
pub fn oracle(rules: &[OracleRule], lex: &Lexicons, text: &str) -> BTreeSet<(String, Vec<Span>)> {
    let tokens = toks(text);
    // each word with the words that may follow it (punctuation skipped, digits block)
    let words: Vec<usize> = (0..tokens.len())
        .filter(|&i| tokens[i].kind == Kind::Word)
        .collect();
    let follows = |a: usize, b: usize| tokens[a + 1..b].iter().all(|t| t.kind == Kind::Punct);
    let mut out = BTreeSet::new();
    for rule in rules {
        let mut w = 0;
        while w < words.len() {
            // longest expansion starting at word w
            let mut best: Option<usize> = None;
            for exp in &rule.expansions {
                let n = exp.len();
                if w + n > words.len() {
                    continue;
                }
                let ok = (0..n).all(|k| word_ok(&exp[k], &tokens[words[w + k]].key))
                    && (1..n).all(|k| follows(words[w + k - 1], words[w + k]));
                if ok && best.is_none_or(|b| n > b) {
                    best = Some(n);
                }
            }
            let Some(n) = best else {
                w += 1;
                continue;
            };
            let idx: Vec<usize> = (w..w + n).map(|k| words[k]).collect();
            let last = &tokens[*idx.last().unwrap()].key;
            let pass = match rule.morph.as_deref() {
                None => true,
                Some("siin") => is_future_verb_with_siin(last, lex),
                Some("qad") => {
                    let v = analyze_token(last, lex);
                    v.verdict == Verdict::PresentVerb
                        && !lex.qad_exclusions.contains(&v.stem)
                        && !lex.qad_exclusions.contains(last)
                }
                Some(m) => panic!("unknown gate {m}"),
            };
            if pass {
                out.insert((rule.class.clone(), idx.iter().map(|&i| tokens[i].span).collect()));
            }
            w += n;
        }
    }
    out
}

const MARKERS: &[&str] = &[
    "سوف",
    "لن",
    "قد",
    "سيوفر",
    "سيؤثر",
    "ستجلب",
    "ستنطلق",
    "سنمنح",
    "سيترتب",
    "متوقع",
    "مرجح",
    "مرتقب",
    "مستبعد",
    "محتمل",
    "ممكن",
    "مرجو",
    "متوقعا",
    "مستبعدا",
    "من المتوقع",
    "من المرجح",
    "من الممكن",
    "توقع",
    "توقعت",
    "استبعد",
    "ارتقب",
    "ارتقبت",
    "يتوقع",
    "تتوقع",
    "نتوقع",
    "أتوقع",
    "يستبعد",
    "يرجح",
    "ترجو",
    "نرجح",
];

const VERBS: &[&str] = &[
    "يترتب",
    "يكون",
    "يعود",
    "درس",
    "قلصت",
    "تستقر",
    "يجري",
    "تتراوح",
    "كان",
    "يعد",
    "تجارة",
];

const DISTRACTORS: &[&str] = &[
    "سويسرا",
    "سيمون",
    "سندات",
    "سنوية",
    "سنويا",
    "لندن",
    "قدم",
    "قدرة",
    "سوريا",
    "سافر",
    "الاقتصاد",
    "لبنان",
    "الحكومة",
    "المصرف",
    "النمو",
    "مستقبل",
    "لنا",
    "سوفت",
    "ترقب",
    "توقعات",
    "المال",
    "من",
    "ال",
    "متوقف",
    "س",
    "و",
    "سيشيل",
    "المتوقع",
];

const PUNCT: &[&str] = &["،", "؛", "\"", "(", ")", ":", "-", "«", "»"];

fn decorate(rng: &mut ChaCha8Rng, word: &str) -> String {
    let mut w = word.to_string();
    if rng.random_bool(0.25) {
        w.insert_str(0, ["و", "ف"].choose(rng).unwrap());
    }
    if rng.random_bool(0.08) {
        // a fatha after the first letter
        let first = w.chars().next().unwrap().len_utf8();
        w.insert(first, '\u{064E}');
    }
    if rng.random_bool(0.04) && w.chars().count() > 2 {
        let first = w.chars().next().unwrap().len_utf8();
        w.insert(first, '\u{0640}');
    }
    w
}

/// A sentence of 2 to 14 pieces mixing markers, verbs, distractors and punctuation.
pub fn generate_sentence(rng: &mut ChaCha8Rng) -> String {
    let n = rng.random_range(2..15);
    let mut parts: Vec<String> = Vec::new();
    for _ in 0..n {
        let roll = rng.random_range(0..100);
        let word = if roll < 30 {
            {
                let w = MARKERS.choose(rng).unwrap();
                decorate(rng, w)
            }
        } else if roll < 50 {
            {
                let w = VERBS.choose(rng).unwrap();
                decorate(rng, w)
            }
        } else if roll < 90 {
            {
                let w = DISTRACTORS.choose(rng).unwrap();
                decorate(rng, w)
            }
        } else if roll < 95 {
            rng.random_range(1..3000).to_string()
        } else {
            "1.5".to_string()
        };
        parts.push(word);
        if rng.random_bool(0.15) {
            let p = PUNCT.choose(rng).unwrap();
            if rng.random_bool(0.5) {
                parts.last_mut().unwrap().push_str(p);
            } else {
                parts.push(p.to_string());
            }
        }
    }
    parts.join(" ")
}

const TEXT_PIECES: &[&str] = &[
    "الاقتصاد",
    "لبنان",
    "سوف",
    "قد يترتب",
    "1.5 في المائة",
    ".",
    ". ",
    "؟",
    "؟ ",
    "!",
    "! ",
    "\n",
    "\n\n",
    " ",
    "  ",
    "\t",
    "\"",
    "،",
    "3.14",
    "...",
    ".\"",
    "?",
    "ـ",
    "َ",
    "abc",
    "e.g.",
    "\r\n",
];

/// Free text for segmentation: words, decimals and every boundary trigger.
pub fn generate_text(rng: &mut ChaCha8Rng) -> String {
    let n = rng.random_range(0..40);
    let mut s = String::new();
    for _ in 0..n {
        s.push_str(TEXT_PIECES.choose(rng).unwrap());
        if rng.random_bool(0.5) {
            s.push(' ');
        }
    }
    s
}

/// Reference splitter: cuts after every trigger by a direct scan.
pub fn reference_split(body: &str) -> Vec<String> {
    let chars: Vec<char> = body.chars().collect();
    let mut out = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        cur.push(c);
        let next_ws = chars.get(i + 1).is_none_or(|n| n.is_whitespace());
        if c == '\n' || (matches!(c, '.' | '؟' | '!') && next_ws) {
            out.push(std::mem::take(&mut cur));
        }
    }
    out.push(cur);
    out.into_iter()
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Whether `text` holds a trigger anywhere but its final character.
pub fn has_internal_trigger(text: &str) -> bool {
    let chars: Vec<char> = text.chars().collect();
    (0..chars.len().saturating_sub(1)).any(|i| {
        let c = chars[i];
        c == '\n' || (matches!(c, '.' | '؟' | '!') && chars[i + 1].is_whitespace())
    })
}

/// Published values of each lexicon variable.
pub const LISTED_PARTICIPLE_STEMS: [&str; 6] = ["ممكن", "متوقع", "مرجح", "مرتقب", "مرجو", "مستبعد"];
pub const LISTED_SIIN: [&str; 14] = [
    "سيفرض",
    "وستنطلق",
    "وسيجري",
    "ستمكن",
    "سيجيره",
    "سيفرح",
    "ستصعب",
    "سيوجهان",
    "سيتقاضون",
    "سيجبر",
    "سنتر",
    "ستجوب",
    "سنمنح",
    "ستتضمن",
];
pub const LISTED_QAD: [&str; 15] = [
    "يواجهه",
    "تستخدم",
    "يعجز",
    "يسفر",
    "يستوعب",
    "يطال",
    "يطول",
    "نلحظ",
    "يشاهدها",
    "تعيق",
    "تتخلف",
    "تعتقدن",
    "تترتب",
    "تستقر",
    "تتراوح",
];
pub const LISTED_PAST_STEMS: [&str; 3] = ["توقع", "استبعد", "ارتقب"];
pub const LISTED_PRESENT_PREFIXES: [&str; 3] = ["ي", "ن", "ا"];
/// استبعد loses its initial alef after a prefix letter.
pub const LISTED_PRESENT_STEMS: [&str; 4] = ["توقع", "ستبعد", "رجح", "رجو"];
pub const CLITICS: [&str; 3] = ["", "و", "ف"];

pub struct Check {
    pub total: usize,
    pub failures: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check {
            total: 0,
            failures: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, what: String) {
        self.total += 1;
        if !ok {
            self.failures.push(what);
        }
    }
}

/// Runs every listed value through the test its variable calls for.
pub fn listed_value_coverage() -> Check {
    use slcsas::rule_language::compile_pattern;
    use slcsas::segmenter::tokenize;
    use slcsas::{EngineConfig, Pattern, RuleSet, Sentence};

    let rs = RuleSet::bundled();
    let lex = Lexicons::bundled();
    let engine = rs.engine(lex.clone(), EngineConfig::default()).unwrap();
    let var = |name: &str| compile_pattern(&Pattern::parse(&format!("::{name}")).unwrap(), &rs.vars).unwrap();
    let classes = |text: &str| -> Vec<String> {
        let s = Sentence {
            doc_id: String::new(),
            index: 0,
            span: (0, text.len()),
            text: text.into(),
        };
        engine
            .classify_sentence(&s, &tokenize(text))
            .into_iter()
            .map(|a| a.class_label)
            .collect()
    };
    let mut c = Check::new();

    let participle = var("اسم_مفعول");
    for cl in CLITICS {
        for stem in LISTED_PARTICIPLE_STEMS {
            let one = format!("{cl}{stem}");
            c.expect(participle.full_match(&[&one]), format!("participle {one}"));
            let two = [format!("{cl}من"), format!("ال{stem}")];
            c.expect(
                participle.full_match(&[&two[0], &two[1]]),
                format!("participle {} {}", two[0], two[1]),
            );
        }
    }
    for w in LISTED_SIIN {
        c.expect(is_future_verb_with_siin(w, &lex), format!("siin verdict {w}"));
        c.expect(classes(w).contains(&"sin".to_string()), format!("sin rule {w}"));
    }
    for w in LISTED_QAD {
        c.expect(
            analyze_token(w, &lex).verdict == Verdict::PresentVerb,
            format!("qad verdict {w}"),
        );
        c.expect(
            classes(&format!("قد {w}")).contains(&"qad".to_string()),
            format!("qad rule {w}"),
        );
    }
    let past = var("فعل_ماضي");
    for cl in CLITICS {
        for stem in LISTED_PAST_STEMS {
            for t in ["", "ت"] {
                let w = format!("{cl}{stem}{t}");
                c.expect(past.full_match(&[&w]), format!("past pattern {w}"));
                c.expect(
                    analyze_token(&w, &lex).verdict == Verdict::PastVerb,
                    format!("past verdict {w}"),
                );
            }
        }
    }
    let present = var("فعل_مضارع");
    for cl in CLITICS {
        for p in LISTED_PRESENT_PREFIXES {
            for stem in LISTED_PRESENT_STEMS {
                let w = format!("{cl}{p}{stem}");
                c.expect(present.full_match(&[&w]), format!("present pattern {w}"));
            }
        }
    }
    c
}
