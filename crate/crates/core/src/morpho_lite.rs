//! Lightweight verb recognizer used to confirm قد- and س-based candidates.
//!
//! Lexicon lookups come first; words that are not listed fall back to an
//! imperfective-prefix heuristic. Names that happen to look like a
//! س-prefixed verb are kept out by a proper-noun stoplist.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::segmenter::shadow;

pub const PRESENT_VERBS_FILE: &str = "present_verbs.txt";
pub const PAST_VERBS_FILE: &str = "past_verbs.txt";
pub const PROPER_NOUNS_FILE: &str = "proper_nouns.txt";
pub const QAD_EXCLUSIONS_FILE: &str = "qad_exclusions.txt";

const BUNDLED_PRESENT: &str = include_str!("../data/lexicon/present_verbs.txt");
const BUNDLED_PAST: &str = include_str!("../data/lexicon/past_verbs.txt");
const BUNDLED_PROPER: &str = include_str!("../data/lexicon/proper_nouns.txt");
const BUNDLED_QAD_EXCLUSIONS: &str = include_str!("../data/lexicon/qad_exclusions.txt");

const IMPERFECTIVE_PREFIXES: [char; 4] = ['ي', 'ت', 'ن', 'أ'];
const CONJUNCTIONS: [char; 2] = ['و', 'ف'];
const NOUN_SUFFIXES: [&str; 3] = ["ة", "ات", "يا"];

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("{stem} is listed both as a present verb and as a proper noun")]
    Overlap { stem: String },
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    PresentVerb,
    PastVerb,
    ProperNoun,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphVerdict {
    pub token: String,
    pub verdict: Verdict,
    pub stripped_clitics: String,
    pub stem: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicons {
    pub present_verbs: BTreeSet<String>,
    pub past_verbs: BTreeSet<String>,
    pub proper_nouns: BTreeSet<String>,
    /// Verbs that do not make a future reading after قد.
    pub qad_exclusions: BTreeSet<String>,
    /// Letters required after the imperfective prefix for the fallback.
    pub min_stem_after_prefix: usize,
    /// Fallback rejects stems with nominal endings (ة, ات, adverbial يا).
    pub noun_suffix_guard: bool,
}

fn parse_list(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(shadow)
        .collect()
}

impl Default for Lexicons {
    fn default() -> Self {
        Self::bundled()
    }
}

impl Lexicons {
    pub fn empty() -> Self {
        Self {
            present_verbs: BTreeSet::new(),
            past_verbs: BTreeSet::new(),
            proper_nouns: BTreeSet::new(),
            qad_exclusions: BTreeSet::new(),
            min_stem_after_prefix: 3,
            noun_suffix_guard: true,
        }
    }

    pub fn bundled() -> Self {
        Self::from_texts(
            BUNDLED_PRESENT,
            BUNDLED_PAST,
            BUNDLED_PROPER,
            BUNDLED_QAD_EXCLUSIONS,
        )
        .expect("bundled lexicons are disjoint")
    }

    pub fn from_texts(
        present: &str,
        past: &str,
        proper: &str,
        qad_exclusions: &str,
    ) -> Result<Self, LexiconError> {
        let lex = Self {
            present_verbs: parse_list(present),
            past_verbs: parse_list(past),
            proper_nouns: parse_list(proper),
            qad_exclusions: parse_list(qad_exclusions),
            ..Self::empty()
        };
        lex.validate()?;
        Ok(lex)
    }

    /// Bundled lexicons extended with whichever list files exist in `dir`.
    pub fn extended_from_dir(dir: &Path) -> Result<Self, LexiconError> {
        let mut lex = Self::bundled();
        let lists: [(&str, &mut BTreeSet<String>); 4] = [
            (PRESENT_VERBS_FILE, &mut lex.present_verbs),
            (PAST_VERBS_FILE, &mut lex.past_verbs),
            (PROPER_NOUNS_FILE, &mut lex.proper_nouns),
            (QAD_EXCLUSIONS_FILE, &mut lex.qad_exclusions),
        ];
        for (name, set) in lists {
            let path = dir.join(name);
            match fs::read_to_string(&path) {
                Ok(text) => set.extend(parse_list(&text)),
                Err(e) if e.kind() == io::ErrorKind::NotFound => {}
                Err(source) => return Err(LexiconError::Io { path, source }),
            }
        }
        lex.validate()?;
        Ok(lex)
    }

    fn validate(&self) -> Result<(), LexiconError> {
        match self.present_verbs.intersection(&self.proper_nouns).next() {
            Some(stem) => Err(LexiconError::Overlap { stem: stem.clone() }),
            None => Ok(()),
        }
    }

    fn is_past(&self, stem: &str) -> bool {
        self.past_verbs.contains(stem)
            || stem
                .strip_suffix('ت')
                .is_some_and(|s| self.past_verbs.contains(s))
    }

    fn is_listed(&self, word: &str) -> bool {
        self.present_verbs.contains(word) || self.proper_nouns.contains(word) || self.is_past(word)
    }

    /// Verdict for a stem that has already lost its clitics.
    fn classify_stem(&self, stem: &str) -> Verdict {
        if self.proper_nouns.contains(stem) {
            Verdict::ProperNoun
        } else if self.is_past(stem) {
            Verdict::PastVerb
        } else if self.present_verbs.contains(stem) || self.looks_imperfective(stem) {
            Verdict::PresentVerb
        } else {
            Verdict::Other
        }
    }

    fn looks_imperfective(&self, stem: &str) -> bool {
        let mut chars = stem.chars();
        let Some(first) = chars.next() else {
            return false;
        };
        if !IMPERFECTIVE_PREFIXES.contains(&first) {
            return false;
        }
        if chars.as_str().chars().count() < self.min_stem_after_prefix {
            return false;
        }
        !(self.noun_suffix_guard && NOUN_SUFFIXES.iter().any(|s| stem.ends_with(s)))
    }
}

/// Removes at most one leading و or ف, never leaving an empty remainder.
pub fn strip_clitics(token: &str) -> (&str, &str) {
    match token.chars().next() {
        Some(c) if CONJUNCTIONS.contains(&c) && token.len() > c.len_utf8() => token.split_at(c.len_utf8()),
        _ => ("", token),
    }
}

pub fn analyze_token(token: &str, lex: &Lexicons) -> MorphVerdict {
    let sh = shadow(token);
    let (clitics, stem) = if lex.is_listed(&sh) {
        ("", sh.as_str())
    } else {
        strip_clitics(&sh)
    };
    let verdict = if lex.proper_nouns.contains(&sh) {
        Verdict::ProperNoun
    } else {
        lex.classify_stem(stem)
    };
    MorphVerdict {
        token: token.to_string(),
        verdict,
        stripped_clitics: clitics.to_string(),
        stem: stem.to_string(),
    }
}

pub fn is_future_verb_with_siin(token: &str, lex: &Lexicons) -> bool {
    let sh = shadow(token);
    if lex.proper_nouns.contains(&sh) {
        return false;
    }
    let (_, stem) = strip_clitics(&sh);
    if lex.proper_nouns.contains(stem) {
        return false;
    }
    match stem.strip_prefix('س') {
        Some(rest) if !rest.is_empty() => lex.classify_stem(rest) == Verdict::PresentVerb,
        _ => false,
    }
}
