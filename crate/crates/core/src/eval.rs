//! Sentence-level scoring against gold annotations.
//!
//! Predictions and gold are compared as `(doc, sentence, class)` triples, so
//! a rule that fires twice in one sentence counts once. Percentages are
//! truncated to two decimals: 64/68 prints as 94.11 and 26/28 as 92.85.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::Annotation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FutureClass {
    Qad,
    Sin,
    Lan,
    Sawfa,
    Participle,
    PastVerb,
    PresentVerb,
}

impl FutureClass {
    /// Distribution-table order.
    pub const ALL: [FutureClass; 7] = [
        Self::Qad,
        Self::Sin,
        Self::Lan,
        Self::Sawfa,
        Self::Participle,
        Self::PastVerb,
        Self::PresentVerb,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::Qad => "qad",
            Self::Sin => "sin",
            Self::Lan => "lan",
            Self::Sawfa => "sawfa",
            Self::Participle => "participle",
            Self::PastVerb => "past_verb",
            Self::PresentVerb => "present_verb",
        }
    }

    /// The marker the class is named after.
    pub fn marker(self) -> &'static str {
        match self {
            Self::Qad => "قد",
            Self::Sin => "س",
            Self::Lan => "لن",
            Self::Sawfa => "سوف",
            Self::Participle => "اسم مفعول",
            Self::PastVerb => "فعل ماض",
            Self::PresentVerb => "فعل مضارع",
        }
    }
}

impl fmt::Display for FutureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown class label: {0}")]
pub struct UnknownClass(pub String);

impl FromStr for FutureClass {
    type Err = UnknownClass;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| UnknownClass(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GoldAnnotation {
    pub doc_id: String,
    pub sentence_index: usize,
    pub class_label: FutureClass,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GoldError {
    #[error("gold line {line}: expected doc_id<TAB>sentence_index<TAB>class_label")]
    Syntax { line: usize },
    #[error("gold line {line}: unknown class label {label}")]
    UnknownClass { line: usize, label: String },
    #[error("gold line {line}: duplicate row")]
    Duplicate { line: usize },
}

pub fn load_gold(text: &str) -> Result<Vec<GoldAnnotation>, GoldError> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = raw.split('\t').map(str::trim).collect();
        let [doc, idx, label] = cols[..] else {
            return Err(GoldError::Syntax { line });
        };
        let sentence_index = idx.parse().map_err(|_| GoldError::Syntax { line })?;
        let class_label = label.parse().map_err(|_| GoldError::UnknownClass {
            line,
            label: label.to_string(),
        })?;
        if doc.is_empty() {
            return Err(GoldError::Syntax { line });
        }
        let g = GoldAnnotation {
            doc_id: doc.to_string(),
            sentence_index,
            class_label,
        };
        if !seen.insert(g.clone()) {
            return Err(GoldError::Duplicate { line });
        }
        out.push(g);
    }
    Ok(out)
}

pub fn serialize_gold(gold: &[GoldAnnotation]) -> String {
    let mut out = String::from("# doc_id\tsentence_index\tclass_label\n");
    for g in gold {
        let _ = writeln!(out, "{}\t{}\t{}", g.doc_id, g.sentence_index, g.class_label);
    }
    out
}

/// `(doc_id, sentence_index, class_label)`.
pub type Triple = (String, usize, String);

pub fn annotation_triples<'a>(annotations: impl IntoIterator<Item = &'a Annotation>) -> BTreeSet<Triple> {
    annotations
        .into_iter()
        .map(|a| (a.doc_id.clone(), a.sentence_index, a.class_label.clone()))
        .collect()
}

pub fn gold_triples(gold: &[GoldAnnotation]) -> BTreeSet<Triple> {
    gold.iter()
        .map(|g| {
            (
                g.doc_id.clone(),
                g.sentence_index,
                g.class_label.label().to_string(),
            )
        })
        .collect()
}

/// `num/den` as a percentage truncated to two decimals; `None` when `den` is 0.
pub fn percent(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| (num as u128 * 10_000 / den as u128) as f64 / 100.0)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

impl Counts {
    pub fn new(tp: usize, fp: usize, fn_: usize) -> Self {
        Self {
            tp,
            fp,
            fn_,
            precision: percent(tp, tp + fp),
            recall: percent(tp, tp + fn_),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScore {
    pub class_label: String,
    #[serde(flatten)]
    pub counts: Counts,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub sentences: usize,
    pub predicted_future: usize,
    pub gold_future: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// The seven classes in table order, then any other predicted labels.
    pub per_class: Vec<ClassScore>,
    pub overall: Counts,
    pub totals: Totals,
}

impl EvalReport {
    pub fn class(&self, label: &str) -> Option<&Counts> {
        self.per_class
            .iter()
            .find(|c| c.class_label == label)
            .map(|c| &c.counts)
    }

    pub fn with_sentences(mut self, n: usize) -> Self {
        self.totals.sentences = n;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text results table.
    pub fn render_table(&self) -> String {
        let pct = |p: Option<f64>| p.map_or_else(|| "n/a".to_string(), |v| format!("{v:.2}"));
        let mut out = format!(
            "{:<14}{:>6}{:>6}{:>6}{:>11}{:>9}\n",
            "class", "tp", "fp", "fn", "precision", "recall"
        );
        let rows = self
            .per_class
            .iter()
            .map(|c| (c.class_label.as_str(), &c.counts))
            .chain(std::iter::once(("overall", &self.overall)));
        for (label, c) in rows {
            let _ = writeln!(
                out,
                "{:<14}{:>6}{:>6}{:>6}{:>11}{:>9}",
                label,
                c.tp,
                c.fp,
                c.fn_,
                pct(c.precision),
                pct(c.recall)
            );
        }
        let t = &self.totals;
        let _ = writeln!(
            out,
            "sentences={} predicted_future={} gold_future={}",
            t.sentences, t.predicted_future, t.gold_future
        );
        out
    }
}

fn sentences_of(triples: &BTreeSet<Triple>) -> usize {
    triples
        .iter()
        .map(|(d, s, _)| (d, s))
        .collect::<BTreeSet<_>>()
        .len()
}

pub fn score_triples(pred: &BTreeSet<Triple>, gold: &BTreeSet<Triple>) -> EvalReport {
    let mut labels: Vec<String> = FutureClass::ALL.iter().map(|c| c.label().to_string()).collect();
    let extra: BTreeSet<&String> = pred
        .iter()
        .chain(gold)
        .map(|t| &t.2)
        .filter(|l| !labels.contains(l))
        .collect();
    labels.extend(extra.into_iter().cloned());

    let mut per: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();
    for t in pred {
        let e = per.entry(&t.2).or_default();
        if gold.contains(t) {
            e.0 += 1;
        } else {
            e.1 += 1;
        }
    }
    for t in gold.difference(pred) {
        per.entry(&t.2).or_default().2 += 1;
    }

    let per_class: Vec<ClassScore> = labels
        .iter()
        .map(|l| {
            let (tp, fp, fn_) = per.get(l.as_str()).copied().unwrap_or_default();
            ClassScore {
                class_label: l.clone(),
                counts: Counts::new(tp, fp, fn_),
            }
        })
        .collect();
    let (tp, fp, fn_) = per_class.iter().fold((0, 0, 0), |acc, c| {
        (acc.0 + c.counts.tp, acc.1 + c.counts.fp, acc.2 + c.counts.fn_)
    });
    EvalReport {
        per_class,
        overall: Counts::new(tp, fp, fn_),
        totals: Totals {
            sentences: 0,
            predicted_future: sentences_of(pred),
            gold_future: sentences_of(gold),
        },
    }
}

/// Scores annotations against gold; set the sentence total with [`EvalReport::with_sentences`].
pub fn score(pred: &[Annotation], gold: &[GoldAnnotation]) -> EvalReport {
    score_triples(&annotation_triples(pred), &gold_triples(gold))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distribution {
    pub per_class: Vec<(FutureClass, usize)>,
    pub total: usize,
}

impl Distribution {
    pub fn get(&self, c: FutureClass) -> usize {
        self.per_class
            .iter()
            .find(|(k, _)| *k == c)
            .map_or(0, |(_, n)| *n)
    }

    pub fn render_table(&self) -> String {
        let mut out = format!("{:<14}{:<12}{:>10}\n", "class", "marker", "sentences");
        for (c, n) in &self.per_class {
            // pad by char count, Arabic markers are multi-byte
            let marker = c.marker();
            let pad = 12usize.saturating_sub(marker.chars().count());
            let _ = writeln!(out, "{:<14}{marker}{}{n:>10}", c.label(), " ".repeat(pad));
        }
        let _ = writeln!(out, "{:<14}{:<12}{:>10}", "total", "", self.total);
        out
    }
}

pub fn distribution(gold: &[GoldAnnotation]) -> Distribution {
    let per_class: Vec<(FutureClass, usize)> = FutureClass::ALL
        .iter()
        .map(|&c| (c, gold.iter().filter(|g| g.class_label == c).count()))
        .collect();
    let total = per_class.iter().map(|(_, n)| n).sum();
    Distribution { per_class, total }
}
