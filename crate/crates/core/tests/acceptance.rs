//! Acceptance checks, one line per criterion.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use slcsas::corpus_ingest::{extract_main_article, parse_corpus_file, DEFAULT_MIN_RUN_CHARS};
use slcsas::eval::{self, score_triples, Triple};
use slcsas::report::{render_html, ReportOptions};
use slcsas::resources::{BUNDLED_RULES, BUNDLED_VARIABLES, MINI_GOLD_CORPUS, MINI_GOLD_TSV};
use slcsas::segmenter::{segment, tokenize};
use slcsas::{Document, Engine, EngineConfig, Lexicons, RawPage, RuleSet, Sentence};

type Outcome = Result<String, String>;

fn engine() -> Engine {
    RuleSet::bundled()
        .engine(Lexicons::bundled(), EngineConfig::default())
        .unwrap()
}

fn classes(e: &Engine, text: &str) -> Vec<String> {
    let s = Sentence {
        doc_id: String::new(),
        index: 0,
        span: (0, text.len()),
        text: text.into(),
    };
    e.classify_sentence(&s, &tokenize(text))
        .into_iter()
        .map(|a| a.class_label)
        .collect()
}

fn worked_examples() -> Outcome {
    let start = Instant::now();
    let e = engine();
    let doc = parse_corpus_file(MINI_GOLD_CORPUS).map_err(|x| x.to_string())?;
    let a = e.analyze_document(&doc);
    let stated = [
        "qad",
        "sin",
        "lan",
        "sawfa",
        "participle",
        "participle",
        "past_verb",
        "present_verb",
    ];
    if a.sentences.len() != stated.len() {
        return Err(format!("{} sentences", a.sentences.len()));
    }
    for (i, class) in stated.iter().enumerate() {
        if !a
            .annotations
            .iter()
            .any(|x| x.sentence_index == i && x.class_label == *class)
        {
            return Err(format!("sentence {i} lacks {class}"));
        }
    }
    if !a
        .annotations
        .iter()
        .any(|x| x.sentence_index == 3 && x.class_label == "sin")
    {
        return Err("the sawfa example lacks its sin annotation".into());
    }
    let gold = eval::load_gold(MINI_GOLD_TSV).map_err(|x| x.to_string())?;
    let r = eval::score(&a.annotations, &gold);
    let elapsed = start.elapsed();
    if r.overall.recall != Some(100.0) {
        return Err(format!("recall {:?}", r.overall.recall));
    }
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!(
        "8/8 stated classes, recall 100.00 over {} gold triples, {elapsed:.0?}",
        gold.len()
    ))
}

fn metric_arithmetic() -> Outcome {
    let gold_counts = [
        ("qad", 64, 4),
        ("sin", 450, 13),
        ("lan", 93, 0),
        ("sawfa", 26, 2),
        ("participle", 47, 0),
        ("past_verb", 32, 0),
        ("present_verb", 31, 0),
    ];
    let mut gold: BTreeSet<Triple> = BTreeSet::new();
    let mut pred: BTreeSet<Triple> = BTreeSet::new();
    for (class, n, fp) in gold_counts {
        for i in 0..n {
            let t = (format!("doc-{class}"), i, class.to_string());
            gold.insert(t.clone());
            pred.insert(t);
        }
        for i in 0..fp {
            pred.insert((format!("fp-{class}"), i, class.to_string()));
        }
    }
    if pred.len() != 762 || gold.len() != 743 {
        return Err(format!("built {} / {}", pred.len(), gold.len()));
    }
    let r = score_triples(&pred, &gold);
    let expected = [
        ("qad", "94.11"),
        ("sin", "97.19"),
        ("lan", "100.00"),
        ("sawfa", "92.85"),
        ("participle", "100.00"),
        ("past_verb", "100.00"),
        ("present_verb", "100.00"),
    ];
    let fmt = |p: Option<f64>| p.map_or("n/a".to_string(), |v| format!("{v:.2}"));
    let mut got = Vec::new();
    for (class, want) in expected {
        let c = r.class(class).ok_or(format!("no {class}"))?;
        let (p, rec) = (fmt(c.precision), fmt(c.recall));
        if p != want || rec != "100.00" {
            return Err(format!("{class}: {p}/{rec}, want {want}/100.00"));
        }
        got.push(format!("{class} {p}"));
    }
    let (p, rec) = (fmt(r.overall.precision), fmt(r.overall.recall));
    if p != "97.50" || rec != "100.00" {
        return Err(format!("overall {p}/{rec}"));
    }
    Ok(format!("{}, overall {p}/{rec}", got.join(", ")))
}

fn known_limitations() -> Outcome {
    let e = engine();
    for s in ["قد يعود ذلك الى تراجع الطلب", "وقال ان الوضع قد يكون صعبا"]
    {
        if !classes(&e, s).contains(&"qad".to_string()) {
            return Err(format!("not flagged: {s}"));
        }
    }
    for s in [
        "زار سيمون المصرف امس",
        "وقعت سويسرا الاتفاق",
        "اجتماع في سويسرا مع سيمون",
    ] {
        if classes(&e, s).contains(&"sin".to_string()) {
            return Err(format!("flagged: {s}"));
        }
    }
    Ok("قد يعود / قد يكون flagged; سيمون / سويسرا not flagged".into())
}

fn oracle_equivalence() -> Outcome {
    let e = engine();
    let rules = common::parse_rules(BUNDLED_RULES, BUNDLED_VARIABLES);
    let lex = Lexicons::bundled();
    let mut rng = ChaCha8Rng::seed_from_u64(2018);
    let mut discrepancies = Vec::new();
    let mut annotations = 0;
    for _ in 0..1000 {
        let text = common::generate_sentence(&mut rng);
        let s = Sentence {
            doc_id: String::new(),
            index: 0,
            span: (0, text.len()),
            text: text.clone(),
        };
        let got: BTreeSet<_> = e
            .classify_sentence(&s, &tokenize(&text))
            .into_iter()
            .map(|a| (a.class_label, a.positive_marker_spans))
            .collect();
        annotations += got.len();
        if got != common::oracle(&rules, &lex, &text) {
            discrepancies.push(text);
        }
    }
    if discrepancies.is_empty() {
        Ok(format!(
            "1000 sentences, {annotations} annotations, 0 discrepancies"
        ))
    } else {
        Err(format!(
            "{} discrepancies, first: {}",
            discrepancies.len(),
            discrepancies[0]
        ))
    }
}

fn segmentation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    for n in 0..500 {
        let mut body = common::generate_text(&mut rng);
        if n % 2 == 0 {
            body.push_str(" النسبة 1.5 في المائة ");
        }
        let sentences = segment(&body);
        let mut rebuilt = String::new();
        let mut at = 0;
        for s in &sentences {
            let gap = &body[at..s.span.0];
            if !gap.chars().all(char::is_whitespace) || body[s.span.0..s.span.1] != s.text {
                return Err(format!("reconstruction failed on {body:?}"));
            }
            rebuilt.push_str(gap);
            rebuilt.push_str(&s.text);
            at = s.span.1;
            if common::has_internal_trigger(&s.text) {
                return Err(format!("internal trigger in {:?}", s.text));
            }
        }
        rebuilt.push_str(&body[at..]);
        if rebuilt != body {
            return Err(format!("reconstruction failed on {body:?}"));
        }
        if body.contains("1.5 في المائة") && !sentences.iter().any(|s| s.text.contains("1.5 في المائة"))
        {
            return Err(format!("decimal split in {body:?}"));
        }
    }
    Ok("500 texts: reconstruction, no internal trigger, decimals intact".into())
}

fn ingestion_threshold() -> Outcome {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/");
    let page = RawPage::from_file(format!("{dir}threshold.html").as_ref()).map_err(|e| e.to_string())?;
    let (_, body) = extract_main_article(&page, DEFAULT_MIN_RUN_CHARS).map_err(|e| e.to_string())?;
    let want = std::fs::read_to_string(format!("{dir}threshold.body.txt")).map_err(|e| e.to_string())?;
    let lens: Vec<usize> = body.lines().map(|l| l.chars().count()).collect();
    if body + "\n" == want && lens == [130, 131] {
        Ok("runs of 129/130/131 chars -> body holds exactly the 130 and 131 runs".into())
    } else {
        Err(format!("run lengths {lens:?}"))
    }
}

fn lexicon_coverage() -> Outcome {
    let c = common::listed_value_coverage();
    if c.failures.is_empty() {
        Ok(format!("{}/{} listed-value checks", c.total, c.total))
    } else {
        Err(format!(
            "{} of {} failed: {:?}",
            c.failures.len(),
            c.total,
            c.failures
        ))
    }
}

fn throughput() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let docs: Vec<Document> = (0..200)
        .map(|i| {
            let body: Vec<String> = (0..25).map(|_| common::generate_sentence(&mut rng)).collect();
            Document::new(&format!("http://bench/{i}"), "وثيقة", &body.join(". ")).unwrap()
        })
        .collect();
    let opts = ReportOptions {
        generated_at: "fixed".into(),
        show_all_negative_fields: false,
    };
    let start = Instant::now();
    let e = engine();
    let serial = e.analyze_corpus(&docs, 1);
    let mut bytes = 0;
    for (d, a) in docs.iter().zip(&serial) {
        let d = if d.id == a.doc_id {
            d
        } else {
            docs.iter().find(|x| x.id == a.doc_id).unwrap()
        };
        bytes += render_html(d, a, &opts).map_err(|x| x.to_string())?.len();
    }
    let elapsed = start.elapsed();
    let sentences: usize = serial.iter().map(|a| a.sentences.len()).sum();
    let parallel = e.analyze_corpus(&docs, 4);
    let set = |v: &[slcsas::DocumentAnalysis]| -> BTreeSet<slcsas::Annotation> {
        v.iter().flat_map(|a| a.annotations.iter().cloned()).collect()
    };
    if set(&serial) != set(&parallel) {
        return Err("parallel annotations differ".into());
    }
    if elapsed >= Duration::from_secs(10) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!(
        "200 docs, {sentences} sentences, {} KiB of HTML in {elapsed:.2?} single-threaded; parallel identical",
        bytes / 1024
    ))
}

fn main() -> ExitCode {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check); 8] = [
        ("worked-example regression", worked_examples),
        ("metric arithmetic", metric_arithmetic),
        ("known-limitation fidelity", known_limitations),
        ("oracle equivalence", oracle_equivalence),
        ("segmentation properties", segmentation),
        ("ingestion threshold", ingestion_threshold),
        ("morph lexicon coverage", lexicon_coverage),
        ("throughput sanity", throughput),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} ({name}): PASS - {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL - {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
