//! Synthetic corpora for the benchmarks.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slcsas::Document;

const FILLER: &[&str] = &[
    "الاقتصاد",
    "اللبناني",
    "المصرف",
    "المركزي",
    "الحكومة",
    "الموازنة",
    "النمو",
    "العجز",
    "الدولار",
    "الاسعار",
    "الوزير",
    "التجارة",
    "في",
    "على",
    "من",
    "الى",
    "العام",
    "المقبل",
];

const MARKERS: &[&str] = &[
    "سيرتفع",
    "ستنخفض",
    "سوف",
    "لن",
    "قد يتراجع",
    "من المتوقع",
    "يتوقع",
    "توقع",
    "ولن",
    "سويسرا",
];

/// One sentence of 8 to 24 words, about a third carrying a future marker.
pub fn sentence(rng: &mut impl Rng) -> String {
    let n = rng.random_range(8..=24);
    let mut words: Vec<&str> = (0..n).map(|_| *FILLER.choose(rng).expect("filler")).collect();
    if rng.random_bool(0.35) {
        let at = rng.random_range(0..words.len());
        words.insert(at, MARKERS.choose(rng).expect("markers"));
    }
    words.join(" ")
}

/// `docs` documents of `sentences` sentences each, fixed by `seed`.
pub fn corpus(seed: u64, docs: usize, sentences: usize) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..docs)
        .map(|i| {
            let body: Vec<String> = (0..sentences).map(|_| sentence(&mut rng)).collect();
            Document::new(
                &format!("http://bench.local/{i}"),
                "وثيقة",
                &(body.join(". ") + "."),
            )
            .expect("generated documents are valid")
        })
        .collect()
}
