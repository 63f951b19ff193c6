//! Synthetic headline corpora for benchmarking.

use newsmine_core::{Corpus, Document};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: &[&str] = &[
    "man",
    "woman",
    "police",
    "arrest",
    "arrested",
    "bank",
    "robbery",
    "child",
    "abuse",
    "sex",
    "offense",
    "sentenced",
    "assault",
    "suspect",
    "fraud",
    "charged",
    "federal",
    "jury",
    "murder",
    "shooting",
    "drug",
    "trafficking",
    "theft",
    "vehicle",
    "officer",
    "court",
    "prison",
    "guilty",
    "pleads",
    "investigation",
    "downtown",
    "school",
    "teen",
    "weapon",
    "deadly",
    "convicted",
    "indicted",
    "victim",
    "crash",
    "fatal",
];

/// `n` headlines of 4 to 9 words drawn with a skewed distribution, so a few
/// terms are common and most are rare. Same `seed`, same corpus.
pub fn synthetic_corpus(n: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let docs = (0..n)
        .map(|i| {
            let len = rng.gen_range(4..=9);
            let words: Vec<&str> = (0..len)
                .map(|_| {
                    let r: f64 = rng.gen();
                    WORDS[((r * r) * WORDS.len() as f64) as usize]
                })
                .collect();
            let mut words = words;
            words.shuffle(&mut rng);
            // a numbered token keeps the vocabulary growing with n
            let headline = format!("{} case{}", words.join(" "), rng.gen_range(0..n.max(1)));
            Document::new(format!("b{i}"), &headline).expect("non-empty headline")
        })
        .collect();
    Corpus::new("synthetic", docs).expect("unique ids")
}
