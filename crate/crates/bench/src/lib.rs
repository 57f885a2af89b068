//! Synthetic corpus generators shared by the benchmarks.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use brevity_core::{Lexicon, Metadata, TypeRecord, Unit};

/// A lexicon with Zipf-like frequencies and mildly length-anticorrelated
/// types, the shape real corpora take.
pub fn synthetic_lexicon(types: usize, seed: u64) -> Lexicon {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records: Vec<TypeRecord> = (0..types)
        .map(|rank| {
            let frequency = (types as f64 / (rank as f64 + 1.0)).ceil() as u64;
            let length = 2.0 + (rank as f64).ln().max(0.0) + rng.random_range(0.0..3.0);
            TypeRecord::new(format!("w{rank:07}"), frequency.max(1), length)
        })
        .collect();
    Lexicon::from_records(records, Unit::Mapped, Metadata::named("synthetic")).unwrap()
}

/// A raw token stream in frequency order, for end-to-end pipeline runs.
pub fn synthetic_tokens(tokens: usize, types: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphabet: Vec<char> = ('a'..='z').collect();
    let vocabulary: Vec<String> = (0..types)
        .map(|rank| {
            let length = 2 + rank % 9;
            (0..length)
                .map(|k| alphabet[(rank + 3 * k) % 26])
                .collect::<String>()
        })
        .collect();
    (0..tokens)
        .map(|_| {
            // approximate Zipf rank draw
            let u: f64 = rng.random_range(0.0..1.0);
            let rank = ((types as f64).powf(u) - 1.0) as usize;
            vocabulary[rank.min(types - 1)].clone()
        })
        .collect()
}

/// Log-frequency values shaped like a character inventory with a small
/// contaminated tail.
pub fn synthetic_log_frequencies(characters: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..characters)
        .map(|i| {
            if i % 17 == 0 {
                rng.random_range(0.0..1.5)
            } else {
                rng.random_range(5.0..12.0)
            }
        })
        .collect()
}
