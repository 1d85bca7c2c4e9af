//! Deterministic synthetic gazetteers and tweet streams for benchmarking.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::gazetteer::{GazetteerEntry, Source};

const SYLLABLES: &[&str] = &[
    "ka", "ra", "mbe", "lo", "sa", "ti", "van", "dor", "pur", "nag", "ar", "el", "min", "ton", "ber", "ia", "hal",
    "wood", "ster", "ley", "mar", "gan", "pa", "thy", "ve", "lu", "chen", "nai", "ad", "yar", "bro", "ok",
];

const CATEGORIES: &[&str] = &[
    "road", "street", "avenue", "school", "park", "bridge", "colony", "nagar", "church", "hospital", "lake", "market",
];

const PREFIXES: &[&str] = &[
    "new", "old", "north", "south", "east", "west", "little", "upper", "lower", "saint",
];

const FILLER: &[&str] = &[
    "water", "level", "is", "rising", "near", "the", "flood", "stuck", "in", "help", "needed", "at", "please",
    "rescue", "people", "on", "roof", "power", "out", "since", "morning", "boats", "coming", "to", "stay", "safe",
    "everyone", "shelter", "open", "food", "and", "supplies", "lol", "omg", "2", "ft", "now",
];

/// A pronounceable made-up word of two or three syllables.
pub fn word(rng: &mut StdRng) -> String {
    let n = rng.gen_range(2..=3);
    (0..n).map(|_| *SYLLABLES.choose(rng).expect("non-empty")).collect()
}

/// A made-up place name of one to five tokens.
pub fn place_name(rng: &mut StdRng) -> String {
    let mut tokens = Vec::new();
    if rng.gen_bool(0.2) {
        tokens.push(PREFIXES.choose(rng).expect("non-empty").to_string());
    }
    for _ in 0..rng.gen_range(1..=2) {
        tokens.push(word(rng));
    }
    if rng.gen_bool(0.6) {
        tokens.push(CATEGORIES.choose(rng).expect("non-empty").to_string());
    }
    capitalize_words(&tokens.join(" "))
}

fn capitalize_words(s: &str) -> String {
    s.split(' ')
        .map(|w| {
            let mut c = w.chars();
            c.next()
                .map_or_else(String::new, |f| f.to_uppercase().chain(c).collect())
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// `n` generic entries with random names and coordinates near Houston.
pub fn gazetteer_entries(n: usize, seed: u64) -> Vec<GazetteerEntry> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n)
        .map(|i| GazetteerEntry {
            id: format!("s{i}"),
            canonical_name: place_name(&mut rng),
            latitude: Some(29.76 + rng.gen_range(-0.5..0.5)),
            longitude: Some(-95.37 + rng.gen_range(-0.5..0.5)),
            source: Source::Generic,
            extra: Default::default(),
        })
        .collect()
}

/// `n` tweets mixing filler words with names drawn from `names`; some names
/// are hashtagged, some abbreviated, some lowercased.
pub fn tweets(names: &[String], n: usize, seed: u64) -> Vec<String> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut parts: Vec<String> = Vec::new();
            for _ in 0..rng.gen_range(4..=12) {
                parts.push(FILLER.choose(&mut rng).expect("non-empty").to_string());
            }
            for _ in 0..rng.gen_range(0..=2) {
                let Some(name) = names.choose(&mut rng) else { break };
                let mention = match rng.gen_range(0..4) {
                    0 => format!("#{}", name.replace(' ', "")),
                    1 => name.replace("Road", "Rd").replace("Street", "St"),
                    2 => name.to_lowercase(),
                    _ => name.clone(),
                };
                let at = rng.gen_range(0..=parts.len());
                parts.insert(at, mention);
            }
            if rng.gen_bool(0.2) {
                parts.push("https://t.co/abc123".into());
            }
            if rng.gen_bool(0.2) {
                parts.insert(0, "RT @someone:".into());
            }
            parts.join(" ")
        })
        .collect()
}

/// JSON-lines input for the stream pipeline.
pub fn jsonl(tweets: &[String]) -> String {
    tweets
        .iter()
        .enumerate()
        .map(|(i, t)| serde_json::json!({"id": format!("t{i}"), "text": t}).to_string() + "\n")
        .collect()
}
