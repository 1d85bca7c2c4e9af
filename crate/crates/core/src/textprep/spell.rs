use std::collections::{HashMap, HashSet};

pub const DEFAULT_MAX_EDIT_DISTANCE: usize = 2;

/// Symmetric-delete spelling corrector.
///
/// Every vocabulary word is indexed under all strings reachable from it by up
/// to `max_distance` character deletions. A query generates its own deletes
/// and only words sharing a delete string are verified with a full
/// Damerau-Levenshtein distance.
#[derive(Debug, Clone)]
pub struct SpellChecker {
    max_distance: usize,
    words: Vec<(String, u64)>,
    index: HashMap<String, u64>,
    deletes: HashMap<String, Vec<u32>>,
}

impl SpellChecker {
    pub fn new<I>(vocabulary: I, max_distance: usize) -> Self
    where
        I: IntoIterator<Item = (String, u64)>,
    {
        let mut index: HashMap<String, u64> = HashMap::new();
        for (word, count) in vocabulary {
            let slot = index.entry(word.to_lowercase()).or_insert(0);
            *slot = (*slot).max(count.max(1));
        }
        let mut words: Vec<(String, u64)> = index.iter().map(|(w, c)| (w.clone(), *c)).collect();
        words.sort();
        let mut deletes: HashMap<String, Vec<u32>> = HashMap::new();
        for (id, (word, _)) in words.iter().enumerate() {
            for variant in deletes_of(word, max_distance) {
                deletes.entry(variant).or_default().push(id as u32);
            }
        }
        Self {
            max_distance,
            words,
            index,
            deletes,
        }
    }

    pub fn max_distance(&self) -> usize {
        self.max_distance
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    /// Best in-vocabulary replacement for `token`: smallest edit distance,
    /// then highest frequency, then lexicographic order. In-vocabulary tokens
    /// and tokens without a candidate come back unchanged.
    pub fn correct(&self, token: &str) -> String {
        if self.contains(token) {
            return token.to_string();
        }
        let mut seen: HashSet<u32> = HashSet::new();
        let mut best: Option<(usize, u64, &str)> = None;
        for variant in deletes_of(token, self.max_distance) {
            let Some(ids) = self.deletes.get(&variant) else {
                continue;
            };
            for &id in ids {
                if !seen.insert(id) {
                    continue;
                }
                let (word, count) = &self.words[id as usize];
                let distance = strsim::damerau_levenshtein(token, word);
                if distance > self.max_distance {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((d, c, w)) => {
                        (distance, std::cmp::Reverse(*count), word.as_str()) < (d, std::cmp::Reverse(c), w)
                    }
                };
                if better {
                    best = Some((distance, *count, word));
                }
            }
        }
        best.map_or_else(|| token.to_string(), |(_, _, w)| w.to_string())
    }
}

/// All strings obtained from `word` by deleting up to `max` characters,
/// including `word` itself.
fn deletes_of(word: &str, max: usize) -> HashSet<String> {
    let mut out: HashSet<String> = HashSet::new();
    out.insert(word.to_string());
    let mut frontier = vec![word.chars().collect::<Vec<char>>()];
    for _ in 0..max {
        let mut next = Vec::new();
        for chars in &frontier {
            for skip in 0..chars.len() {
                let shorter: Vec<char> = chars
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, c)| *c)
                    .collect();
                if out.insert(shorter.iter().collect()) {
                    next.push(shorter);
                }
            }
        }
        frontier = next;
    }
    out
}

/// Corrects `token` against `checker` when it is out of vocabulary.
pub fn correct_spelling(token: &str, checker: &SpellChecker) -> String {
    checker.correct(token)
}
