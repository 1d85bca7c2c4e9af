use std::collections::HashMap;

/// Longest word the segmenter will consider as a single dictionary entry.
pub const MAX_WORD_LEN: usize = 24;

/// Rank (1-based) of the English word whose count is given to gazetteer
/// words missing from the frequency list.
pub const GAZETTEER_WORD_RANK: usize = 10_000;

/// Unigram probabilities used to split hashtag bodies into words.
#[derive(Debug, Clone)]
pub struct SegmenterDictionary {
    counts: HashMap<String, f64>,
    total_mass: f64,
}

impl SegmenterDictionary {
    /// Builds the dictionary from English `(word, count)` pairs, adding every
    /// gazetteer word that the list lacks with the count of the
    /// [`GAZETTEER_WORD_RANK`]-th most frequent English word.
    pub fn new<I, G, S>(english: I, gazetteer_words: G) -> Self
    where
        I: IntoIterator<Item = (String, u64)>,
        G: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut counts: HashMap<String, f64> = HashMap::new();
        for (word, count) in english {
            if count > 0 {
                *counts.entry(word.to_lowercase()).or_insert(0.0) += count as f64;
            }
        }
        let mut sorted: Vec<f64> = counts.values().copied().collect();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let fill = sorted
            .get(GAZETTEER_WORD_RANK - 1)
            .or(sorted.last())
            .copied()
            .unwrap_or(1.0);
        for word in gazetteer_words {
            let word = word.as_ref();
            // Only single alphanumeric words are useful segmentation targets.
            if !word.is_empty() && word.chars().all(char::is_alphanumeric) {
                counts.entry(word.to_lowercase()).or_insert(fill);
            }
        }
        let total_mass = counts.values().sum::<f64>().max(1.0);
        Self { counts, total_mass }
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn probability(&self, word: &str) -> Option<f64> {
        self.counts.get(word).map(|c| c / self.total_mass)
    }

    /// log10 score of a word; unknown words are penalized by length:
    /// `10 / (total_mass * 10^len)`.
    pub fn log_score(&self, word: &str) -> f64 {
        match self.counts.get(word) {
            Some(c) => (c / self.total_mass).log10(),
            None => 1.0 - self.total_mass.log10() - word.chars().count() as f64,
        }
    }
}

/// Splits a hashtag into words maximizing the product of unigram
/// probabilities. The leading `#` is stripped and the body lowercased;
/// concatenating the output reproduces the lowercased body.
pub fn segment_hashtag(tag: &str, dict: &SegmenterDictionary) -> Vec<String> {
    let body = tag.strip_prefix('#').unwrap_or(tag).to_lowercase();
    segment(&body, dict)
}

/// Viterbi segmentation of `text`. Ties go to the split with fewer words.
pub fn segment(text: &str, dict: &SegmenterDictionary) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    if n == 0 {
        return Vec::new();
    }
    // best[i] = (score, word count, start of last word) for chars[..i]
    let mut best: Vec<(f64, usize, usize)> = vec![(f64::NEG_INFINITY, 0, 0); n + 1];
    best[0] = (0.0, 0, 0);
    for end in 1..=n {
        for start in end.saturating_sub(MAX_WORD_LEN)..end {
            let (prev, words, _) = best[start];
            if prev == f64::NEG_INFINITY {
                continue;
            }
            let word: String = chars[start..end].iter().collect();
            let score = prev + dict.log_score(&word);
            let (cur, cur_words, _) = best[end];
            if score > cur || (score == cur && words + 1 < cur_words) {
                best[end] = (score, words + 1, start);
            }
        }
    }
    let mut out = Vec::with_capacity(best[n].1);
    let mut end = n;
    while end > 0 {
        let start = best[end].2;
        out.push(chars[start..end].iter().collect());
        end = start;
    }
    out.reverse();
    out
}
