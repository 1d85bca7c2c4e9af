//! Tweet preprocessing: cleaning, tokenization, hashtag segmentation,
//! stop-word splitting and optional spelling correction.

mod clean;
mod segment;
mod spell;
mod tokenize;

use std::collections::{BTreeMap, HashSet};
use std::ops::Range;

pub use clean::{clean_tweet, CleanedText};
pub use segment::{segment, segment_hashtag, SegmenterDictionary, GAZETTEER_WORD_RANK, MAX_WORD_LEN};
pub use spell::{correct_spelling, SpellChecker, DEFAULT_MAX_EDIT_DISTANCE};
pub use tokenize::{name_tokens, tokenize, Token, TokenKind};

/// Words that split a tweet into fragments.
#[derive(Debug, Clone, Default)]
pub struct StopList {
    words: HashSet<String>,
}

impl StopList {
    /// Base stop words minus every word for which `keep` returns true
    /// (the gazetteer unigrams of the region).
    pub fn new<I, S>(base: I, keep: impl Fn(&str) -> bool) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let words = base
            .into_iter()
            .map(|w| w.as_ref().to_lowercase())
            .filter(|w| !keep(w))
            .collect();
        Self { words }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Maximal runs of word tokens that are not stop words.
///
/// Punctuation, hashtag, mention and emoticon tokens are splitters too;
/// hashtags are matched separately through their segmentation.
pub fn split_on_stopwords(tokens: &[Token], stoplist: &StopList) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut run_start: Option<usize> = None;
    for (i, token) in tokens.iter().enumerate() {
        let splitter = token.kind != TokenKind::Word || stoplist.contains(&token.text);
        match (splitter, run_start) {
            (true, Some(s)) => {
                out.push(s..i);
                run_start = None;
            }
            (false, None) => run_start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = run_start {
        out.push(s..tokens.len());
    }
    out
}

/// One token of a fragment, ready for matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentToken {
    /// Case-folded text used for matching (the corrected form when spelling
    /// correction replaced it).
    pub text: String,
    /// Raw character span of the token itself.
    pub start: usize,
    pub end: usize,
}

/// A run of consecutive non-stop-word tokens, either from the tweet body or
/// from the segmentation of one hashtag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub tokens: Vec<FragmentToken>,
    /// Raw span of the whole hashtag when the fragment came from one.
    pub hashtag: Option<(usize, usize)>,
}

/// A raw tweet with everything derived from it before matching.
#[derive(Debug, Clone)]
pub struct TweetDocument {
    pub raw: String,
    pub cleaned: CleanedText,
    /// Tokens of the cleaned text; offsets are raw character offsets.
    pub tokens: Vec<Token>,
    /// Corrected forms, by token index, when spelling correction changed a token.
    pub corrections: BTreeMap<usize, String>,
    pub splits: Vec<Range<usize>>,
    /// Token index of each hashtag → its segmentation.
    pub hashtag_expansions: BTreeMap<usize, Vec<String>>,
    hashtag_splits: BTreeMap<usize, Vec<Fragment>>,
}

/// Immutable preprocessing resources.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    pub stoplist: StopList,
    pub segmenter: SegmenterDictionary,
    pub speller: Option<SpellChecker>,
}

impl Preprocessor {
    pub fn prepare(&self, raw: &str) -> TweetDocument {
        let cleaned = clean_tweet(raw);
        let cleaned_tokens = tokenize(&cleaned.text);
        let tokens: Vec<Token> = cleaned_tokens
            .iter()
            .map(|t| {
                let (start, end) = cleaned.raw_span(t.start, t.end);
                Token {
                    start,
                    end,
                    ..t.clone()
                }
            })
            .collect();

        let mut corrections = BTreeMap::new();
        if let Some(speller) = &self.speller {
            for (i, t) in tokens.iter().enumerate() {
                if t.kind == TokenKind::Word && t.text.chars().all(char::is_alphabetic) {
                    let fixed = speller.correct(&t.text);
                    if fixed != t.text {
                        corrections.insert(i, fixed);
                    }
                }
            }
        }

        let matching: Vec<Token> = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| match corrections.get(&i) {
                Some(fixed) => Token {
                    text: fixed.clone(),
                    ..t.clone()
                },
                None => t.clone(),
            })
            .collect();
        let splits = split_on_stopwords(&matching, &self.stoplist);

        let mut hashtag_expansions = BTreeMap::new();
        let mut hashtag_splits = BTreeMap::new();
        let raw_chars = &cleaned.offsets;
        for (i, (t, ct)) in tokens.iter().zip(&cleaned_tokens).enumerate() {
            if t.kind != TokenKind::Hashtag {
                continue;
            }
            let words = segment_hashtag(&t.text, &self.segmenter);
            // Word tokens over the hashtag body, with raw offsets of each piece.
            let mut pos = ct.start + 1;
            let pieces: Vec<Token> = words
                .iter()
                .map(|w| {
                    let len = w.chars().count();
                    let token = Token {
                        text: w.clone(),
                        start: raw_chars[pos],
                        end: raw_chars[pos + len - 1] + 1,
                        kind: TokenKind::Word,
                    };
                    pos += len;
                    token
                })
                .collect();
            let fragments = split_on_stopwords(&pieces, &self.stoplist)
                .into_iter()
                .map(|r| Fragment {
                    tokens: pieces[r].iter().map(fragment_token).collect(),
                    hashtag: Some((t.start, t.end)),
                })
                .collect();
            hashtag_expansions.insert(i, words);
            hashtag_splits.insert(i, fragments);
        }

        TweetDocument {
            raw: raw.to_string(),
            cleaned,
            tokens: matching,
            corrections,
            splits,
            hashtag_expansions,
            hashtag_splits,
        }
    }
}

fn fragment_token(t: &Token) -> FragmentToken {
    FragmentToken {
        text: t.text.clone(),
        start: t.start,
        end: t.end,
    }
}

impl TweetDocument {
    /// Body fragments in order, followed by hashtag fragments in order.
    pub fn fragments(&self) -> Vec<Fragment> {
        let body = self.splits.iter().map(|r| Fragment {
            tokens: self.tokens[r.clone()].iter().map(fragment_token).collect(),
            hashtag: None,
        });
        body.chain(self.hashtag_splits.values().flatten().cloned()).collect()
    }

    /// Raw text between two raw character offsets.
    pub fn raw_slice(&self, start: usize, end: usize) -> String {
        self.raw.chars().skip(start).take(end - start).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(ws: &[&str]) -> Vec<Token> {
        let mut pos = 0;
        ws.iter()
            .map(|w| {
                let t = Token {
                    text: w.to_string(),
                    start: pos,
                    end: pos + w.len(),
                    kind: TokenKind::Word,
                };
                pos += w.len() + 1;
                t
            })
            .collect()
    }

    fn texts(tokens: &[Token], ranges: &[Range<usize>]) -> Vec<Vec<String>> {
        ranges
            .iter()
            .map(|r| tokens[r.clone()].iter().map(|t| t.text.clone()).collect())
            .collect()
    }

    #[test]
    fn splits_between_stop_words() {
        let tokens = words(&["water", "level", "in", "ganapathy", "colony", "is", "around", "2", "m"]);
        let stop = StopList::new(["in", "is", "around"], |_| false);
        let ranges = split_on_stopwords(&tokens, &stop);
        assert_eq!(
            texts(&tokens, &ranges),
            vec![vec!["water", "level"], vec!["ganapathy", "colony"], vec!["2", "m"]]
        );
    }

    #[test]
    fn all_stop_words_gives_nothing() {
        let tokens = words(&["in", "is", "the"]);
        let stop = StopList::new(["in", "is", "the"], |_| false);
        assert!(split_on_stopwords(&tokens, &stop).is_empty());
    }

    #[test]
    fn gazetteer_unigrams_never_split() {
        let stop = StopList::new(["new", "in"], |w| w == "new");
        assert!(!stop.contains("new"));
        assert!(stop.contains("in"));
    }

    #[test]
    fn hashtag_fragments_carry_hashtag_span() {
        let english = [("pray", 50u64), ("for", 800)].map(|(w, c)| (w.to_string(), c));
        let pre = Preprocessor {
            stoplist: StopList::new(["for", "in"], |_| false),
            segmenter: SegmenterDictionary::new(english, ["louisiana"]),
            speller: None,
        };
        let raw = "in New Iberia. #PrayForLouisiana";
        let doc = pre.prepare(raw);
        let frags = doc.fragments();
        let last = frags.last().unwrap();
        assert_eq!(last.hashtag, Some((15, 32)));
        assert_eq!(last.tokens[0].text, "louisiana");
        assert_eq!(doc.raw_slice(last.tokens[0].start, last.tokens[0].end), "Louisiana");
        assert_eq!(
            doc.hashtag_expansions.values().next().unwrap(),
            &["pray", "for", "louisiana"]
        );
    }
}
