//! Location mention extraction.
//!
//! Each tweet fragment becomes a list of synonym vectors (a token plus its
//! abbreviations and expansions). Valid n-grams are grown bottom-up from
//! valid unigrams, extending only sequences whose language-model probability
//! stays nonzero. Candidates that are full gazetteer names survive overlap
//! resolution when no longer full name overlaps them, and each survivor is
//! linked to its gazetteer entries by a key lookup.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::assets::{self, AssetError};
use crate::gazetteer::Gazetteer;
use crate::langmodel::CompiledModel;
use crate::textprep::{
    Fragment, Preprocessor, SegmenterDictionary, SpellChecker, StopList, TweetDocument, DEFAULT_MAX_EDIT_DISTANCE,
};

/// Bidirectional abbreviation table ("rd" ↔ "road").
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AbbreviationDict {
    images: BTreeMap<String, BTreeSet<String>>,
}

impl AbbreviationDict {
    pub fn from_pairs<I: IntoIterator<Item = (String, String)>>(pairs: I) -> Self {
        let mut images: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (abbrev, expansion) in pairs {
            if abbrev == expansion {
                continue;
            }
            images.entry(abbrev.clone()).or_default().insert(expansion.clone());
            images.entry(expansion).or_default().insert(abbrev);
        }
        Self { images }
    }

    /// Parses `abbreviation<TAB>expansion` lines.
    pub fn parse(text: &str) -> Result<Self, AssetError> {
        Ok(Self::from_pairs(assets::parse_pairs(text)?))
    }

    pub fn images(&self, token: &str) -> impl Iterator<Item = &str> {
        self.images.get(token).into_iter().flatten().map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.images.keys().map(String::as_str)
    }
}

/// A token and its alternative surfaces; the original always comes first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TokenSynonymVector {
    pub original: String,
    pub alternatives: Vec<String>,
}

pub fn expand_token(
    token: &str,
    suffix_dict: &AbbreviationDict,
    osm_abbrev_dict: &AbbreviationDict,
) -> TokenSynonymVector {
    let mut alternatives = vec![token.to_string()];
    let images: BTreeSet<&str> = suffix_dict.images(token).chain(osm_abbrev_dict.images(token)).collect();
    alternatives.extend(images.into_iter().filter(|a| *a != token).map(str::to_string));
    TokenSynonymVector {
        original: token.to_string(),
        alternatives,
    }
}

/// A valid n-gram over a fragment: token range `[start, end)` and the
/// alternative chosen at each position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Candidate {
    pub start: usize,
    pub end: usize,
    pub tokens: Vec<String>,
}

impl Candidate {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn key(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Instrumentation for the bottom-up search.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Alternatives tried for each token range `(start, end)`.
    pub explored: HashMap<(usize, usize), usize>,
}

impl SearchStats {
    pub fn total(&self) -> usize {
        self.explored.values().sum()
    }
}

/// All valid n-grams of a fragment, in (start, end, tokens) order.
pub fn find_valid_ngrams(fragment: &[TokenSynonymVector], model: &CompiledModel) -> Vec<Candidate> {
    find_valid_ngrams_with_stats(fragment, model, &mut SearchStats::default())
}

pub fn find_valid_ngrams_with_stats(
    fragment: &[TokenSynonymVector],
    model: &CompiledModel,
    stats: &mut SearchStats,
) -> Vec<Candidate> {
    let mut out = Vec::new();
    let mut level: Vec<Candidate> = Vec::new();
    for (i, v) in fragment.iter().enumerate() {
        for alt in &v.alternatives {
            *stats.explored.entry((i, i + 1)).or_insert(0) += 1;
            if model.extends::<&str>(&[], alt) {
                level.push(Candidate {
                    start: i,
                    end: i + 1,
                    tokens: vec![alt.clone()],
                });
            }
        }
    }
    while !level.is_empty() {
        let mut next = Vec::new();
        for node in &level {
            let Some(v) = fragment.get(node.end) else {
                continue;
            };
            for alt in &v.alternatives {
                *stats.explored.entry((node.start, node.end + 1)).or_insert(0) += 1;
                if model.extends(&node.tokens, alt) {
                    let mut tokens = node.tokens.clone();
                    tokens.push(alt.clone());
                    next.push(Candidate {
                        start: node.start,
                        end: node.end + 1,
                        tokens,
                    });
                }
            }
        }
        out.append(&mut level);
        level = next;
    }
    out.sort();
    out
}

/// A full-name candidate that survived overlap resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedMatch {
    pub start: usize,
    pub end: usize,
    pub matched_name: String,
    pub entry_ids: BTreeSet<String>,
}

/// Keeps the longest full names of a fragment.
///
/// Candidates that are not gazetteer names never survive and never block a
/// full name they contain. Candidates sharing a token range collapse into
/// one match whose name prefers the unexpanded tokens. Ranges are then
/// accepted longest first; a range is dropped only when it overlaps an
/// accepted, strictly longer range, so equal-length overlapping names are
/// all kept.
pub fn resolve_overlaps(candidates: &[Candidate], originals: &[&str], gazetteer: &Gazetteer) -> Vec<ResolvedMatch> {
    let mut by_range: BTreeMap<(usize, usize), ResolvedMatch> = BTreeMap::new();
    let mut unexpanded: BTreeSet<(usize, usize)> = BTreeSet::new();
    for c in candidates {
        let Some(link) = gazetteer.lookup_tokens(&c.tokens) else {
            continue;
        };
        let name = link.surfaces.first().expect("index entries have surfaces").clone();
        let is_original = originals
            .get(c.start..c.end)
            .is_some_and(|o| o.iter().eq(c.tokens.iter()));
        let range = (c.start, c.end);
        match by_range.get_mut(&range) {
            None => {
                by_range.insert(
                    range,
                    ResolvedMatch {
                        start: c.start,
                        end: c.end,
                        matched_name: name,
                        entry_ids: link.entry_ids.clone(),
                    },
                );
                if is_original {
                    unexpanded.insert(range);
                }
            }
            Some(m) => {
                m.entry_ids.extend(link.entry_ids.iter().cloned());
                let prefer = if is_original {
                    !unexpanded.contains(&range) || name < m.matched_name
                } else {
                    !unexpanded.contains(&range) && name < m.matched_name
                };
                if prefer {
                    m.matched_name = name;
                }
                if is_original {
                    unexpanded.insert(range);
                }
            }
        }
    }

    let mut ranked: Vec<ResolvedMatch> = by_range.into_values().collect();
    ranked.sort_by_key(|m| (std::cmp::Reverse(m.end - m.start), m.start));
    let mut accepted: Vec<ResolvedMatch> = Vec::new();
    for m in ranked {
        let len = m.end - m.start;
        let blocked = accepted
            .iter()
            .any(|a| a.end - a.start > len && a.start < m.end && m.start < a.end);
        if !blocked {
            accepted.push(m);
        }
    }
    accepted.sort_by(|a, b| (a.start, &a.matched_name).cmp(&(b.start, &b.matched_name)));
    accepted
}

/// One extracted location mention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocationMention {
    /// Text as written in the tweet (the segmented piece for hashtags).
    pub surface: String,
    pub matched_name: String,
    /// Raw character offsets; hashtag mentions cover the whole hashtag.
    pub char_start: usize,
    pub char_end: usize,
    pub entry_ids: Vec<String>,
    pub from_hashtag: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    pub spelling_correction: bool,
    pub max_edit_distance: usize,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            spelling_correction: false,
            max_edit_distance: DEFAULT_MAX_EDIT_DISTANCE,
        }
    }
}

/// Extraction-time dictionaries.
#[derive(Debug, Clone)]
pub struct Lexicon {
    pub stopwords: Vec<String>,
    pub unigram_frequencies: Vec<(String, u64)>,
    /// English vocabulary for spelling correction; defaults to the words of
    /// `unigram_frequencies` when `None`.
    pub vocabulary: Option<Vec<String>>,
    pub suffixes: AbbreviationDict,
    pub osm_abbreviations: AbbreviationDict,
}

impl Lexicon {
    pub fn shipped() -> Self {
        Self {
            stopwords: assets::parse_word_list(assets::STOPWORDS),
            unigram_frequencies: assets::parse_frequencies(assets::ENGLISH_UNIGRAMS)
                .expect("shipped frequency list parses"),
            vocabulary: None,
            suffixes: AbbreviationDict::parse(assets::USPS_SUFFIXES).expect("shipped suffix table parses"),
            osm_abbreviations: AbbreviationDict::parse(assets::OSM_ABBREVIATIONS)
                .expect("shipped abbreviation table parses"),
        }
    }
}

/// A ready-to-run extractor over one region's gazetteer and model.
#[derive(Debug, Clone)]
pub struct Extractor {
    gazetteer: Gazetteer,
    model: CompiledModel,
    preprocessor: Preprocessor,
    suffixes: AbbreviationDict,
    osm_abbreviations: AbbreviationDict,
}

impl Extractor {
    pub fn new(gazetteer: Gazetteer, model: CompiledModel, lexicon: Lexicon, config: ExtractionConfig) -> Self {
        let stoplist = StopList::new(&lexicon.stopwords, |w| model.contains(w));
        let segmenter = SegmenterDictionary::new(lexicon.unigram_frequencies.iter().cloned(), model.vocabulary());
        let speller = config.spelling_correction.then(|| {
            let english: Vec<(String, u64)> = match &lexicon.vocabulary {
                Some(words) => words.iter().map(|w| (w.clone(), 1)).collect(),
                None => lexicon.unigram_frequencies.clone(),
            };
            let gazetteer_words = model.counts.unigram_counts.iter().map(|(w, c)| (w.clone(), *c));
            SpellChecker::new(english.into_iter().chain(gazetteer_words), config.max_edit_distance)
        });
        Self {
            gazetteer,
            model,
            preprocessor: Preprocessor {
                stoplist,
                segmenter,
                speller,
            },
            suffixes: lexicon.suffixes,
            osm_abbreviations: lexicon.osm_abbreviations,
        }
    }

    pub fn gazetteer(&self) -> &Gazetteer {
        &self.gazetteer
    }

    pub fn model(&self) -> &CompiledModel {
        &self.model
    }

    pub fn preprocessor(&self) -> &Preprocessor {
        &self.preprocessor
    }

    pub fn expand(&self, token: &str) -> TokenSynonymVector {
        expand_token(token, &self.suffixes, &self.osm_abbreviations)
    }

    pub fn prepare(&self, raw: &str) -> TweetDocument {
        self.preprocessor.prepare(raw)
    }

    /// Synonym vectors and pre-resolution candidates of every fragment.
    pub fn candidates(&self, raw: &str) -> Vec<(Fragment, Vec<TokenSynonymVector>, Vec<Candidate>)> {
        self.prepare(raw)
            .fragments()
            .into_iter()
            .map(|f| {
                let vectors: Vec<_> = f.tokens.iter().map(|t| self.expand(&t.text)).collect();
                let cands = find_valid_ngrams(&vectors, &self.model);
                (f, vectors, cands)
            })
            .collect()
    }

    /// Runs the full pipeline on one raw tweet; mentions ordered by
    /// `char_start`, then `matched_name`.
    pub fn extract(&self, raw: &str) -> Vec<LocationMention> {
        let doc = self.prepare(raw);
        let mut mentions = Vec::new();
        for fragment in doc.fragments() {
            let vectors: Vec<_> = fragment.tokens.iter().map(|t| self.expand(&t.text)).collect();
            let cands = find_valid_ngrams(&vectors, &self.model);
            let originals: Vec<&str> = fragment.tokens.iter().map(|t| t.text.as_str()).collect();
            for m in resolve_overlaps(&cands, &originals, &self.gazetteer) {
                let first = &fragment.tokens[m.start];
                let last = &fragment.tokens[m.end - 1];
                let surface = doc.raw_slice(first.start, last.end);
                let (char_start, char_end) = fragment.hashtag.unwrap_or((first.start, last.end));
                mentions.push(LocationMention {
                    surface,
                    matched_name: m.matched_name,
                    char_start,
                    char_end,
                    entry_ids: m.entry_ids.into_iter().collect(),
                    from_hashtag: fragment.hashtag.is_some(),
                });
            }
        }
        mentions.sort_by(|a, b| {
            (a.char_start, &a.matched_name, a.char_end, &a.surface).cmp(&(
                b.char_start,
                &b.matched_name,
                b.char_end,
                &b.surface,
            ))
        });
        mentions.dedup();
        mentions
    }
}
