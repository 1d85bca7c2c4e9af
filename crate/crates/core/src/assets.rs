//! Dictionary assets shipped with the crate, and the line-oriented parsers
//! shared by every dictionary file.
//!
//! All dictionary files are UTF-8, one record per line. Blank lines and
//! lines starting with `#` are ignored.

use std::fs;
use std::path::Path;

use thiserror::Error;

pub const CATEGORY_WORDS: &str = include_str!("../assets/category_words.txt");
pub const BRACKET_PHRASES: &str = include_str!("../assets/bracket_phrases.txt");
pub const STOPNAMES: &str = include_str!("../assets/stopnames.txt");
pub const STOPWORDS: &str = include_str!("../assets/stopwords.txt");
pub const ENGLISH_UNIGRAMS: &str = include_str!("../assets/english_unigrams.tsv");
pub const USPS_SUFFIXES: &str = include_str!("../assets/usps_suffixes.tsv");
pub const OSM_ABBREVIATIONS: &str = include_str!("../assets/osm_abbreviations.tsv");

#[derive(Debug, Error)]
pub enum AssetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses a newline-delimited word list, case-folding and collapsing
/// internal whitespace.
pub fn parse_word_list(text: &str) -> Vec<String> {
    records(text)
        .map(|(_, l)| l.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase())
        .collect()
}

/// Parses `left<TAB>right` pairs.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, AssetError> {
    records(text)
        .map(|(line, l)| {
            let mut parts = l.split('\t');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) if !a.trim().is_empty() && !b.trim().is_empty() => {
                    Ok((a.trim().to_lowercase(), b.trim().to_lowercase()))
                }
                _ => Err(AssetError::Parse {
                    line,
                    message: "expected two tab-separated columns".into(),
                }),
            }
        })
        .collect()
}

/// Parses `word<TAB>count` frequency lines.
pub fn parse_frequencies(text: &str) -> Result<Vec<(String, u64)>, AssetError> {
    parse_pairs(text)?
        .into_iter()
        .enumerate()
        .map(|(i, (word, count))| {
            count.parse::<u64>().map(|c| (word, c)).map_err(|e| AssetError::Parse {
                line: i + 1,
                message: format!("bad count {count:?}: {e}"),
            })
        })
        .collect()
}

pub fn read_text(path: &Path) -> Result<String, AssetError> {
    fs::read_to_string(path).map_err(|source| AssetError::Io {
        path: path.display().to_string(),
        source,
    })
}
