use std::sync::OnceLock;

use regex::Regex;

/// Cleaned, case-folded tweet text plus a map from each cleaned character
/// back to the raw character it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanedText {
    pub text: String,
    /// `offsets[i]` is the raw character index of cleaned character `i`.
    /// Cleaned text is pure ASCII, so byte and character indices agree.
    pub offsets: Vec<usize>,
}

impl CleanedText {
    /// Maps a cleaned character range to the raw character range it covers.
    pub fn raw_span(&self, start: usize, end: usize) -> (usize, usize) {
        debug_assert!(start < end && end <= self.offsets.len());
        (self.offsets[start], self.offsets[end - 1] + 1)
    }
}

fn removal_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(concat!(
            r"(?i:(?:https?://|www\.)\S+)",
            r"|^RT\b:?",
            r"|(?i:\brt:?\s+@\w+:?)",
            r"|@\w+:?",
        ))
        .expect("valid removal pattern")
    })
}

/// Removes retweet markers, URLs, user mentions and non-ASCII characters,
/// case-folds, and collapses whitespace.
///
/// Removed spans and non-ASCII symbols act as word separators; non-ASCII
/// letters are dropped in place (`café` becomes `caf`).
pub fn clean_tweet(raw: &str) -> CleanedText {
    let chars: Vec<(usize, char)> = raw.char_indices().collect();
    let mut removed = vec![false; chars.len()];
    let byte_to_char = |byte: usize| chars.partition_point(|(b, _)| *b < byte);
    for m in removal_pattern().find_iter(raw) {
        for flag in &mut removed[byte_to_char(m.start())..byte_to_char(m.end())] {
            *flag = true;
        }
    }

    let mut text = String::with_capacity(raw.len());
    let mut offsets = Vec::with_capacity(raw.len());
    let mut pending_space: Option<usize> = None;
    for (idx, &(_, c)) in chars.iter().enumerate() {
        let separator = removed[idx] || c.is_whitespace() || (!c.is_ascii() && !c.is_alphanumeric());
        if separator {
            pending_space.get_or_insert(idx);
            continue;
        }
        if !c.is_ascii() {
            continue;
        }
        if let Some(space_at) = pending_space.take() {
            if !text.is_empty() {
                text.push(' ');
                offsets.push(space_at);
            }
        }
        text.push(c.to_ascii_lowercase());
        offsets.push(idx);
    }
    CleanedText { text, offsets }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_retweet_mention_and_url() {
        let c = clean_tweet("RT @user flood in adyar http://t.co/x");
        assert_eq!(c.text, "flood in adyar");
    }

    #[test]
    fn plain_text_is_only_case_folded() {
        let raw = "water level in Ganapathy Colony is around 2 m";
        let c = clean_tweet(raw);
        assert_eq!(c.text, raw.to_lowercase());
        assert_eq!(c.offsets, (0..raw.len()).collect::<Vec<_>>());
    }

    #[test]
    fn drops_non_ascii() {
        let raw = "flooding… café";
        let c = clean_tweet(raw);
        assert_eq!(c.text, "flooding caf");
        // Re-align each cleaned token to the raw text by substring search.
        let raw_chars: Vec<char> = raw.chars().collect();
        let mut from = 0;
        for token in c.text.split(' ') {
            let found = (from..raw_chars.len())
                .find(|&i| {
                    raw_chars[i..].len() >= token.len()
                        && raw_chars[i..i + token.len()].iter().collect::<String>().to_lowercase() == token
                })
                .expect("token present in raw");
            let cleaned_start = c.text.find(token).unwrap();
            assert_eq!(c.offsets[cleaned_start], found);
            from = found + token.len();
        }
    }

    #[test]
    fn retweet_colon_and_mid_text_mentions() {
        assert_eq!(clean_tweet("RT @a_b: Roads closed @cityofhouston").text, "roads closed");
        assert_eq!(clean_tweet("Rt 66 flooded").text, "rt 66 flooded");
    }

    #[test]
    fn empty_and_whitespace() {
        assert_eq!(clean_tweet("").text, "");
        assert_eq!(clean_tweet("  \t ").text, "");
    }
}
