use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Word,
    Hashtag,
    Mention,
    Emoticon,
    Punct,
}

/// A token with character offsets `[start, end)` into the text it was cut from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
    pub kind: TokenKind,
}

fn emoticon() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r#"^(?:[:;=][-o^']?[)(\]\[dDpP/\\|*3]+|[)(\]\[/\\|]+[-o^']?[:;=]|<3+|\^_*\^)$"#)
            .expect("valid emoticon pattern")
    })
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_tag_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Characters that may join two word pieces into one token ("u.s", "winston-salem", "didn't").
fn is_joiner(c: char) -> bool {
    matches!(c, '.' | '-' | '\'' | '_' | '&')
}

/// Whitespace-driven tokenizer.
///
/// Hashtags, mentions and emoticons stay whole. Periods never split a token
/// except where two alphabetic words of two or more letters are glued by a
/// single period with no space ("school.west"), which is treated as a missing
/// space; acronyms like "u.s." keep their trailing period. Other punctuation
/// next to words is detached as its own token.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        split_chunk(&chars, start, i, &mut out);
    }
    out
}

fn push(out: &mut Vec<Token>, chars: &[char], start: usize, end: usize, kind: TokenKind) {
    out.push(Token {
        text: chars[start..end].iter().collect(),
        start,
        end,
        kind,
    });
}

fn split_chunk(chars: &[char], start: usize, end: usize, out: &mut Vec<Token>) {
    let chunk: String = chars[start..end].iter().collect();
    if emoticon().is_match(&chunk) {
        push(out, chars, start, end, TokenKind::Emoticon);
        return;
    }
    let mut i = start;
    while i < end {
        let c = chars[i];
        if (c == '#' || c == '@') && i + 1 < end && is_tag_char(chars[i + 1]) {
            let s = i;
            i += 1;
            while i < end && is_tag_char(chars[i]) {
                i += 1;
            }
            let kind = if c == '#' {
                TokenKind::Hashtag
            } else {
                TokenKind::Mention
            };
            push(out, chars, s, i, kind);
        } else if is_word_char(c) {
            let s = i;
            i += 1;
            while i < end {
                if is_word_char(chars[i]) {
                    i += 1;
                } else if is_joiner(chars[i]) && i + 1 < end && is_word_char(chars[i + 1]) {
                    i += 2;
                } else {
                    break;
                }
            }
            // "u.s." keeps its final period.
            if i < end && chars[i] == '.' && is_acronym(&chars[s..i]) {
                i += 1;
            }
            push_word(chars, s, i, out);
        } else {
            let s = i;
            i += 1;
            while i < end
                && !is_word_char(chars[i])
                && !((chars[i] == '#' || chars[i] == '@') && i + 1 < end && is_tag_char(chars[i + 1]))
            {
                i += 1;
            }
            push(out, chars, s, i, TokenKind::Punct);
        }
    }
}

/// Single letters separated by periods: "u.s", "u.s.a".
fn is_acronym(word: &[char]) -> bool {
    word.len() >= 3
        && word
            .iter()
            .enumerate()
            .all(|(k, c)| if k % 2 == 0 { c.is_alphabetic() } else { *c == '.' })
}

/// Emits a word, splitting "school.west" style joins where every
/// period-separated piece is alphabetic and at least two letters long.
fn push_word(chars: &[char], start: usize, end: usize, out: &mut Vec<Token>) {
    let word = &chars[start..end];
    if !word.contains(&'.') {
        push(out, chars, start, end, TokenKind::Word);
        return;
    }
    let pieces: Vec<&[char]> = word.split(|c| *c == '.').collect();
    let splittable = pieces
        .iter()
        .all(|p| p.len() >= 2 && p.iter().all(|c| c.is_alphabetic() || *c == '-' || *c == '\''));
    if !splittable {
        push(out, chars, start, end, TokenKind::Word);
        return;
    }
    let mut pos = start;
    for (k, piece) in pieces.iter().enumerate() {
        if k > 0 {
            push(out, chars, pos, pos + 1, TokenKind::Punct);
            pos += 1;
        }
        push(out, chars, pos, pos + piece.len(), TokenKind::Word);
        pos += piece.len();
    }
}

/// Tokens of a gazetteer name that take part in the language model: every
/// token except bare punctuation.
pub fn name_tokens(surface: &str) -> Vec<String> {
    tokenize(surface)
        .into_iter()
        .filter(|t| t.kind != TokenKind::Punct)
        .map(|t| t.text)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(s: &str) -> Vec<String> {
        tokenize(s).into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn sentence_period_and_hashtag() {
        assert_eq!(
            texts("in new iberia. #prayforlouisiana"),
            ["in", "new", "iberia", ".", "#prayforlouisiana"]
        );
    }

    #[test]
    fn acronym_stays_whole() {
        assert_eq!(texts("u.s. aid"), ["u.s.", "aid"]);
        assert_eq!(texts("2.5 m"), ["2.5", "m"]);
    }

    #[test]
    fn glued_words_are_split() {
        assert_eq!(
            texts("oxford school.west mambalam.."),
            ["oxford", "school", ".", "west", "mambalam", ".."]
        );
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn contractions_hyphens_and_commas() {
        assert_eq!(
            texts("didn't winston-salem, nc"),
            ["didn't", "winston-salem", ",", "nc"]
        );
    }

    #[test]
    fn emoticons_and_mentions() {
        let toks = tokenize(":) @bob #flood_2016!");
        let kinds: Vec<_> = toks.iter().map(|t| t.kind).collect();
        assert_eq!(
            kinds,
            [
                TokenKind::Emoticon,
                TokenKind::Mention,
                TokenKind::Hashtag,
                TokenKind::Punct
            ]
        );
        assert_eq!(toks[2].text, "#flood_2016");
    }

    #[test]
    fn offsets_address_input() {
        let s = "sou th kr koil street near oxford school.west";
        let chars: Vec<char> = s.chars().collect();
        for t in tokenize(s) {
            assert_eq!(chars[t.start..t.end].iter().collect::<String>(), t.text);
        }
    }

    #[test]
    fn name_tokens_drop_punctuation() {
        assert_eq!(name_tokens("cars india - adyar"), ["cars", "india", "adyar"]);
        assert_eq!(name_tokens("st. louis"), ["st", "louis"]);
    }
}
