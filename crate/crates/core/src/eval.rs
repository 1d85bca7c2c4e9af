//! Span-level scoring against BRAT standoff annotations.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extractor::LocationMention;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: annotation {id} spans {start}..{end} which reads {found:?}, not {expected:?}")]
    OffsetMismatch {
        path: PathBuf,
        id: String,
        start: usize,
        end: usize,
        expected: String,
        found: String,
    },
    #[error("{path}: annotation {id} has unknown label {label:?}")]
    UnknownLabel { path: PathBuf, id: String, label: String },
    #[error("cannot aggregate an empty list of reports")]
    EmptyAggregate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "inLoc")]
    InLoc,
    #[serde(rename = "outLoc")]
    OutLoc,
    #[serde(rename = "ambLoc")]
    AmbLoc,
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "inloc" => Ok(Self::InLoc),
            "outloc" => Ok(Self::OutLoc),
            "ambloc" => Ok(Self::AmbLoc),
            _ => Err(s.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldAnnotation {
    pub doc_id: String,
    pub id: String,
    pub char_start: usize,
    pub char_end: usize,
    pub surface: String,
    pub category: Category,
}

/// Parses the T-lines of a `.ann` file against its document text.
///
/// Offsets are character offsets. Lines other than T-lines (relations,
/// attributes, notes, comments) are skipped. Discontinuous spans are
/// rejected.
pub fn parse_annotations(doc_id: &str, ann: &str, text: &str, path: &Path) -> Result<Vec<GoldAnnotation>, EvalError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    for (i, line) in ann.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if !line.starts_with('T') {
            continue;
        }
        let malformed = |message: &str| EvalError::Malformed {
            path: path.to_path_buf(),
            line: i + 1,
            message: message.to_string(),
        };
        let mut fields = line.splitn(3, '\t');
        let id = fields.next().unwrap_or_default().to_string();
        let body = fields.next().ok_or_else(|| malformed("missing annotation body"))?;
        let surface = fields.next().unwrap_or_default().to_string();
        if body.contains(';') {
            return Err(malformed("discontinuous spans are not supported"));
        }
        let parts: Vec<&str> = body.split_whitespace().collect();
        let [label, start, end] = parts[..] else {
            return Err(malformed("expected `label start end`"));
        };
        let category = label.parse::<Category>().map_err(|label| EvalError::UnknownLabel {
            path: path.to_path_buf(),
            id: id.clone(),
            label,
        })?;
        let start: usize = start.parse().map_err(|_| malformed("bad start offset"))?;
        let end: usize = end.parse().map_err(|_| malformed("bad end offset"))?;
        let found: String = if start <= end && end <= chars.len() {
            chars[start..end].iter().collect()
        } else {
            String::new()
        };
        if found != surface {
            return Err(EvalError::OffsetMismatch {
                path: path.to_path_buf(),
                id,
                start,
                end,
                expected: surface,
                found,
            });
        }
        out.push(GoldAnnotation {
            doc_id: doc_id.to_string(),
            id,
            char_start: start,
            char_end: end,
            surface,
            category,
        });
    }
    Ok(out)
}

/// Reads a `.ann`/`.txt` pair; the document id is the `.ann` file stem.
pub fn load_annotations(ann_path: &Path, txt_path: &Path) -> Result<Vec<GoldAnnotation>, EvalError> {
    let read = |p: &Path| {
        std::fs::read_to_string(p).map_err(|source| EvalError::Io {
            path: p.to_path_buf(),
            source,
        })
    };
    let ann = read(ann_path)?;
    let text = read(txt_path)?;
    let doc_id = ann_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_annotations(&doc_id, &ann, &text, ann_path)
}

/// Widens every gold span that falls inside a hashtag to the whole hashtag,
/// so it lines up with hashtag mentions from the extractor.
pub fn normalize_hashtag_spans(text: &str, gold: &mut [GoldAnnotation]) {
    let hashtag = Regex::new(r"#\w+").expect("static pattern");
    let char_index: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
    let to_char = |byte: usize| char_index.partition_point(|&b| b < byte);
    let spans: Vec<(usize, usize)> = hashtag
        .find_iter(text)
        .map(|m| (to_char(m.start()), to_char(m.end())))
        .collect();
    for g in gold {
        if let Some(&(s, e)) = spans
            .iter()
            .find(|&&(s, e)| s <= g.char_start && g.char_end <= e && g.char_start < g.char_end)
        {
            g.char_start = s;
            g.char_end = e;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    /// Exact hits on outLoc/ambLoc spans are ignored.
    #[default]
    Standard,
    /// Exact hits on outLoc/ambLoc spans are false positives.
    #[serde(rename = "lnex_strict")]
    Strict,
}

impl FromStr for EvalMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(Self::Standard),
            "lnex_strict" | "strict" => Ok(Self::Strict),
            other => Err(format!(
                "unknown eval mode {other:?} (expected standard or lnex_strict)"
            )),
        }
    }
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Standard => "standard",
            Self::Strict => "lnex_strict",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoringOptions {
    pub mode: EvalMode,
    /// True-positive credit per partial match.
    pub partial_tp_credit: f64,
}

impl Default for ScoringOptions {
    fn default() -> Self {
        Self {
            mode: EvalMode::Standard,
            partial_tp_credit: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoreReport {
    pub tp: f64,
    pub fp: f64,
    #[serde(rename = "fn")]
    pub fn_: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl ScoreReport {
    pub fn from_counts(tp: f64, fp: f64, fn_: f64) -> Self {
        let ratio = |n: f64, d: f64| if d > 0.0 { n / d } else { 0.0 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = ratio(2.0 * precision * recall, precision + recall);
        Self {
            tp,
            fp,
            fn_,
            precision,
            recall,
            f1,
        }
    }
}

/// How one prediction was scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Exact,
    Partial,
    /// Exact hit on an outLoc or ambLoc span.
    OutOfScope,
    Unmatched,
}

/// Scores predicted character spans against gold annotations.
///
/// Identical predicted spans count once. Each gold span pairs with at most
/// one prediction: inLoc spans with any overlapping prediction, outLoc and
/// ambLoc spans only with an exact one. Pairs are taken greedily, exact
/// first, then by larger overlap, then by leftmost prediction.
pub fn score_spans(
    predicted: &[(usize, usize)],
    gold: &[GoldAnnotation],
    options: ScoringOptions,
) -> (ScoreReport, Vec<Outcome>) {
    let mut spans: Vec<(usize, usize)> = predicted.to_vec();
    spans.sort_unstable();
    spans.dedup();

    let mut pairs = Vec::new();
    for (p, &(ps, pe)) in spans.iter().enumerate() {
        for (g, gold) in gold.iter().enumerate() {
            let exact = ps == gold.char_start && pe == gold.char_end;
            let overlap = pe.min(gold.char_end).saturating_sub(ps.max(gold.char_start));
            let eligible = match gold.category {
                Category::InLoc => exact || overlap > 0,
                Category::OutLoc | Category::AmbLoc => exact,
            };
            if eligible {
                pairs.push((!exact, std::cmp::Reverse(overlap), ps, p, g));
            }
        }
    }
    pairs.sort_unstable();

    let mut outcomes = vec![Outcome::Unmatched; spans.len()];
    let mut pred_used = vec![false; spans.len()];
    let mut gold_used = vec![false; gold.len()];
    for (not_exact, _, _, p, g) in pairs {
        if pred_used[p] || gold_used[g] {
            continue;
        }
        pred_used[p] = true;
        gold_used[g] = true;
        outcomes[p] = match (gold[g].category, not_exact) {
            (Category::InLoc, false) => Outcome::Exact,
            (Category::InLoc, true) => Outcome::Partial,
            _ => Outcome::OutOfScope,
        };
    }

    let (mut tp, mut fp, mut fn_) = (0.0, 0.0, 0.0);
    for outcome in &outcomes {
        match outcome {
            Outcome::Exact => tp += 1.0,
            Outcome::Partial => {
                tp += options.partial_tp_credit;
                fp += 0.5;
                fn_ += 0.5;
            }
            Outcome::OutOfScope => {
                if options.mode == EvalMode::Strict {
                    fp += 1.0;
                }
            }
            Outcome::Unmatched => fp += 1.0,
        }
    }
    for (g, used) in gold.iter().zip(&gold_used) {
        if g.category == Category::InLoc && !used {
            fn_ += 1.0;
        }
    }
    (ScoreReport::from_counts(tp, fp, fn_), outcomes)
}

pub fn match_spans(predicted: &[LocationMention], gold: &[GoldAnnotation], options: ScoringOptions) -> ScoreReport {
    let spans: Vec<(usize, usize)> = predicted.iter().map(|m| (m.char_start, m.char_end)).collect();
    score_spans(&spans, gold, options).0
}

/// Micro-average: sums raw counts and recomputes the ratios.
pub fn aggregate(reports: &[ScoreReport]) -> Result<ScoreReport, EvalError> {
    if reports.is_empty() {
        return Err(EvalError::EmptyAggregate);
    }
    let (tp, fp, fn_) = reports
        .iter()
        .fold((0.0, 0.0, 0.0), |(a, b, c), r| (a + r.tp, b + r.fp, c + r.fn_));
    Ok(ScoreReport::from_counts(tp, fp, fn_))
}

/// Aligned plain-text table of named reports.
pub fn render_table(rows: &[(String, ScoreReport)]) -> String {
    let width = rows.iter().map(|(n, _)| n.chars().count()).max().unwrap_or(0).max(8);
    let mut out = format!(
        "{:<width$}  {:>8} {:>8} {:>8} {:>9} {:>9} {:>9}\n",
        "document", "tp", "fp", "fn", "precision", "recall", "f1"
    );
    for (name, r) in rows {
        out.push_str(&format!(
            "{:<width$}  {:>8.1} {:>8.1} {:>8.1} {:>9.4} {:>9.4} {:>9.4}\n",
            name, r.tp, r.fp, r.fn_, r.precision, r.recall, r.f1
        ));
    }
    out
}
