//! JSON-lines extraction over a byte stream with parallel workers.
//!
//! A reader thread numbers input lines, worker threads extract, and the
//! calling thread writes records back in input order. The reader takes a
//! permit per line and the writer returns it once the record is written, so
//! at most `window` lines are in flight whatever the stream length.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use crossbeam_channel::{bounded, Receiver, Sender};
use serde::{Deserialize, Serialize};

use crate::extractor::{Extractor, LocationMention};

#[derive(Debug, Deserialize)]
struct InputRecord {
    id: serde_json::Value,
    text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionRecord {
    pub id: String,
    pub mentions: Vec<LocationMention>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub id: Option<String>,
    /// 1-based input line number.
    pub line: usize,
    pub error: String,
}

/// Outcome of one input line.
#[derive(Debug, Clone, PartialEq)]
pub enum LineResult {
    Ok(ExtractionRecord),
    Err(ErrorRecord),
}

impl LineResult {
    pub fn to_json(&self) -> String {
        match self {
            LineResult::Ok(r) => serde_json::to_string(r),
            LineResult::Err(e) => serde_json::to_string(e),
        }
        .expect("records serialize")
    }
}

fn id_string(v: &serde_json::Value) -> Option<String> {
    match v {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

/// Extracts one raw input line (without its terminator).
pub fn process_line(extractor: &Extractor, line_no: usize, bytes: &[u8]) -> LineResult {
    let fail = |id: Option<String>, error: String| {
        LineResult::Err(ErrorRecord {
            id,
            line: line_no,
            error,
        })
    };
    let text = match std::str::from_utf8(bytes) {
        Ok(t) => t,
        Err(e) => return fail(None, format!("invalid UTF-8: {e}")),
    };
    if text.trim().is_empty() {
        return fail(None, "blank line".into());
    }
    let record: InputRecord = match serde_json::from_str(text) {
        Ok(r) => r,
        Err(e) => return fail(None, format!("invalid record: {e}")),
    };
    let Some(id) = id_string(&record.id) else {
        return fail(None, "id must be a string or number".into());
    };
    match panic::catch_unwind(AssertUnwindSafe(|| extractor.extract(&record.text))) {
        Ok(mentions) => LineResult::Ok(ExtractionRecord { id, mentions }),
        Err(_) => fail(Some(id), "internal error during extraction".into()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamOptions {
    pub workers: usize,
    /// Maximum lines read but not yet written.
    pub window: usize,
}

impl StreamOptions {
    pub fn with_workers(workers: usize) -> Self {
        let workers = workers.max(1);
        Self {
            workers,
            window: workers * 64,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StreamSummary {
    pub lines: usize,
    pub errors: usize,
    pub mentions: usize,
    pub elapsed: Duration,
}

impl StreamSummary {
    pub fn lines_per_second(&self) -> f64 {
        let secs = self.elapsed.as_secs_f64();
        if secs > 0.0 {
            self.lines as f64 / secs
        } else {
            0.0
        }
    }
}

fn strip_terminator(mut line: &[u8]) -> &[u8] {
    if let [rest @ .., b'\n'] = line {
        line = rest;
    }
    if let [rest @ .., b'\r'] = line {
        line = rest;
    }
    line
}

fn read_lines<R: BufRead>(mut input: R, jobs: Sender<(usize, Vec<u8>)>, permits: Sender<()>) -> io::Result<()> {
    let mut line_no = 0;
    loop {
        let mut buf = Vec::new();
        if input.read_until(b'\n', &mut buf)? == 0 {
            return Ok(());
        }
        line_no += 1;
        let len = strip_terminator(&buf).len();
        buf.truncate(len);
        if permits.send(()).is_err() || jobs.send((line_no, buf)).is_err() {
            return Ok(());
        }
    }
}

fn work(extractor: &Extractor, jobs: Receiver<(usize, Vec<u8>)>, results: Sender<(usize, LineResult)>) {
    for (line_no, bytes) in jobs {
        let result = process_line(extractor, line_no, &bytes);
        if results.send((line_no, result)).is_err() {
            return;
        }
    }
}

/// Reads JSON lines from `input` and writes one record per line to `output`
/// in input order.
pub fn run_stream<R, W>(
    extractor: &Extractor,
    input: R,
    mut output: W,
    options: StreamOptions,
) -> io::Result<StreamSummary>
where
    R: BufRead + Send,
    W: Write,
{
    let started = Instant::now();
    let window = options.window.max(1);
    let (job_tx, job_rx) = bounded::<(usize, Vec<u8>)>(window);
    let (result_tx, result_rx) = bounded::<(usize, LineResult)>(window);
    let (permit_tx, permit_rx) = bounded::<()>(window);

    std::thread::scope(|scope| {
        let reader = scope.spawn(move || read_lines(input, job_tx, permit_tx));
        for _ in 0..options.workers.max(1) {
            let jobs = job_rx.clone();
            let results = result_tx.clone();
            scope.spawn(move || work(extractor, jobs, results));
        }
        drop(job_rx);
        drop(result_tx);

        let written = write_in_order(result_rx, &permit_rx, &mut output);
        drop(permit_rx);
        let read = reader.join().expect("reader thread does not panic");
        let mut summary = written?;
        read?;
        output.flush()?;
        summary.elapsed = started.elapsed();
        Ok(summary)
    })
}

fn write_in_order<W: Write>(
    results: Receiver<(usize, LineResult)>,
    permits: &Receiver<()>,
    output: &mut W,
) -> io::Result<StreamSummary> {
    let mut summary = StreamSummary::default();
    let mut pending: BTreeMap<usize, LineResult> = BTreeMap::new();
    let mut next = 1;
    for (line_no, result) in results {
        pending.insert(line_no, result);
        while let Some(result) = pending.remove(&next) {
            match &result {
                LineResult::Ok(r) => summary.mentions += r.mentions.len(),
                LineResult::Err(_) => summary.errors += 1,
            }
            output.write_all(result.to_json().as_bytes())?;
            output.write_all(b"\n")?;
            summary.lines += 1;
            next += 1;
            let _ = permits.recv();
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extractor::{AbbreviationDict, ExtractionConfig, Lexicon};
    use crate::gazetteer::{build_gazetteer, GazetteerDictionaries, GazetteerEntry, Source};
    use crate::langmodel::compute_model;

    fn extractor() -> Extractor {
        let entries = ["Houston", "New Iberia"]
            .iter()
            .enumerate()
            .map(|(i, n)| GazetteerEntry {
                id: i.to_string(),
                canonical_name: n.to_string(),
                latitude: None,
                longitude: None,
                source: Source::Generic,
                extra: Default::default(),
            })
            .collect();
        let g = build_gazetteer(entries, &GazetteerDictionaries::default()).unwrap();
        let m = compute_model(&g).unwrap();
        let lexicon = Lexicon {
            stopwords: vec!["in".into(), "is".into()],
            unigram_frequencies: vec![("in".into(), 10)],
            vocabulary: None,
            suffixes: AbbreviationDict::default(),
            osm_abbreviations: AbbreviationDict::default(),
        };
        Extractor::new(g, m, lexicon, ExtractionConfig::default())
    }

    fn run(input: &[u8], workers: usize) -> (String, StreamSummary) {
        let mut out = Vec::new();
        let summary = run_stream(&extractor(), input, &mut out, StreamOptions::with_workers(workers)).unwrap();
        (String::from_utf8(out).unwrap(), summary)
    }

    #[test]
    fn empty_stream() {
        let (out, summary) = run(b"", 2);
        assert!(out.is_empty());
        assert_eq!(summary.lines, 0);
    }

    #[test]
    fn malformed_lines_become_error_records() {
        let input =
            b"{\"id\":\"a\",\"text\":\"flood in Houston\"}\nnot json\n\xff\xfe\n\n{\"id\":7,\"text\":\"x\"}\r\n";
        let (out, summary) = run(input, 3);
        let lines: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0]["mentions"][0]["matched_name"], "houston");
        assert_eq!(lines[1]["line"], 2);
        assert!(lines[2]["error"].as_str().unwrap().contains("UTF-8"));
        assert_eq!(lines[3]["error"], "blank line");
        assert_eq!(lines[4]["id"], "7");
        assert_eq!(summary.errors, 3);
    }

    #[test]
    fn order_independent_of_workers() {
        let input: String = (0..300)
            .map(|i| {
                format!(
                    "{{\"id\":\"t{i}\",\"text\":\"water in {} is rising {i}\"}}\n",
                    if i % 2 == 0 { "Houston" } else { "New Iberia" }
                )
            })
            .collect();
        let (one, _) = run(input.as_bytes(), 1);
        let (four, _) = run(input.as_bytes(), 4);
        assert_eq!(one, four);
        assert_eq!(one.lines().count(), 300);
    }
}
