mod config;

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use toponym::cache::ModelBundle;
use toponym::eval::{self, EvalMode, GoldAnnotation, ScoreReport};
use toponym::extractor::{Extractor, LocationMention};
use toponym::gazetteer::{build_gazetteer, load_gazetteer, GazetteerDictionaries, GazetteerEntry, VariantKind};
use toponym::langmodel::compute_model;
use toponym::stream::{run_stream, ExtractionRecord, StreamOptions};
use toponym::synthetic;

use config::PipelineConfig;

#[derive(Debug, Parser)]
#[command(
    name = "toponym",
    version,
    about = "Extract location mentions from tweets with a region gazetteer"
)]
struct Cli {
    /// Pipeline configuration file (TOML)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Model cache to write (build) or read (extract, evaluate)
    #[arg(long, global = true, value_name = "PATH")]
    model_cache: Option<PathBuf>,
    /// Extraction worker threads
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Spelling correction of out-of-vocabulary tokens
    #[arg(long, global = true, value_enum)]
    spell: Option<Toggle>,
    /// Scoring mode
    #[arg(long, global = true, value_enum)]
    eval_mode: Option<ModeArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Standard,
    #[value(name = "lnex_strict")]
    Strict,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the gazetteer and language model and write the model cache
    Build,
    /// Read {"id", "text"} JSON lines on stdin, write extraction records on stdout
    Extract,
    /// Score predictions against a directory of BRAT .ann/.txt pairs
    Evaluate {
        /// Directory of gold documents
        #[arg(long, value_name = "DIR")]
        gold: PathBuf,
        /// Extraction records (JSON lines) whose ids are document names;
        /// when omitted, the gold texts are extracted line by line
        #[arg(long, value_name = "PATH")]
        predictions: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: ReportFormat,
    },
    /// Measure throughput on a synthetic gazetteer and tweet stream
    Bench {
        /// Minimum number of gazetteer variants
        #[arg(long, default_value_t = 50_000)]
        variants: usize,
        #[arg(long, default_value_t = 10_000)]
        tweets: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

/// A failure with its exit status: 1 for usage and configuration problems,
/// 2 for bad or missing data.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

trait Classify<T> {
    fn usage(self) -> Result<T, Failure>;
    fn data(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn usage(self) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            code: 1,
            error: e.into(),
        })
    }

    fn data(self) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            code: 2,
            error: e.into(),
        })
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut config = match &cli.config {
        Some(p) => PipelineConfig::load(p).usage()?,
        None => PipelineConfig::default(),
    };
    if let Some(p) = &cli.model_cache {
        config.model_cache = Some(p.clone());
    }
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(anyhow!("--workers must be positive")).usage();
        }
        config.workers = n;
    }
    if let Some(s) = cli.spell {
        config.spelling_correction = matches!(s, Toggle::On);
    }
    if let Some(m) = cli.eval_mode {
        config.eval_mode = match m {
            ModeArg::Standard => EvalMode::Standard,
            ModeArg::Strict => EvalMode::Strict,
        };
    }
    match cli.command {
        Command::Build => cmd_build(&config),
        Command::Extract => cmd_extract(&config),
        Command::Evaluate {
            gold,
            predictions,
            format,
        } => cmd_evaluate(&config, &gold, predictions.as_deref(), format),
        Command::Bench { variants, tweets, seed } => cmd_bench(&config, variants, tweets, seed),
    }
}

fn cache_path(config: &PipelineConfig) -> Result<&Path, Failure> {
    config
        .model_cache
        .as_deref()
        .ok_or_else(|| anyhow!("no model cache given (use --model-cache or model_cache in the config)"))
        .usage()
}

fn load_entries(config: &PipelineConfig) -> Result<Vec<GazetteerEntry>, Failure> {
    if config.gazetteers.is_empty() {
        return Err(anyhow!("the config lists no [[gazetteers]]")).usage();
    }
    let qualify = config.gazetteers.len() > 1;
    let mut all = Vec::new();
    for source in &config.gazetteers {
        let entries = load_gazetteer(&source.path, source.format, config.bbox.as_ref()).data()?;
        log::info!("{}: {} records", source.path.display(), entries.len());
        all.extend(entries.into_iter().map(|mut e| {
            if qualify {
                e.id = format!("{}:{}", source.name, e.id);
            }
            e
        }));
    }
    Ok(all)
}

fn cmd_build(config: &PipelineConfig) -> Result<(), Failure> {
    let out = cache_path(config)?;
    let dictionaries: GazetteerDictionaries = config.gazetteer_dictionaries().usage()?;
    let entries = load_entries(config)?;
    let gazetteer = build_gazetteer(entries, &dictionaries).data()?;
    if gazetteer.is_empty() {
        return Err(anyhow!("the gazetteer has no names left after filtering")).data();
    }
    let model = compute_model(&gazetteer).data()?;

    let mut by_kind: BTreeMap<VariantKind, usize> = BTreeMap::new();
    for v in gazetteer.variants().values() {
        *by_kind.entry(v.kind).or_insert(0) += 1;
    }
    let c = &model.counts;
    let unigrams = c.unigram_counts.len();
    let bigrams: usize = c.bigram_cfd.values().map(|r| r.successors.len()).sum();
    let trigrams: usize = c
        .trigram_cfd
        .values()
        .flat_map(|m| m.values())
        .map(|r| r.successors.len())
        .sum();

    let bundle = ModelBundle { gazetteer, model };
    bundle.save(out).data()?;

    let mut stdout = io::stdout().lock();
    let g = &bundle.gazetteer;
    let kinds = [
        ("original", VariantKind::Original),
        ("bracket_alternative", VariantKind::BracketAlternative),
        ("hyphen_split", VariantKind::HyphenSplit),
        ("skipgram", VariantKind::Skipgram),
    ];
    let mut lines = vec![
        format!("entries               {}", g.entries().len()),
        format!("variants              {}", g.len()),
    ];
    for (label, kind) in kinds {
        lines.push(format!("  {label:<20}{}", by_kind.get(&kind).copied().unwrap_or(0)));
    }
    lines.push(format!("unigrams              {unigrams}"));
    lines.push(format!("bigrams               {bigrams}"));
    lines.push(format!("trigrams              {trigrams}"));
    lines.push(format!("cache                 {}", out.display()));
    writeln!(stdout, "{}", lines.join("\n")).data()
}

fn load_extractor(config: &PipelineConfig) -> Result<Extractor, Failure> {
    let path = cache_path(config)?;
    let lexicon = config.lexicon().usage()?;
    let bundle = ModelBundle::load(path).data()?;
    Ok(Extractor::new(
        bundle.gazetteer,
        bundle.model,
        lexicon,
        config.extraction(),
    ))
}

fn cmd_extract(config: &PipelineConfig) -> Result<(), Failure> {
    let extractor = load_extractor(config)?;
    let stdin = BufReader::new(io::stdin());
    let stdout = io::BufWriter::new(io::stdout().lock());
    let summary = match run_stream(&extractor, stdin, stdout, StreamOptions::with_workers(config.workers)) {
        Ok(s) => s,
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => return Ok(()),
        Err(e) => return Err(e).data(),
    };
    eprintln!(
        "extracted {} lines ({} errors, {} mentions) in {:.2}s: {:.0} tweets/s",
        summary.lines,
        summary.errors,
        summary.mentions,
        summary.elapsed.as_secs_f64(),
        summary.lines_per_second()
    );
    Ok(())
}

#[derive(Serialize)]
struct DocumentReport {
    id: String,
    #[serde(flatten)]
    score: ScoreReport,
}

#[derive(Serialize)]
struct EvaluationReport {
    mode: String,
    partial_tp_credit: f64,
    documents: Vec<DocumentReport>,
    aggregate: ScoreReport,
    /// Gold documents without any prediction record; their inLoc spans
    /// count as false negatives.
    missing_predictions: Vec<String>,
    /// Prediction ids with no gold document; not scored.
    unknown_predictions: Vec<String>,
}

struct GoldDocument {
    id: String,
    text: String,
    annotations: Vec<GoldAnnotation>,
}

fn load_gold_dir(dir: &Path) -> Result<Vec<GoldDocument>, Failure> {
    let listing = std::fs::read_dir(dir)
        .with_context(|| format!("cannot read gold directory {}", dir.display()))
        .data()?;
    let mut anns: Vec<PathBuf> = Vec::new();
    for entry in listing {
        let path = entry.data()?.path();
        if path.extension().is_some_and(|e| e == "ann") {
            anns.push(path);
        }
    }
    anns.sort();
    let mut docs = Vec::new();
    for ann in anns {
        let txt = ann.with_extension("txt");
        let mut annotations = eval::load_annotations(&ann, &txt).data()?;
        let text = std::fs::read_to_string(&txt).data()?;
        eval::normalize_hashtag_spans(&text, &mut annotations);
        let id = ann
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        docs.push(GoldDocument { id, text, annotations });
    }
    if docs.is_empty() {
        return Err(anyhow!("no .ann files in {}", dir.display())).data();
    }
    Ok(docs)
}

/// Predicted mentions by document id, from extraction records.
fn read_predictions(path: &Path) -> Result<BTreeMap<String, Vec<LocationMention>>, Failure> {
    let file = std::fs::File::open(path)
        .with_context(|| format!("cannot open predictions {}", path.display()))
        .data()?;
    let mut out: BTreeMap<String, Vec<LocationMention>> = BTreeMap::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| format!("{}:{}", path.display(), i + 1)).data()?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}: not JSON", path.display(), i + 1))
            .data()?;
        if value.get("error").is_some() {
            if let Some(id) = value.get("id").and_then(|v| v.as_str()) {
                out.entry(id.to_string()).or_default();
            }
            continue;
        }
        let record: ExtractionRecord = serde_json::from_value(value)
            .with_context(|| format!("{}:{}: not an extraction record", path.display(), i + 1))
            .data()?;
        out.entry(record.id).or_default().extend(record.mentions);
    }
    Ok(out)
}

/// Extracts each line of a document, with offsets shifted to the document.
fn extract_document(extractor: &Extractor, text: &str) -> Vec<LocationMention> {
    let mut out = Vec::new();
    let mut offset = 0;
    for line in text.split('\n') {
        for mut m in extractor.extract(line) {
            m.char_start += offset;
            m.char_end += offset;
            out.push(m);
        }
        offset += line.chars().count() + 1;
    }
    out
}

fn cmd_evaluate(
    config: &PipelineConfig,
    gold: &Path,
    predictions: Option<&Path>,
    format: ReportFormat,
) -> Result<(), Failure> {
    let docs = load_gold_dir(gold)?;
    let mut predicted = match predictions {
        Some(p) => read_predictions(p)?,
        None => {
            let extractor = load_extractor(config)?;
            docs.iter()
                .map(|d| (d.id.clone(), extract_document(&extractor, &d.text)))
                .collect()
        }
    };

    let options = config.scoring();
    let mut documents = Vec::new();
    let mut missing = Vec::new();
    for doc in &docs {
        let mentions = predicted.remove(&doc.id).unwrap_or_else(|| {
            missing.push(doc.id.clone());
            Vec::new()
        });
        let score = eval::match_spans(&mentions, &doc.annotations, options);
        documents.push(DocumentReport {
            id: doc.id.clone(),
            score,
        });
    }
    let unknown: BTreeSet<String> = predicted.into_keys().collect();
    let scores: Vec<ScoreReport> = documents.iter().map(|d| d.score).collect();
    let report = EvaluationReport {
        mode: config.eval_mode.to_string(),
        partial_tp_credit: config.partial_tp_credit,
        aggregate: eval::aggregate(&scores).data()?,
        documents,
        missing_predictions: missing,
        unknown_predictions: unknown.into_iter().collect(),
    };
    for id in &report.missing_predictions {
        log::warn!("no predictions for gold document {id}");
    }
    for id in &report.unknown_predictions {
        log::warn!("predictions for unknown document {id} ignored");
    }

    let mut stdout = io::stdout().lock();
    let text = match format {
        ReportFormat::Json => serde_json::to_string_pretty(&report).expect("report serializes"),
        ReportFormat::Table => {
            let mut rows: Vec<(String, ScoreReport)> =
                report.documents.iter().map(|d| (d.id.clone(), d.score)).collect();
            rows.push(("TOTAL".into(), report.aggregate));
            eval::render_table(&rows).trim_end().to_string()
        }
    };
    writeln!(stdout, "{text}").data()
}

fn peak_rss_kb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn cmd_bench(config: &PipelineConfig, min_variants: usize, tweets: usize, seed: u64) -> Result<(), Failure> {
    let dictionaries = config.gazetteer_dictionaries().usage()?;
    let lexicon = config.lexicon().usage()?;
    let started = Instant::now();
    let mut n = (min_variants / 2).max(1);
    let gazetteer = loop {
        let g = build_gazetteer(synthetic::gazetteer_entries(n, seed), &dictionaries).data()?;
        if g.len() >= min_variants {
            break g;
        }
        n += n / 2 + 1;
    };
    let names: Vec<String> = gazetteer.entries().values().map(|e| e.canonical_name.clone()).collect();
    let model = compute_model(&gazetteer).data()?;
    let variants = gazetteer.len();
    let extractor = Extractor::new(gazetteer, model, lexicon, config.extraction());
    let build_secs = started.elapsed().as_secs_f64();

    let input = synthetic::jsonl(&synthetic::tweets(&names, tweets, seed));
    let summary = run_stream(
        &extractor,
        input.as_bytes(),
        io::sink(),
        StreamOptions::with_workers(config.workers),
    )
    .data()?;

    let rss = peak_rss_kb().map_or_else(
        || "unavailable".to_string(),
        |kb| format!("{:.1} MB", kb as f64 / 1024.0),
    );
    let mut stdout = io::stdout().lock();
    writeln!(
        stdout,
        "gazetteer entries     {}\nvariants              {variants}\nbuild time            {build_secs:.2}s\n\
         tweets                {}\nworkers               {}\nmentions              {}\nextract time          {:.2}s\n\
         throughput            {:.0} tweets/s\npeak resident memory  {rss}",
        names.len(),
        summary.lines,
        config.workers,
        summary.mentions,
        summary.elapsed.as_secs_f64(),
        summary.lines_per_second()
    )
    .data()
}
