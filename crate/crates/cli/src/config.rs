//! Declarative pipeline configuration (TOML) and its resolution against the
//! file system.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use toponym::assets;
use toponym::eval::{EvalMode, ScoringOptions};
use toponym::extractor::{AbbreviationDict, ExtractionConfig, Lexicon};
use toponym::gazetteer::{BoundingBox, GazetteerDictionaries, GazetteerFormat};
use toponym::textprep::DEFAULT_MAX_EDIT_DISTANCE;

/// Root for relative dictionary paths.
pub const ASSETS_ENV: &str = "TOPONYM_ASSETS";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    gazetteers: Vec<SourceEntry>,
    bbox: Option<[f64; 4]>,
    #[serde(default)]
    dictionaries: DictionaryPaths,
    spelling_correction: Option<bool>,
    max_edit_distance: Option<usize>,
    partial_tp_credit: Option<f64>,
    eval_mode: Option<String>,
    workers: Option<usize>,
    model_cache: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceEntry {
    path: PathBuf,
    format: String,
    name: Option<String>,
}

/// Overrides for the bundled dictionaries.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DictionaryPaths {
    pub stopwords: Option<PathBuf>,
    pub unigram_frequencies: Option<PathBuf>,
    pub vocabulary: Option<PathBuf>,
    pub usps_suffixes: Option<PathBuf>,
    pub osm_abbreviations: Option<PathBuf>,
    pub category_words: Option<PathBuf>,
    pub bracket_phrases: Option<PathBuf>,
    pub stopnames: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct GazetteerSource {
    pub name: String,
    pub path: PathBuf,
    pub format: GazetteerFormat,
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub gazetteers: Vec<GazetteerSource>,
    pub bbox: Option<BoundingBox>,
    pub dictionaries: DictionaryPaths,
    pub spelling_correction: bool,
    pub max_edit_distance: usize,
    pub partial_tp_credit: f64,
    pub eval_mode: EvalMode,
    pub workers: usize,
    pub model_cache: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            gazetteers: Vec::new(),
            bbox: None,
            dictionaries: DictionaryPaths::default(),
            spelling_correction: false,
            max_edit_distance: DEFAULT_MAX_EDIT_DISTANCE,
            partial_tp_credit: 0.0,
            eval_mode: EvalMode::Standard,
            workers: 1,
            model_cache: None,
        }
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn existing(path: PathBuf, what: &str) -> Result<PathBuf> {
    if !path.exists() {
        bail!("{what} {} does not exist", path.display());
    }
    Ok(path)
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let asset_root = std::env::var_os(ASSETS_ENV).map(PathBuf::from);
        Self::parse(&text, base, asset_root.as_deref()).with_context(|| format!("invalid config {}", path.display()))
    }

    /// Parses config text; relative gazetteer and cache paths resolve
    /// against `base`, relative dictionary paths against `asset_root` when
    /// given.
    pub fn parse(text: &str, base: &Path, asset_root: Option<&Path>) -> Result<Self> {
        let file: FileConfig = toml::from_str(text)?;
        let defaults = Self::default();

        let mut gazetteers = Vec::new();
        for s in file.gazetteers {
            let format: GazetteerFormat = s.format.parse()?;
            let path = existing(resolve(base, &s.path), "gazetteer")?;
            let name = s.name.unwrap_or_else(|| {
                path.file_stem()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default()
            });
            gazetteers.push(GazetteerSource { name, path, format });
        }
        let mut names: Vec<&str> = gazetteers.iter().map(|g| g.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            bail!("gazetteer source names must be distinct (set `name` on each [[gazetteers]] entry)");
        }

        let bbox = file
            .bbox
            .map(|[south, west, north, east]| BoundingBox::new(south, west, north, east))
            .transpose()?;

        let dict_base = asset_root.unwrap_or(base);
        let d = file.dictionaries;
        let dict = |p: Option<PathBuf>, what: &str| -> Result<Option<PathBuf>> {
            p.map(|p| existing(resolve(dict_base, &p), what)).transpose()
        };
        let dictionaries = DictionaryPaths {
            stopwords: dict(d.stopwords, "stop-word list")?,
            unigram_frequencies: dict(d.unigram_frequencies, "unigram frequency list")?,
            vocabulary: dict(d.vocabulary, "vocabulary")?,
            usps_suffixes: dict(d.usps_suffixes, "suffix table")?,
            osm_abbreviations: dict(d.osm_abbreviations, "abbreviation table")?,
            category_words: dict(d.category_words, "category word list")?,
            bracket_phrases: dict(d.bracket_phrases, "bracket phrase list")?,
            stopnames: dict(d.stopnames, "stop-name list")?,
        };

        let partial_tp_credit = file.partial_tp_credit.unwrap_or(defaults.partial_tp_credit);
        if !(0.0..=1.0).contains(&partial_tp_credit) {
            bail!("partial_tp_credit must lie in [0, 1]");
        }
        let eval_mode = match file.eval_mode {
            Some(m) => m.parse().map_err(anyhow::Error::msg)?,
            None => defaults.eval_mode,
        };
        let workers = file.workers.unwrap_or(defaults.workers);
        if workers == 0 {
            bail!("workers must be positive");
        }

        Ok(Self {
            gazetteers,
            bbox,
            dictionaries,
            spelling_correction: file.spelling_correction.unwrap_or(defaults.spelling_correction),
            max_edit_distance: file.max_edit_distance.unwrap_or(defaults.max_edit_distance),
            partial_tp_credit,
            eval_mode,
            workers,
            model_cache: file.model_cache.map(|p| resolve(base, &p)),
        })
    }

    pub fn extraction(&self) -> ExtractionConfig {
        ExtractionConfig {
            spelling_correction: self.spelling_correction,
            max_edit_distance: self.max_edit_distance,
        }
    }

    pub fn scoring(&self) -> ScoringOptions {
        ScoringOptions {
            mode: self.eval_mode,
            partial_tp_credit: self.partial_tp_credit,
        }
    }

    pub fn gazetteer_dictionaries(&self) -> Result<GazetteerDictionaries> {
        let d = &self.dictionaries;
        Ok(GazetteerDictionaries::from_texts(
            &read_or(d.stopnames.as_deref(), assets::STOPNAMES)?,
            &read_or(d.bracket_phrases.as_deref(), assets::BRACKET_PHRASES)?,
            &read_or(d.category_words.as_deref(), assets::CATEGORY_WORDS)?,
        ))
    }

    pub fn lexicon(&self) -> Result<Lexicon> {
        let d = &self.dictionaries;
        let pairs = |p: Option<&Path>, shipped: &str| -> Result<AbbreviationDict> {
            let text = read_or(p, shipped)?;
            AbbreviationDict::parse(&text).with_context(|| format!("bad abbreviation table {}", describe(p)))
        };
        let freq_text = read_or(d.unigram_frequencies.as_deref(), assets::ENGLISH_UNIGRAMS)?;
        let unigram_frequencies = assets::parse_frequencies(&freq_text)
            .with_context(|| format!("bad frequency list {}", describe(d.unigram_frequencies.as_deref())))?;
        let vocabulary = match &d.vocabulary {
            Some(p) => Some(assets::parse_word_list(&read(p)?)),
            None => None,
        };
        Ok(Lexicon {
            stopwords: assets::parse_word_list(&read_or(d.stopwords.as_deref(), assets::STOPWORDS)?),
            unigram_frequencies,
            vocabulary,
            suffixes: pairs(d.usps_suffixes.as_deref(), assets::USPS_SUFFIXES)?,
            osm_abbreviations: pairs(d.osm_abbreviations.as_deref(), assets::OSM_ABBREVIATIONS)?,
        })
    }
}

fn describe(p: Option<&Path>) -> String {
    p.map_or_else(|| "(bundled)".to_string(), |p| p.display().to_string())
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))
}

fn read_or(p: Option<&Path>, shipped: &str) -> Result<String> {
    match p {
        Some(p) => read(p),
        None => Ok(shipped.to_string()),
    }
}
