//! Gazetteer ingestion, filtering and skip-gram augmentation.
//!
//! Raw records from Geonames dumps or OSM/generic JSON exports are loaded as
//! [`GazetteerEntry`] values. [`build_gazetteer`] then cleans each name
//! (removable bracketed tags, bracketed alternative names, spaced-hyphen
//! splits), adds contracted skip-gram variants for names ending in a
//! category word, drops gazetteer stop names, and produces the immutable
//! [`Gazetteer`] the language model is compiled from.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assets::{self, AssetError};
use crate::textprep::name_tokens;

/// Names with more tokens than this only get their full form; the interior
/// subsets of longer names would grow as 2^(m-2).
pub const MAX_SKIPGRAM_TOKENS: usize = 12;

#[derive(Debug, Error)]
pub enum GazetteerError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: record {index}: {message}")]
    Malformed {
        path: String,
        index: usize,
        message: String,
    },
    #[error("unknown gazetteer format {0:?} (expected geonames_tsv, osm_json or generic_json)")]
    UnknownFormat(String),
    #[error("duplicate entry id {0:?}")]
    DuplicateId(String),
    #[error("invalid bounding box: {0}")]
    BadBoundingBox(String),
    #[error(transparent)]
    Asset(#[from] AssetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Osm,
    Geonames,
    Dbpedia,
    Generic,
}

/// One named place as loaded from a source file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazetteerEntry {
    pub id: String,
    pub canonical_name: String,
    pub latitude: Option<f64>,
    pub longitude: Option<f64>,
    pub source: Source,
    #[serde(default)]
    pub extra: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GazetteerFormat {
    GeonamesTsv,
    OsmJson,
    GenericJson,
}

impl FromStr for GazetteerFormat {
    type Err = GazetteerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "geonames_tsv" => Ok(Self::GeonamesTsv),
            "osm_json" => Ok(Self::OsmJson),
            "generic_json" => Ok(Self::GenericJson),
            other => Err(GazetteerError::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for GazetteerFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::GeonamesTsv => "geonames_tsv",
            Self::OsmJson => "osm_json",
            Self::GenericJson => "generic_json",
        })
    }
}

/// Latitude/longitude window in decimal degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub south: f64,
    pub west: f64,
    pub north: f64,
    pub east: f64,
}

impl BoundingBox {
    pub fn new(south: f64, west: f64, north: f64, east: f64) -> Result<Self, GazetteerError> {
        let ok = [south, west, north, east].iter().all(|v| v.is_finite())
            && south < north
            && west < east
            && (-90.0..=90.0).contains(&south)
            && (-90.0..=90.0).contains(&north)
            && (-180.0..=180.0).contains(&west)
            && (-180.0..=180.0).contains(&east);
        if ok {
            Ok(Self {
                south,
                west,
                north,
                east,
            })
        } else {
            Err(GazetteerError::BadBoundingBox(format!(
                "south={south} west={west} north={north} east={east}"
            )))
        }
    }

    pub fn contains(&self, lat: f64, lon: f64) -> bool {
        (self.south..=self.north).contains(&lat) && (self.west..=self.east).contains(&lon)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonId {
    Text(String),
    Number(serde_json::Number),
}

impl JsonId {
    fn into_string(self) -> String {
        match self {
            JsonId::Text(s) => s,
            JsonId::Number(n) => n.to_string(),
        }
    }
}

#[derive(Deserialize)]
struct JsonRecord {
    id: JsonId,
    name: String,
    #[serde(default)]
    lat: Option<f64>,
    #[serde(default)]
    lon: Option<f64>,
    #[serde(default)]
    tags: BTreeMap<String, serde_json::Value>,
}

/// Loads gazetteer records, keeping only records inside `bbox` when a box is
/// given and the record has coordinates. Records with a blank name are
/// skipped: they are unnamed features, not location names.
pub fn load_gazetteer(
    path: &Path,
    format: GazetteerFormat,
    bbox: Option<&BoundingBox>,
) -> Result<Vec<GazetteerEntry>, GazetteerError> {
    let text = fs::read_to_string(path).map_err(|source| GazetteerError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let display = path.display().to_string();
    let entries = match format {
        GazetteerFormat::GeonamesTsv => parse_geonames(&text, &display)?,
        GazetteerFormat::OsmJson => parse_json(&text, &display, Source::Osm)?,
        GazetteerFormat::GenericJson => parse_json(&text, &display, Source::Generic)?,
    };
    let mut seen = BTreeSet::new();
    for e in &entries {
        if !seen.insert(e.id.as_str()) {
            return Err(GazetteerError::DuplicateId(e.id.clone()));
        }
    }
    Ok(entries
        .into_iter()
        .filter(|e| !e.canonical_name.trim().is_empty())
        .filter(|e| match (bbox, e.latitude, e.longitude) {
            (Some(b), Some(lat), Some(lon)) => b.contains(lat, lon),
            _ => true,
        })
        .collect())
}

const GEONAMES_FIELDS: usize = 19;

fn parse_geonames(text: &str, path: &str) -> Result<Vec<GazetteerEntry>, GazetteerError> {
    let malformed = |index: usize, message: String| GazetteerError::Malformed {
        path: path.to_string(),
        index,
        message,
    };
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != GEONAMES_FIELDS {
            return Err(malformed(
                line_no,
                format!(
                    "expected {GEONAMES_FIELDS} tab-separated fields, found {}",
                    fields.len()
                ),
            ));
        }
        let coord = |idx: usize, what: &str| -> Result<Option<f64>, GazetteerError> {
            let raw = fields[idx].trim();
            if raw.is_empty() {
                return Ok(None);
            }
            raw.parse::<f64>()
                .map(Some)
                .map_err(|e| malformed(line_no, format!("bad {what} {raw:?}: {e}")))
        };
        let latitude = coord(4, "latitude")?;
        let longitude = coord(5, "longitude")?;
        let mut extra = BTreeMap::new();
        for (key, idx) in [
            ("asciiname", 2),
            ("feature_class", 6),
            ("feature_code", 7),
            ("country_code", 8),
            ("admin1_code", 10),
            ("population", 14),
        ] {
            if !fields[idx].is_empty() {
                extra.insert(key.to_string(), fields[idx].to_string());
            }
        }
        out.push(GazetteerEntry {
            id: fields[0].to_string(),
            canonical_name: fields[1].to_string(),
            latitude,
            longitude,
            source: Source::Geonames,
            extra,
        });
    }
    Ok(out)
}

fn parse_json(text: &str, path: &str, source: Source) -> Result<Vec<GazetteerEntry>, GazetteerError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let values: Vec<serde_json::Value> = serde_json::from_str(text).map_err(|e| GazetteerError::Malformed {
        path: path.to_string(),
        index: 0,
        message: format!("not a JSON array: {e}"),
    })?;
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let rec: JsonRecord = serde_json::from_value(v).map_err(|e| GazetteerError::Malformed {
                path: path.to_string(),
                index: i,
                message: e.to_string(),
            })?;
            let extra = rec
                .tags
                .into_iter()
                .map(|(k, v)| match v {
                    serde_json::Value::String(s) => (k, s),
                    other => (k, other.to_string()),
                })
                .collect();
            Ok(GazetteerEntry {
                id: rec.id.into_string(),
                canonical_name: rec.name,
                latitude: rec.lat,
                longitude: rec.lon,
                source,
                extra,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    Original,
    BracketAlternative,
    HyphenSplit,
    Skipgram,
}

impl VariantKind {
    /// Whether a surface of this kind stands for a place on its own.
    pub fn is_standalone(self) -> bool {
        matches!(self, Self::Original | Self::BracketAlternative)
    }
}

/// A matchable surface form and the entries it links to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameVariant {
    pub surface: String,
    pub kind: VariantKind,
    pub entry_ids: BTreeSet<String>,
}

/// Lowercases and collapses whitespace.
pub fn normalize_surface(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Normalizes a removable bracket phrase: brackets stripped, case-folded.
pub fn normalize_phrase(s: &str) -> String {
    let s = s.trim();
    let s = s.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(s);
    normalize_surface(s)
}

/// Cleans one raw name into its primary surface plus bracket alternatives
/// and spaced-hyphen splits.
///
/// Bracketed content listed in `phrases` is deleted; other bracketed content
/// becomes a `BracketAlternative`. A primary surface with exactly one
/// `" - "` yields both sides as `HyphenSplit` surfaces. Names with
/// unbalanced brackets are returned folded but otherwise unchanged.
pub fn filter_entry(name: &str, phrases: &BTreeSet<String>) -> Vec<(String, VariantKind)> {
    let folded = normalize_surface(name);
    if folded.is_empty() {
        return Vec::new();
    }
    let Some((outside, groups)) = split_brackets(&folded) else {
        return vec![(folded, VariantKind::Original)];
    };

    let primary = normalize_surface(&outside);
    let mut out: Vec<(String, VariantKind)> = Vec::new();
    if !primary.is_empty() {
        out.push((primary.clone(), VariantKind::Original));
    }
    for group in groups {
        let alt = normalize_surface(&group);
        if alt.is_empty() || phrases.contains(&alt) || out.iter().any(|(s, _)| *s == alt) {
            continue;
        }
        out.push((alt, VariantKind::BracketAlternative));
    }
    if !primary.is_empty() && primary.matches(" - ").count() == 1 {
        let (left, right) = primary.split_once(" - ").expect("one separator");
        for side in [left.trim(), right.trim()] {
            if !side.is_empty() && side != "-" && !out.iter().any(|(s, _)| s == side) {
                out.push((side.to_string(), VariantKind::HyphenSplit));
            }
        }
    }
    out
}

/// Splits off top-level `( … )` groups; `None` when brackets do not balance.
fn split_brackets(s: &str) -> Option<(String, Vec<String>)> {
    let mut outside = String::new();
    let mut groups = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for c in s.chars() {
        match c {
            '(' => {
                if depth > 0 {
                    current.push(c);
                } else {
                    outside.push(' ');
                }
                depth += 1;
            }
            ')' => {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    groups.push(std::mem::take(&mut current));
                } else {
                    current.push(c);
                }
            }
            _ if depth > 0 => current.push(c),
            _ => outside.push(c),
        }
    }
    (depth == 0).then_some((outside, groups))
}

/// Skip-gram contractions of a name: every subsequence that keeps the first
/// and last token, when the name has at least three tokens and ends in a
/// category word. Otherwise only the full name.
pub fn skipgram_variants<S: AsRef<str>>(name_tokens: &[S], category_words: &BTreeSet<String>) -> BTreeSet<String> {
    let tokens: Vec<&str> = name_tokens.iter().map(|t| t.as_ref()).collect();
    let m = tokens.len();
    let mut out = BTreeSet::new();
    if m == 0 {
        return out;
    }
    out.insert(tokens.join(" "));
    if m <= 2 || m > MAX_SKIPGRAM_TOKENS || !category_words.contains(tokens[m - 1]) {
        return out;
    }
    let interior = &tokens[1..m - 1];
    for mask in 0u32..(1u32 << interior.len()) {
        let mut parts = Vec::with_capacity(m);
        parts.push(tokens[0]);
        parts.extend(
            interior
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, t)| *t),
        );
        parts.push(tokens[m - 1]);
        out.insert(parts.join(" "));
    }
    out
}

/// Dictionaries that shape a gazetteer build.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GazetteerDictionaries {
    pub stopnames: BTreeSet<String>,
    pub phrases: BTreeSet<String>,
    pub category_words: BTreeSet<String>,
}

impl GazetteerDictionaries {
    /// The dictionaries bundled with the crate.
    pub fn shipped() -> Self {
        Self::from_texts(assets::STOPNAMES, assets::BRACKET_PHRASES, assets::CATEGORY_WORDS)
    }

    pub fn from_texts(stopnames: &str, phrases: &str, category_words: &str) -> Self {
        Self {
            stopnames: assets::parse_word_list(stopnames).into_iter().collect(),
            phrases: assets::parse_word_list(phrases)
                .iter()
                .map(|p| normalize_phrase(p))
                .collect(),
            category_words: assets::parse_word_list(category_words).into_iter().collect(),
        }
    }
}

/// Token-key lookup result: every surface whose name tokens join to the key
/// and the union of their entry ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenLink {
    pub surfaces: Vec<String>,
    pub entry_ids: BTreeSet<String>,
}

/// Immutable, cleaned and augmented gazetteer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gazetteer {
    entries: BTreeMap<String, GazetteerEntry>,
    variants: BTreeMap<String, NameVariant>,
    category_words: BTreeSet<String>,
    stopnames: BTreeSet<String>,
    /// Space-joined name tokens → matching surfaces.
    token_index: BTreeMap<String, TokenLink>,
}

impl Gazetteer {
    pub fn variants(&self) -> &BTreeMap<String, NameVariant> {
        &self.variants
    }

    pub fn variant(&self, surface: &str) -> Option<&NameVariant> {
        self.variants.get(surface)
    }

    pub fn entries(&self) -> &BTreeMap<String, GazetteerEntry> {
        &self.entries
    }

    pub fn entry(&self, id: &str) -> Option<&GazetteerEntry> {
        self.entries.get(id)
    }

    pub fn category_words(&self) -> &BTreeSet<String> {
        &self.category_words
    }

    pub fn stopnames(&self) -> &BTreeSet<String> {
        &self.stopnames
    }

    pub fn len(&self) -> usize {
        self.variants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variants.is_empty()
    }

    /// Looks up a token sequence (already case-folded) as a full name.
    pub fn lookup_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> Option<&TokenLink> {
        let key = tokens.iter().map(|t| t.as_ref()).collect::<Vec<_>>().join(" ");
        self.token_index.get(&key)
    }

    /// Name tokens of every variant surface, in surface order.
    pub fn variant_tokens(&self) -> impl Iterator<Item = Vec<String>> + '_ {
        self.variants.keys().map(|s| name_tokens(s))
    }
}

/// Applies filtering and skip-gram augmentation to every entry.
///
/// Standalone surfaces (primary names and bracket alternatives) are added
/// first. Hyphen splits follow, except where the split already names a
/// standalone place. Skip-gram contractions of every surface come last: a
/// contraction that collides with an existing surface merges its entry ids
/// into it. Stop names are removed at the end, as are surfaces without any
/// name token.
pub fn build_gazetteer(
    entries: Vec<GazetteerEntry>,
    dictionaries: &GazetteerDictionaries,
) -> Result<Gazetteer, GazetteerError> {
    let mut by_id: BTreeMap<String, GazetteerEntry> = BTreeMap::new();
    for entry in entries {
        if by_id.contains_key(&entry.id) {
            return Err(GazetteerError::DuplicateId(entry.id));
        }
        by_id.insert(entry.id.clone(), entry);
    }

    let filtered: Vec<(&str, Vec<(String, VariantKind)>)> = by_id
        .iter()
        .map(|(id, e)| (id.as_str(), filter_entry(&e.canonical_name, &dictionaries.phrases)))
        .collect();

    let mut variants: BTreeMap<String, NameVariant> = BTreeMap::new();
    let add = |variants: &mut BTreeMap<String, NameVariant>, surface: &str, kind: VariantKind, id: &str| {
        let v = variants.entry(surface.to_string()).or_insert_with(|| NameVariant {
            surface: surface.to_string(),
            kind,
            entry_ids: BTreeSet::new(),
        });
        v.kind = v.kind.min(kind);
        v.entry_ids.insert(id.to_string());
    };

    for (id, surfaces) in &filtered {
        for (surface, kind) in surfaces.iter().filter(|(_, k)| k.is_standalone()) {
            add(&mut variants, surface, *kind, id);
        }
    }
    for (id, surfaces) in &filtered {
        for (surface, _) in surfaces.iter().filter(|(_, k)| *k == VariantKind::HyphenSplit) {
            match variants.get(surface) {
                Some(existing) if existing.kind.is_standalone() => {}
                _ => add(&mut variants, surface, VariantKind::HyphenSplit, id),
            }
        }
    }
    let sources: Vec<(String, BTreeSet<String>)> = variants
        .values()
        .map(|v| (v.surface.clone(), v.entry_ids.clone()))
        .collect();
    for (surface, ids) in sources {
        let words: Vec<&str> = surface.split(' ').collect();
        for derived in skipgram_variants(&words, &dictionaries.category_words) {
            if derived == surface {
                continue;
            }
            for id in &ids {
                add(&mut variants, &derived, VariantKind::Skipgram, id);
            }
        }
    }

    variants.retain(|surface, _| !dictionaries.stopnames.contains(surface));
    variants.retain(|surface, _| !name_tokens(surface).is_empty());

    let mut token_index: BTreeMap<String, TokenLink> = BTreeMap::new();
    for v in variants.values() {
        let link = token_index
            .entry(name_tokens(&v.surface).join(" "))
            .or_insert_with(|| TokenLink {
                surfaces: Vec::new(),
                entry_ids: BTreeSet::new(),
            });
        link.surfaces.push(v.surface.clone());
        link.entry_ids.extend(v.entry_ids.iter().cloned());
    }

    if variants.is_empty() {
        log::warn!("gazetteer build produced no variants; extraction will find nothing");
    }
    Ok(Gazetteer {
        entries: by_id,
        variants,
        category_words: dictionaries.category_words.clone(),
        stopnames: dictionaries.stopnames.clone(),
        token_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(id: &str, name: &str) -> GazetteerEntry {
        GazetteerEntry {
            id: id.into(),
            canonical_name: name.into(),
            latitude: None,
            longitude: None,
            source: Source::Generic,
            extra: BTreeMap::new(),
        }
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn dicts() -> GazetteerDictionaries {
        GazetteerDictionaries {
            stopnames: set(&["boring"]),
            phrases: set(&["historical", "private road"]),
            category_words: set(&["school", "road", "street"]),
        }
    }

    #[test]
    fn removable_tag_is_deleted() {
        let phrases = set(&[&normalize_phrase("(historical)")]);
        assert_eq!(
            filter_entry("Little Rock School (historical)", &phrases),
            vec![("little rock school".to_string(), VariantKind::Original)]
        );
    }

    #[test]
    fn bracket_alternative_is_kept() {
        assert_eq!(
            filter_entry("Scenic Road (Frontage Road)", &set(&["historical"])),
            vec![
                ("scenic road".to_string(), VariantKind::Original),
                ("frontage road".to_string(), VariantKind::BracketAlternative),
            ]
        );
        assert_eq!(
            filter_entry("International House of Pancakes (IHOP)", &BTreeSet::new())[1],
            ("ihop".to_string(), VariantKind::BracketAlternative)
        );
    }

    #[test]
    fn spaced_hyphen_splits() {
        assert_eq!(
            filter_entry("Cars India - Adyar", &BTreeSet::new()),
            vec![
                ("cars india - adyar".to_string(), VariantKind::Original),
                ("cars india".to_string(), VariantKind::HyphenSplit),
                ("adyar".to_string(), VariantKind::HyphenSplit),
            ]
        );
        assert_eq!(filter_entry("Winston-Salem", &BTreeSet::new()).len(), 1);
        assert_eq!(filter_entry("A - B - C", &BTreeSet::new()).len(), 1);
    }

    #[test]
    fn plain_and_degenerate_names() {
        assert_eq!(
            filter_entry("Houston", &BTreeSet::new()),
            vec![("houston".to_string(), VariantKind::Original)]
        );
        assert_eq!(
            filter_entry("Foo (bar", &BTreeSet::new()),
            vec![("foo (bar".to_string(), VariantKind::Original)]
        );
        assert!(filter_entry("(Private Road)", &set(&["private road"])).is_empty());
    }

    #[test]
    fn skipgrams_of_category_name() {
        let tokens = ["balalok", "matriculation", "higher", "secondary", "school"];
        let v = skipgram_variants(&tokens, &set(&["school"]));
        assert_eq!(v.len(), 8);
        assert!(v.contains("balalok school"));
        assert!(v.contains("balalok secondary school"));
        assert!(v.contains("balalok matriculation higher secondary school"));
    }

    #[test]
    fn skipgrams_need_category_tail() {
        assert_eq!(
            skipgram_variants(&["new", "york"], &set(&["school"])),
            set(&["new york"])
        );
        let v = skipgram_variants(&["city", "college", "of", "new", "york"], &set(&["school", "college"]));
        assert_eq!(v, set(&["city college of new york"]));
        assert!(!v.contains("city york"));
    }

    #[test]
    fn hyphen_split_does_not_steal_standalone_entity() {
        let g = build_gazetteer(vec![entry("1", "Pilot - Hammond"), entry("2", "Hammond")], &dicts()).unwrap();
        assert_eq!(g.variant("hammond").unwrap().entry_ids, set(&["2"]));
        assert_eq!(g.variant("pilot").unwrap().entry_ids, set(&["1"]));
        assert_eq!(g.variant("pilot").unwrap().kind, VariantKind::HyphenSplit);
    }

    #[test]
    fn stopnames_are_removed() {
        let g = build_gazetteer(vec![entry("1", "Boring"), entry("2", "Houston")], &dicts()).unwrap();
        assert!(g.variant("boring").is_none());
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn single_entry_single_variant() {
        let g = build_gazetteer(vec![entry("1", "Houston")], &dicts()).unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn skipgram_collision_merges_ids() {
        let g = build_gazetteer(vec![entry("1", "Oak Grove Road"), entry("2", "Oak Road")], &dicts()).unwrap();
        let v = g.variant("oak road").unwrap();
        assert_eq!(v.kind, VariantKind::Original);
        assert_eq!(v.entry_ids, set(&["1", "2"]));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = build_gazetteer(vec![entry("1", "A"), entry("1", "B")], &dicts()).unwrap_err();
        assert!(matches!(err, GazetteerError::DuplicateId(_)));
    }

    #[test]
    fn token_index_ignores_punctuation() {
        let g = build_gazetteer(vec![entry("1", "Cars India - Adyar")], &dicts()).unwrap();
        let link = g.lookup_tokens(&["cars", "india", "adyar"]).unwrap();
        assert_eq!(link.surfaces, vec!["cars india - adyar".to_string()]);
    }

    #[test]
    fn unknown_format_is_config_error() {
        assert!(matches!(
            "shapefile".parse::<GazetteerFormat>(),
            Err(GazetteerError::UnknownFormat(_))
        ));
    }

    #[test]
    fn bounding_box_must_be_ordered() {
        assert!(BoundingBox::new(13.0, 80.0, 13.2, 80.3).is_ok());
        assert!(BoundingBox::new(13.2, 80.0, 13.0, 80.3).is_err());
        assert!(BoundingBox::new(13.0, 80.3, 13.2, 80.0).is_err());
    }

    #[test]
    fn shipped_dictionaries_load() {
        let d = GazetteerDictionaries::shipped();
        assert!(d.category_words.contains("school"));
        assert!(d.phrases.contains("historical"));
        assert!(d.stopnames.contains("boring"));
    }
}
