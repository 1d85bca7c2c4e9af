//! Location mention extraction from short, noisy texts such as tweets.
//!
//! A region's gazetteer is filtered and augmented into name variants, an
//! n-gram model is compiled over their tokens, and tweets are scanned for
//! token sequences the model accepts and the gazetteer names.

pub mod assets;
pub mod cache;
pub mod eval;
pub mod extractor;
pub mod gazetteer;
pub mod langmodel;
pub mod stream;
pub mod synthetic;
pub mod textprep;

pub use cache::ModelBundle;
pub use eval::{aggregate, match_spans, EvalMode, GoldAnnotation, ScoreReport};
pub use extractor::{ExtractionConfig, Extractor, Lexicon, LocationMention};
pub use gazetteer::{
    build_gazetteer, load_gazetteer, Gazetteer, GazetteerDictionaries, GazetteerEntry, GazetteerFormat,
};
pub use langmodel::{compute_model, CompiledModel};
