//! Perception and control layers of a text-based affective dialogue system.
//!
//! * [`lexicon`] loads polarity lists, VAD norms, word categories,
//!   modifiers, emoticons and gazetteers.
//! * [`perception`] turns an utterance into a [`perception::PerceptionReport`].
//! * [`control`] runs the information-state dialogue scripts, the pattern
//!   fallback, affective-profile post-processing and the triadic exclusion
//!   policy.

pub mod control;
pub mod lexicon;
pub mod perception;

use std::path::PathBuf;

/// Directory holding the resources shipped with the repository.
pub fn bundled_data_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data"))
}

/// Lexicon directory: `AFFECT_LEXICON_DIR` when set, else the bundled one.
pub fn default_lexicon_dir() -> PathBuf {
    lexicon::resolve_lexicon_dir(bundled_data_dir().join("lexicons"))
}
