//! Rule-based lexicon sentiment classifier.
//!
//! Scoring runs in a fixed order: base lexicon hits, negation flip,
//! capitalization boost, intensifier/diminisher scaling, a single
//! exclamation boost of the dominant polarity, then emoticon votes.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

use super::tokenize::{Token, TokenKind};
use crate::lexicon::{LexiconBundle, Polarity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SentimentClass {
    Negative,
    Neutral,
    Positive,
}

impl SentimentClass {
    pub const ALL: [SentimentClass; 3] = [Self::Negative, Self::Neutral, Self::Positive];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Negative => "negative",
            Self::Neutral => "neutral",
            Self::Positive => "positive",
        }
    }
}

impl fmt::Display for SentimentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SentimentClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "negative" => Ok(Self::Negative),
            "neutral" => Ok(Self::Neutral),
            "positive" => Ok(Self::Positive),
            other => Err(format!("unknown sentiment class {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentimentResult {
    pub pos_score: f64,
    pub neg_score: f64,
    pub klass: SentimentClass,
}

impl SentimentResult {
    pub fn from_scores(pos_score: f64, neg_score: f64) -> Self {
        let klass = if pos_score > neg_score {
            SentimentClass::Positive
        } else if neg_score > pos_score {
            SentimentClass::Negative
        } else {
            SentimentClass::Neutral
        };
        Self {
            pos_score,
            neg_score,
            klass,
        }
    }

    pub fn score(&self, polarity: Polarity) -> f64 {
        match polarity {
            Polarity::Positive => self.pos_score,
            Polarity::Negative => self.neg_score,
        }
    }
}

/// Named classifier presets selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClassifierVersion {
    /// Lexicon hits with negation only.
    Lexicon,
    /// Full rule pipeline with the default multipliers.
    #[default]
    V3_1,
}

impl FromStr for ClassifierVersion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lexicon" => Ok(Self::Lexicon),
            "v3_1" | "v3.1" => Ok(Self::V3_1),
            other => Err(format!("unknown classifier {other:?} (expected lexicon or v3_1)")),
        }
    }
}

impl fmt::Display for ClassifierVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Lexicon => "lexicon",
            Self::V3_1 => "v3_1",
        })
    }
}

#[derive(Debug, Error)]
pub enum SentimentConfigError {
    #[error("reading {0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("parsing {0}: {1}")]
    Parse(String, #[source] toml::de::Error),
    #[error("invalid sentiment config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SentimentConfig {
    pub caps_multiplier: f64,
    pub exclamation_multiplier: f64,
    /// Word tokens after a negation that get their polarity flipped.
    pub negation_scope: usize,
    pub use_caps: bool,
    pub use_modifiers: bool,
    pub use_exclamation: bool,
    pub use_emoticons: bool,
}

impl Default for SentimentConfig {
    fn default() -> Self {
        Self::preset(ClassifierVersion::V3_1)
    }
}

pub const SENTIMENT_CONFIG_FILE: &str = "sentiment.toml";

impl SentimentConfig {
    pub fn preset(version: ClassifierVersion) -> Self {
        let full = version == ClassifierVersion::V3_1;
        Self {
            caps_multiplier: 1.5,
            exclamation_multiplier: 1.5,
            negation_scope: 2,
            use_caps: full,
            use_modifiers: full,
            use_exclamation: full,
            use_emoticons: full,
        }
    }

    /// Preset overridden by `sentiment.toml` in `lexicon_dir`, if present.
    /// Overrides only apply to the full pipeline preset.
    pub fn load(lexicon_dir: &Path, version: ClassifierVersion) -> Result<Self, SentimentConfigError> {
        let path = lexicon_dir.join(SENTIMENT_CONFIG_FILE);
        let config = if version == ClassifierVersion::V3_1 && path.is_file() {
            let text = fs::read_to_string(&path)
                .map_err(|e| SentimentConfigError::Io(path.display().to_string(), e))?;
            toml::from_str(&text)
                .map_err(|e| SentimentConfigError::Parse(path.display().to_string(), e))?
        } else {
            Self::preset(version)
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), SentimentConfigError> {
        if !(self.caps_multiplier >= 1.0 && self.caps_multiplier.is_finite()) {
            return Err(SentimentConfigError::Invalid("caps_multiplier must be >= 1".into()));
        }
        if !(self.exclamation_multiplier >= 1.0 && self.exclamation_multiplier.is_finite()) {
            return Err(SentimentConfigError::Invalid(
                "exclamation_multiplier must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

pub fn classify_sentiment(
    tokens: &[Token],
    bundle: &LexiconBundle,
    config: &SentimentConfig,
) -> SentimentResult {
    let modifiers = &bundle.modifiers;
    let mut pos = 0.0;
    let mut neg = 0.0;
    let mut negation_left = 0usize;

    for (i, token) in tokens.iter().enumerate() {
        if token.kind != TokenKind::Word {
            negation_left = 0;
            continue;
        }
        let word = token.lower.as_str();
        if modifiers.is_negation(word) {
            negation_left = config.negation_scope;
            continue;
        }
        let negated = negation_left > 0;
        negation_left = negation_left.saturating_sub(1);
        if modifiers.modifier(word).is_some() {
            continue;
        }

        let polarities = [Polarity::Positive, Polarity::Negative]
            .into_iter()
            .filter(|p| bundle.is_polar(word, *p));
        let mut contribution = 1.0;
        if config.use_caps && token.is_all_caps {
            contribution *= config.caps_multiplier;
        }
        if config.use_modifiers && i > 0 {
            let prev = &tokens[i - 1];
            if prev.is_word() {
                if let Some(m) = modifiers.modifier(&prev.lower) {
                    contribution *= m;
                }
            }
        }
        for polarity in polarities {
            let polarity = if negated { polarity.opposite() } else { polarity };
            match polarity {
                Polarity::Positive => pos += contribution,
                Polarity::Negative => neg += contribution,
            }
        }
    }

    if config.use_exclamation && tokens.iter().any(|t| t.is_punct('!')) {
        if pos > neg {
            pos *= config.exclamation_multiplier;
        } else if neg > pos {
            neg *= config.exclamation_multiplier;
        }
    }

    if config.use_emoticons {
        for token in tokens.iter().filter(|t| t.kind == TokenKind::Emoticon) {
            match modifiers.emoticon(&token.surface) {
                Some(Polarity::Positive) => pos += 1.0,
                Some(Polarity::Negative) => neg += 1.0,
                None => {}
            }
        }
    }

    SentimentResult::from_scores(pos, neg)
}
