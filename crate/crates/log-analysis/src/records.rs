use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use affect_chat::{SessionLog, SessionMeta};
use affect_core::control::{ProfileKind, Role};
use affect_core::lexicon::LexiconBundle;
use affect_core::perception::tokenize::words;
use affect_core::perception::{categorize, classify_sentiment, tokenize, SentimentClass, SentimentConfig};
use serde::Serialize;

use crate::AnalysisError;

/// Who produced an utterance, as far as the log metadata tells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ParticipantClass {
    SystemNeutral,
    SystemNegative,
    SystemPositive,
    UserWithNeutral,
    UserWithNegative,
    UserWithPositive,
    Bartender,
    Included,
    Excluded,
}

impl ParticipantClass {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::SystemNeutral => "SystemNeutral",
            Self::SystemNegative => "SystemNegative",
            Self::SystemPositive => "SystemPositive",
            Self::UserWithNeutral => "UserWithNeutral",
            Self::UserWithNegative => "UserWithNegative",
            Self::UserWithPositive => "UserWithPositive",
            Self::Bartender => "Bartender",
            Self::Included => "Included",
            Self::Excluded => "Excluded",
        }
    }

    pub fn is_system(self) -> bool {
        matches!(
            self,
            Self::SystemNeutral | Self::SystemNegative | Self::SystemPositive | Self::Bartender
        )
    }

    /// Class of `sender` in a session described by `meta`.
    pub fn of(sender: &str, meta: &SessionMeta) -> Option<Self> {
        let profile = meta.config.profile;
        if sender == meta.bot_name {
            let triadic = meta.roles.values().any(|r| *r != Role::Single);
            return Some(if triadic {
                Self::Bartender
            } else {
                match profile {
                    ProfileKind::Neutral => Self::SystemNeutral,
                    ProfileKind::Negative => Self::SystemNegative,
                    ProfileKind::Positive => Self::SystemPositive,
                }
            });
        }
        Some(match meta.roles.get(sender)? {
            Role::Included => Self::Included,
            Role::Excluded => Self::Excluded,
            Role::Single => match profile {
                ProfileKind::Neutral => Self::UserWithNeutral,
                ProfileKind::Negative => Self::UserWithNegative,
                ProfileKind::Positive => Self::UserWithPositive,
            },
        })
    }
}

impl fmt::Display for ParticipantClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UtteranceRecord {
    pub room: String,
    pub class: ParticipantClass,
    pub sender: String,
    pub text: String,
    /// Word tokens as counted by the perception tokenizer.
    pub word_count: usize,
    pub sentiment: SentimentClass,
    pub categories: BTreeMap<String, usize>,
}

impl UtteranceRecord {
    pub fn category(&self, id: &str) -> usize {
        self.categories.get(id).copied().unwrap_or(0)
    }
}

/// Lexicons plus sentiment settings used to annotate utterances.
#[derive(Debug, Clone)]
pub struct Analyzer {
    pub bundle: Arc<LexiconBundle>,
    pub sentiment: SentimentConfig,
}

impl Analyzer {
    pub fn new(bundle: Arc<LexiconBundle>, sentiment: SentimentConfig) -> Self {
        Self { bundle, sentiment }
    }

    pub fn record(&self, room: &str, class: ParticipantClass, sender: &str, text: &str) -> UtteranceRecord {
        let tokens = tokenize(text, &self.bundle.modifiers);
        let cats = categorize(&tokens, &self.bundle.categories);
        UtteranceRecord {
            room: room.to_string(),
            class,
            sender: sender.to_string(),
            text: text.to_string(),
            word_count: words(&tokens).count(),
            sentiment: classify_sentiment(&tokens, &self.bundle, &self.sentiment).klass,
            categories: cats.counts,
        }
    }

    pub fn records(&self, log: &SessionLog) -> Result<Vec<UtteranceRecord>, AnalysisError> {
        log.messages
            .iter()
            .map(|m| {
                let class = ParticipantClass::of(&m.sender, &log.meta).ok_or_else(|| {
                    AnalysisError::Format(format!(
                        "{}: interactant {:?} is neither the bot nor in the role assignment",
                        log.meta.room, m.sender
                    ))
                })?;
                Ok(self.record(&log.meta.room, class, &m.sender, &m.text))
            })
            .collect()
    }
}

/// Reads a TSV log and its JSON sidecar into records.
pub fn parse_log(path: &Path, analyzer: &Analyzer) -> Result<Vec<UtteranceRecord>, AnalysisError> {
    analyzer.records(&SessionLog::read(path)?)
}

/// Every `*.tsv` log directly under `dir`, in file-name order.
pub fn parse_log_dir(dir: &Path, analyzer: &Analyzer) -> Result<Vec<UtteranceRecord>, AnalysisError> {
    let entries = fs::read_dir(dir).map_err(|e| AnalysisError::Io(dir.display().to_string(), e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "tsv"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        out.extend(parse_log(&p, analyzer)?);
    }
    Ok(out)
}
