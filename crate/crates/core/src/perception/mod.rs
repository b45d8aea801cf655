//! Perception layer: turns one utterance into a [`PerceptionReport`].

pub mod category;
pub mod cues;
pub mod dialogue_act;
pub mod sentiment;
pub mod tokenize;
pub mod vad;

use std::sync::Arc;

pub use category::{categorize, CategoryProfile};
pub use cues::{
    detect_entities, detect_focus, detect_surface, EntityMention, FocusResult, SurfaceFeatures,
};
pub use dialogue_act::{
    classify_dialogue_act, DaError, DaModel, DialogueAct, DialogueActLabel, LinearDaModel,
    TrainConfig,
};
pub use sentiment::{
    classify_sentiment, ClassifierVersion, SentimentClass, SentimentConfig, SentimentResult,
};
pub use tokenize::{tokenize, Token, TokenKind};
pub use vad::{classify_vad, VadResult};

use crate::lexicon::LexiconBundle;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Utterance {
    pub text: String,
    pub sender: String,
    /// Milliseconds since session start.
    pub timestamp_ms: u64,
    pub addressee_hint: Option<String>,
}

impl Utterance {
    pub fn new(sender: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            sender: sender.into(),
            timestamp_ms: 0,
            addressee_hint: None,
        }
    }

    pub fn at(mut self, timestamp_ms: u64) -> Self {
        self.timestamp_ms = timestamp_ms;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerceptionReport {
    pub tokens: Vec<Token>,
    pub sentiment: SentimentResult,
    pub vad: VadResult,
    pub categories: CategoryProfile,
    pub dialogue_act: DialogueActLabel,
    pub surface: SurfaceFeatures,
    pub entities: Vec<EntityMention>,
    pub focus: FocusResult,
}

impl PerceptionReport {
    pub fn has_entity(&self, gazetteer: &str) -> bool {
        self.entities.iter().any(|e| e.gazetteer == gazetteer)
    }

    pub fn first_entity(&self) -> Option<&EntityMention> {
        self.entities.first()
    }

    pub fn has_word(&self, word: &str) -> bool {
        let word = word.to_lowercase();
        self.tokens.iter().any(|t| t.lower == word)
    }
}

pub fn perceive(
    utterance: &Utterance,
    bundle: &LexiconBundle,
    model: &dyn DaModel,
    config: &SentimentConfig,
) -> PerceptionReport {
    let text = utterance.text.as_str();
    let tokens = tokenize(text, &bundle.modifiers);
    PerceptionReport {
        sentiment: classify_sentiment(&tokens, bundle, config),
        vad: classify_vad(&tokens, &bundle.vad),
        categories: categorize(&tokens, &bundle.categories),
        dialogue_act: model.classify_tokens(&tokens),
        surface: detect_surface(text, &tokens, bundle),
        entities: detect_entities(text, &tokens, &bundle.gazetteers),
        focus: detect_focus(&tokens, bundle),
        tokens,
    }
}

/// Shared, immutable perception resources.
#[derive(Debug, Clone)]
pub struct Perceiver {
    pub bundle: Arc<LexiconBundle>,
    pub model: Arc<dyn DaModel>,
    pub sentiment: SentimentConfig,
}

impl Perceiver {
    pub fn new(bundle: Arc<LexiconBundle>, model: Arc<dyn DaModel>) -> Self {
        Self {
            bundle,
            model,
            sentiment: SentimentConfig::default(),
        }
    }

    pub fn perceive(&self, utterance: &Utterance) -> PerceptionReport {
        perceive(utterance, &self.bundle, self.model.as_ref(), &self.sentiment)
    }

    pub fn perceive_text(&self, text: &str) -> PerceptionReport {
        self.perceive(&Utterance::new("", text))
    }
}
