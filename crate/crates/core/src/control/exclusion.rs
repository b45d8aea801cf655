//! Triadic social-exclusion policy.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::Rng;
use serde::Deserialize;

use super::state::InformationState;
use super::{ControlError, Role};
use crate::lexicon::ModifierTables;
use crate::perception::{tokenize, DialogueAct, PerceptionReport, TokenKind};

pub const REQUIRED_SHORT_ANSWERS: [&str; 4] = ["yes", "no", "perhaps", "hmm"];
pub const SHORT_MAX_WORDS: usize = 5;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExclusionPolicy {
    pub short_answers: Vec<String>,
    pub omission_probability: f64,
    pub omission_start_turn: usize,
    pub redirect_probability: f64,
    pub included_query_probability: f64,
    pub redirect_template: String,
    pub included_query_template: String,
}

impl Default for ExclusionPolicy {
    fn default() -> Self {
        Self {
            short_answers: REQUIRED_SHORT_ANSWERS.map(String::from).to_vec(),
            omission_probability: 0.10,
            omission_start_turn: 5,
            redirect_probability: 0.25,
            included_query_probability: 0.20,
            redirect_template: "{excluded}, I think {included} might have a really good answer to it."
                .into(),
            included_query_template: "{included}, do you know what {excluded} is talking about?".into(),
        }
    }
}

impl ExclusionPolicy {
    pub fn parse(text: &str, file: &str) -> Result<Self, ControlError> {
        let p: Self = toml::from_str(text).map_err(|e| ControlError::config(file, e.to_string()))?;
        p.validate(file)?;
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self, ControlError> {
        let text = fs::read_to_string(path).map_err(|e| ControlError::Io(path.display().to_string(), e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn validate(&self, file: &str) -> Result<(), ControlError> {
        let err = |m: String| Err(ControlError::config(file, m));
        for (name, p) in [
            ("omission_probability", self.omission_probability),
            ("redirect_probability", self.redirect_probability),
            ("included_query_probability", self.included_query_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return err(format!("{name} must be in [0, 1]"));
            }
        }
        if self.omission_start_turn < 1 {
            return err("omission_start_turn must be >= 1".into());
        }
        for required in REQUIRED_SHORT_ANSWERS {
            if !self.short_answers.iter().any(|s| s == required) {
                return err(format!("short_answers must include {required:?}"));
            }
        }
        for (name, t) in [
            ("redirect_template", &self.redirect_template),
            ("included_query_template", &self.included_query_template),
        ] {
            if !t.contains("{included}") || !t.contains("{excluded}") {
                return err(format!("{name} needs both {{included}} and {{excluded}}"));
            }
        }
        Ok(())
    }

    pub fn redirect_text(&self, included: &str, excluded: &str) -> String {
        fill_roles(&self.redirect_template, included, excluded)
    }

    pub fn side_query_text(&self, included: &str, excluded: &str) -> String {
        fill_roles(&self.included_query_template, included, excluded)
    }
}

fn fill_roles(template: &str, included: &str, excluded: &str) -> String {
    template
        .replace("{included}", included)
        .replace("{excluded}", excluded)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    RespondFull,
    RespondShort,
    Redirect,
    Omit,
    IncludedSideQuery,
    BartenderDuty,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Routing decision for one inbound utterance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Route {
    pub action: Action,
    /// Also ask the included participant about the excluded one.
    pub side_query: bool,
}

pub fn is_duty(report: &PerceptionReport) -> bool {
    matches!(
        report.dialogue_act.label,
        DialogueAct::Order | DialogueAct::Greet | DialogueAct::Bye
    )
}

/// Decides how the system treats an utterance in a triadic session. The
/// sender's turn counter must already include this utterance.
pub fn exclusion_route(
    report: &PerceptionReport,
    sender: &str,
    state: &mut InformationState,
    policy: &ExclusionPolicy,
) -> Result<Route, ControlError> {
    state.roles.triad()?;
    let role = state.roles.role_of(sender).ok_or(ControlError::RolesMissing)?;
    let duty = is_duty(report) || state.active.get(sender).is_some_and(|a| a.duty);
    let route = |action| Route {
        action,
        side_query: false,
    };
    if duty {
        return Ok(route(Action::BartenderDuty));
    }
    match role {
        Role::Included => Ok(Route {
            action: Action::RespondFull,
            side_query: state.rng.random_bool(policy.included_query_probability),
        }),
        Role::Excluded => {
            let turn = state.turn(sender);
            if turn >= policy.omission_start_turn && state.rng.random_bool(policy.omission_probability) {
                return Ok(route(Action::Omit));
            }
            if report.dialogue_act.label.is_question() && state.rng.random_bool(policy.redirect_probability) {
                return Ok(route(Action::Redirect));
            }
            Ok(route(Action::RespondShort))
        }
        Role::Single => Err(ControlError::RolesMissing),
    }
}

/// First clause up to the first sentence mark, cut to five words; a short
/// answer when that leaves no words.
pub fn shorten_response<R: Rng + ?Sized>(
    text: &str,
    short_answers: &[String],
    modifiers: &ModifierTables,
    rng: &mut R,
) -> String {
    let tokens = tokenize(text, modifiers);
    let end = tokens
        .iter()
        .position(|t| t.kind == TokenKind::Punct && t.surface.starts_with(['.', '!', '?']))
        .map(|i| i + 1)
        .unwrap_or(tokens.len());
    let mut words = 0;
    let mut cut = 0;
    for (i, t) in tokens[..end].iter().enumerate() {
        if t.is_word() {
            if words == SHORT_MAX_WORDS {
                break;
            }
            words += 1;
        }
        cut = i + 1;
    }
    if words == 0 {
        return short_answers[rng.random_range(0..short_answers.len())].clone();
    }
    let chars: Vec<char> = text.chars().collect();
    let start = tokens[0].span.0;
    let stop = tokens[cut - 1].span.1;
    chars[start..stop].iter().collect()
}
