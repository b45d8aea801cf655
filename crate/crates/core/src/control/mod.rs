//! Control layer: dialogue scripts, pattern fallback, affective profiles,
//! the triadic exclusion policy and response selection.

pub mod alds;
pub mod bot;
pub mod decide;
pub mod exclusion;
pub mod kit;
pub mod patterns;
pub mod profile;
pub mod state;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use alds::{match_scenarios, parse_alds, AldsScenario, AldsStep, ScenarioDelta};
pub use bot::{Bot, BotUtterance};
pub use decide::{decide_response, DecisionContext};
pub use exclusion::{exclusion_route, shorten_response, Action, ExclusionPolicy, Route};
pub use kit::ScenarioKit;
pub use patterns::{match_patterns, parse_patterns, PatternRule, PatternSet};
pub use profile::{apply_profile, AffectiveProfile, ProfileKind};
pub use state::{advance_state, Event, InformationState};

#[derive(Debug, Error)]
pub enum ControlError {
    #[error("triadic policy needs exactly one Included and one Excluded participant")]
    RolesMissing,
    #[error("{file}:{line}: {message}")]
    Script {
        file: String,
        line: usize,
        message: String,
    },
    #[error("invalid config {file}: {message}")]
    Config { file: String, message: String },
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
}

impl ControlError {
    pub(crate) fn script(file: &str, line: usize, message: impl Into<String>) -> Self {
        Self::Script {
            file: file.to_string(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn config(file: &str, message: impl Into<String>) -> Self {
        Self::Config {
            file: file.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    Single,
    Included,
    Excluded,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Single => "Single",
            Self::Included => "Included",
            Self::Excluded => "Excluded",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "single" => Ok(Self::Single),
            "included" => Ok(Self::Included),
            "excluded" => Ok(Self::Excluded),
            _ => Err(format!("unknown role {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoleAssignment {
    pub roles: BTreeMap<String, Role>,
}

impl RoleAssignment {
    pub fn dyadic(user: &str) -> Self {
        Self {
            roles: [(user.to_string(), Role::Single)].into(),
        }
    }

    pub fn triadic(included: &str, excluded: &str) -> Self {
        Self {
            roles: [
                (included.to_string(), Role::Included),
                (excluded.to_string(), Role::Excluded),
            ]
            .into(),
        }
    }

    pub fn role_of(&self, participant: &str) -> Option<Role> {
        self.roles.get(participant).copied()
    }

    fn only(&self, role: Role) -> Option<&str> {
        let mut it = self.roles.iter().filter(|(_, r)| **r == role);
        match (it.next(), it.next()) {
            (Some((name, _)), None) => Some(name.as_str()),
            _ => None,
        }
    }

    pub fn included(&self) -> Option<&str> {
        self.only(Role::Included)
    }

    pub fn excluded(&self) -> Option<&str> {
        self.only(Role::Excluded)
    }

    pub fn is_triadic(&self) -> bool {
        self.roles.values().any(|r| *r != Role::Single)
    }

    /// `(included, excluded)` names of a complete triadic assignment.
    pub fn triad(&self) -> Result<(&str, &str), ControlError> {
        match (self.included(), self.excluded()) {
            (Some(i), Some(e)) if self.roles.len() == 2 => Ok((i, e)),
            _ => Err(ControlError::RolesMissing),
        }
    }

    /// The other human of a two-person session.
    pub fn other_than(&self, participant: &str) -> Option<&str> {
        let mut others = self.roles.keys().filter(|n| n.as_str() != participant);
        match (others.next(), others.next()) {
            (Some(o), None) if self.roles.contains_key(participant) => Some(o.as_str()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CandidateSource {
    Alds,
    Pattern,
    ShortAnswer,
    Scripted,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Participant(String),
    Broadcast,
}

pub const PRIORITY_ALDS: i32 = 2;
pub const PRIORITY_PATTERN: i32 = 1;
pub const PRIORITY_FALLBACK: i32 = 0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseCandidate {
    pub text: String,
    pub source: CandidateSource,
    pub priority: i32,
    pub target: Target,
    /// Tokens consumed by wildcards; lower is more specific.
    pub specificity: usize,
}

impl ResponseCandidate {
    pub fn new(text: impl Into<String>, source: CandidateSource, priority: i32, target: Target) -> Self {
        Self {
            text: text.into(),
            source,
            priority,
            target,
            specificity: 0,
        }
    }
}
