use std::fmt;
use std::str::FromStr;

use affect_core::control::{ProfileKind, ScenarioKit};
use serde::{Deserialize, Serialize};

use crate::ChatError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ScenarioKind {
    StrangerChat,
    BarDyadic,
    BarTriadicExclusion,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 3] = [Self::StrangerChat, Self::BarDyadic, Self::BarTriadicExclusion];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::StrangerChat => "StrangerChat",
            Self::BarDyadic => "BarDyadic",
            Self::BarTriadicExclusion => "BarTriadicExclusion",
        }
    }

    pub fn default_duration_secs(self) -> u64 {
        match self {
            Self::StrangerChat => 120,
            Self::BarDyadic => 420,
            Self::BarTriadicExclusion => 900,
        }
    }

    pub fn humans(self) -> usize {
        match self {
            Self::BarTriadicExclusion => 2,
            _ => 1,
        }
    }

    /// Kit file name under `<data>/scenarios`.
    pub fn kit_file(self) -> &'static str {
        match self {
            Self::StrangerChat => "stranger-chat.toml",
            Self::BarDyadic => "bar-dyadic.toml",
            Self::BarTriadicExclusion => "bar-triadic-exclusion.toml",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = String;

    /// Accepts `BarTriadicExclusion`, `bar-triadic-exclusion`, `bar_triadic_exclusion`, ...
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let squashed: String = s
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .collect::<String>()
            .to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|k| k.as_str().to_ascii_lowercase() == squashed)
            .ok_or_else(|| format!("unknown scenario {s:?}"))
    }
}

fn neutral() -> ProfileKind {
    ProfileKind::Neutral
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    pub scenario_kind: ScenarioKind,
    /// Seconds; the scenario default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<u64>,
    #[serde(default = "neutral")]
    pub profile: ProfileKind,
    #[serde(default)]
    pub seed: u64,
    /// Keyword that addresses the bot; the kit's name when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bot_name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub participants_expected: Option<usize>,
    /// Simulated typing time per character of a bot reply; 0 disables it.
    #[serde(default)]
    pub typing_delay_ms_per_char: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub avatar_url: Option<String>,
}

impl SessionConfig {
    pub fn new(scenario_kind: ScenarioKind) -> Self {
        Self {
            scenario_kind,
            duration: None,
            profile: ProfileKind::Neutral,
            seed: 0,
            bot_name: None,
            participants_expected: None,
            typing_delay_ms_per_char: 0,
            avatar_url: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_profile(mut self, profile: ProfileKind) -> Self {
        self.profile = profile;
        self
    }

    pub fn with_duration(mut self, secs: u64) -> Self {
        self.duration = Some(secs);
        self
    }

    pub fn duration_secs(&self) -> u64 {
        self.duration.unwrap_or(self.scenario_kind.default_duration_secs())
    }

    pub fn humans(&self) -> usize {
        self.participants_expected.unwrap_or(self.scenario_kind.humans())
    }

    pub fn validate(&self) -> Result<(), ChatError> {
        let bad = |m: &str| Err(ChatError::InvalidConfig(m.to_string()));
        if self.duration == Some(0) {
            return bad("duration must be > 0");
        }
        if self.humans() != self.scenario_kind.humans() {
            return bad(match self.scenario_kind {
                ScenarioKind::BarTriadicExclusion => "BarTriadicExclusion requires exactly 2 humans",
                _ => "this scenario takes exactly 1 human",
            });
        }
        if let Some(name) = &self.bot_name {
            if name.trim().is_empty() || name.contains(char::is_whitespace) {
                return bad("bot_name must be a single word");
            }
        }
        Ok(())
    }

    /// Copy with every default filled in from the kit, as stored in logs.
    pub fn resolved(&self, kit: &ScenarioKit) -> Self {
        let mut c = self.clone();
        c.duration = Some(self.duration_secs());
        c.participants_expected = Some(self.humans());
        c.bot_name = Some(
            self.bot_name
                .as_deref()
                .map(str::to_lowercase)
                .unwrap_or_else(|| kit.bot_name.clone()),
        );
        c
    }
}
