//! Scenario kits: everything a session needs beyond the lexicons, read from
//! a TOML file whose relative paths resolve against the file's directory.
//!
//! ```toml
//! name = "bar-triadic-exclusion"
//! humans = 2
//! duration_secs = 900
//! profile = "neutral"
//! opening = "hi, i am the bartender here."
//! farewell = "time is up. bye!"
//! alds = ["bar.alds"]
//! patterns = ["../patterns/bar.pat"]
//! exclusion = "exclusion.toml"
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::alds::{load_alds, AldsScenario};
use super::exclusion::ExclusionPolicy;
use super::patterns::{load_patterns, PatternSet};
use super::profile::{AffectiveProfile, ProfileKind};
use super::ControlError;
use crate::lexicon::LexiconBundle;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct KitFile {
    name: String,
    humans: usize,
    duration_secs: u64,
    #[serde(default = "default_bot_name")]
    bot_name: String,
    profile: ProfileKind,
    opening: String,
    farewell: String,
    #[serde(default)]
    openings: BTreeMap<ProfileKind, String>,
    #[serde(default)]
    farewells: BTreeMap<ProfileKind, String>,
    #[serde(default)]
    alds: Vec<PathBuf>,
    #[serde(default)]
    patterns: Vec<PathBuf>,
    exclusion: Option<PathBuf>,
    #[serde(default = "default_profiles_dir")]
    profiles: PathBuf,
}

fn default_bot_name() -> String {
    "bartender".into()
}

fn default_profiles_dir() -> PathBuf {
    PathBuf::from("../profiles")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioKit {
    pub name: String,
    pub humans: usize,
    pub duration_secs: u64,
    pub bot_name: String,
    pub default_profile: ProfileKind,
    opening: String,
    farewell: String,
    openings: BTreeMap<ProfileKind, String>,
    farewells: BTreeMap<ProfileKind, String>,
    pub scenarios: Vec<AldsScenario>,
    pub patterns: PatternSet,
    pub exclusion: Option<ExclusionPolicy>,
    pub profiles: BTreeMap<ProfileKind, AffectiveProfile>,
}

impl ScenarioKit {
    pub fn load(path: &Path, bundle: &LexiconBundle) -> Result<Self, ControlError> {
        let file = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|e| ControlError::Io(file.clone(), e))?;
        let raw: KitFile = toml::from_str(&text).map_err(|e| ControlError::config(&file, e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));

        if !(1..=2).contains(&raw.humans) {
            return Err(ControlError::config(&file, "humans must be 1 or 2"));
        }
        if raw.duration_secs == 0 {
            return Err(ControlError::config(&file, "duration_secs must be > 0"));
        }
        let bot_name = raw.bot_name.trim().to_lowercase();
        if bot_name.is_empty() || bot_name.contains(char::is_whitespace) {
            return Err(ControlError::config(&file, "bot_name must be a single word"));
        }

        let mut scenarios: Vec<AldsScenario> = Vec::new();
        for p in &raw.alds {
            for scn in load_alds(&base.join(p))? {
                if scenarios.iter().any(|s| s.id == scn.id) {
                    return Err(ControlError::config(&file, format!("scenario {:?} defined twice", scn.id)));
                }
                scenarios.push(scn);
            }
        }
        let mut patterns = PatternSet::default();
        for p in &raw.patterns {
            patterns.extend(load_patterns(&base.join(p))?);
        }
        if patterns.fallbacks.is_empty() {
            return Err(ControlError::config(&file, "pattern files define no FALLBACK line"));
        }
        let exclusion = raw
            .exclusion
            .as_ref()
            .map(|p| ExclusionPolicy::load(&base.join(p)))
            .transpose()?;
        if raw.humans == 2 && exclusion.is_none() {
            return Err(ControlError::config(&file, "two-human kits need an exclusion policy"));
        }

        let mut profiles = BTreeMap::new();
        for kind in [ProfileKind::Neutral, ProfileKind::Negative, ProfileKind::Positive] {
            let p = base.join(&raw.profiles).join(format!("{kind}.toml"));
            if p.is_file() {
                let profile = AffectiveProfile::load(&p, bundle)?;
                if profile.kind != kind {
                    return Err(ControlError::config(&p.display().to_string(), "kind does not match file name"));
                }
                profiles.insert(kind, profile);
            }
        }
        profiles.entry(ProfileKind::Neutral).or_insert_with(AffectiveProfile::neutral);

        Ok(Self {
            name: raw.name,
            humans: raw.humans,
            duration_secs: raw.duration_secs,
            bot_name,
            default_profile: raw.profile,
            opening: raw.opening,
            farewell: raw.farewell,
            openings: raw.openings,
            farewells: raw.farewells,
            scenarios,
            patterns,
            exclusion,
            profiles,
        })
    }

    pub fn profile(&self, kind: ProfileKind) -> Option<&AffectiveProfile> {
        self.profiles.get(&kind)
    }

    pub fn opening_for(&self, kind: ProfileKind) -> &str {
        self.openings.get(&kind).unwrap_or(&self.opening)
    }

    pub fn farewell_for(&self, kind: ProfileKind) -> &str {
        self.farewells.get(&kind).unwrap_or(&self.farewell)
    }

    pub fn fallback_lines(&self) -> Vec<String> {
        self.patterns.fallback_texts().into_iter().map(str::to_string).collect()
    }
}
