//! Affective profiles: post-processing of response candidates.
//!
//! A negative profile strips clauses holding positive words and drops
//! positive emoticons, a positive profile does the reverse, and the
//! neutral profile only drops polarity-marked emoticons.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ControlError, ResponseCandidate};
use crate::lexicon::{LexiconBundle, Polarity};
use crate::perception::{tokenize, Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Positive,
    Negative,
    Neutral,
}

impl ProfileKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Positive => "positive",
            Self::Negative => "negative",
            Self::Neutral => "neutral",
        }
    }

    /// Polarity whose words and emoticons this profile removes.
    pub fn removal_polarity(self) -> Option<Polarity> {
        match self {
            Self::Positive => Some(Polarity::Negative),
            Self::Negative => Some(Polarity::Positive),
            Self::Neutral => None,
        }
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProfileKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "positive" => Ok(Self::Positive),
            "negative" => Ok(Self::Negative),
            "neutral" => Ok(Self::Neutral),
            _ => Err(format!("unknown profile {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffectiveProfile {
    pub kind: ProfileKind,
    #[serde(default)]
    pub insertion_probability: f64,
    #[serde(default)]
    pub insertion_pool: Vec<String>,
    #[serde(default)]
    pub replacements: BTreeMap<String, String>,
    /// Used when removal leaves nothing to say.
    pub minimal_phrases: Vec<String>,
}

impl AffectiveProfile {
    pub fn neutral() -> Self {
        Self {
            kind: ProfileKind::Neutral,
            insertion_probability: 0.0,
            insertion_pool: vec![],
            replacements: BTreeMap::new(),
            minimal_phrases: vec!["ok.".into()],
        }
    }

    pub fn parse(text: &str, file: &str, bundle: &LexiconBundle) -> Result<Self, ControlError> {
        let mut p: Self = toml::from_str(text).map_err(|e| ControlError::config(file, e.to_string()))?;
        p.replacements = p
            .replacements
            .into_iter()
            .map(|(k, v)| (k.to_lowercase(), v))
            .collect();
        p.validate(file, bundle)?;
        Ok(p)
    }

    pub fn load(path: &Path, bundle: &LexiconBundle) -> Result<Self, ControlError> {
        let text = fs::read_to_string(path).map_err(|e| ControlError::Io(path.display().to_string(), e))?;
        Self::parse(&text, &path.display().to_string(), bundle)
    }

    pub fn validate(&self, file: &str, bundle: &LexiconBundle) -> Result<(), ControlError> {
        let err = |m: String| Err(ControlError::config(file, m));
        if !(0.0..=1.0).contains(&self.insertion_probability) {
            return err("insertion_probability must be in [0, 1]".into());
        }
        if self.kind == ProfileKind::Neutral
            && (self.insertion_probability > 0.0 || !self.insertion_pool.is_empty())
        {
            return err("the neutral profile makes no insertions".into());
        }
        if self.insertion_probability > 0.0 && self.insertion_pool.is_empty() {
            return err("insertion_probability set but insertion_pool is empty".into());
        }
        if self.minimal_phrases.iter().all(|p| p.trim().is_empty()) {
            return err("minimal_phrases needs at least one phrase".into());
        }
        let phrases = self
            .insertion_pool
            .iter()
            .chain(&self.minimal_phrases)
            .chain(self.replacements.values());
        for phrase in phrases {
            let tokens = tokenize(phrase, &bundle.modifiers);
            if let Some(t) = tokens.iter().find(|t| self.is_removal(t, bundle)) {
                return err(format!("{phrase:?} contains {:?}, which this profile removes", t.surface));
            }
        }
        Ok(())
    }

    pub fn is_removal(&self, token: &Token, bundle: &LexiconBundle) -> bool {
        match token.kind {
            TokenKind::Punct => false,
            TokenKind::Word => self
                .kind
                .removal_polarity()
                .is_some_and(|p| bundle.is_polar(&token.lower, p)),
            TokenKind::Emoticon => match (self.kind.removal_polarity(), bundle.modifiers.emoticon(&token.surface)) {
                (_, None) => false,
                (None, Some(_)) => true,
                (Some(want), Some(have)) => want == have,
            },
        }
    }
}

const CLAUSE_END: [char; 5] = [',', '.', '!', '?', ';'];

fn render(chars: &[char], tokens: &[(&Token, String)]) -> String {
    let mut out = String::new();
    for (tok, surface) in tokens {
        let spaced = tok.span.0 > 0 && chars[tok.span.0 - 1].is_whitespace();
        if !out.is_empty() && spaced {
            out.push(' ');
        }
        out.push_str(surface);
    }
    out.trim_end_matches([',', ';', ' ']).trim_start_matches([',', ';', ' ']).to_string()
}

fn has_content(tokens: &[Token]) -> bool {
    tokens.iter().any(|t| t.kind != TokenKind::Punct)
}

fn pick<'a, R: Rng + ?Sized>(pool: &'a [String], rng: &mut R) -> &'a str {
    &pool[rng.random_range(0..pool.len())]
}

/// Removes, replaces and inserts expressions according to `profile`.
pub fn apply_profile<R: Rng + ?Sized>(
    candidate: &ResponseCandidate,
    profile: &AffectiveProfile,
    bundle: &LexiconBundle,
    rng: &mut R,
) -> ResponseCandidate {
    let text = candidate.text.as_str();
    let chars: Vec<char> = text.chars().collect();
    let tokens = tokenize(text, &bundle.modifiers);

    let mut clauses: Vec<Vec<&Token>> = vec![vec![]];
    for t in &tokens {
        clauses.last_mut().unwrap().push(t);
        if t.kind == TokenKind::Punct && t.surface.starts_with(CLAUSE_END) {
            clauses.push(vec![]);
        }
    }
    let mut kept: Vec<(&Token, String)> = Vec::new();
    let mut changed = false;
    for clause in clauses {
        let drop_clause = clause
            .iter()
            .any(|t| t.kind == TokenKind::Word && profile.is_removal(t, bundle));
        for t in clause {
            if drop_clause || profile.is_removal(t, bundle) {
                changed = true;
                continue;
            }
            let surface = match profile.replacements.get(&t.lower) {
                Some(r) if t.kind == TokenKind::Word => {
                    changed = true;
                    r.clone()
                }
                _ => t.surface.clone(),
            };
            kept.push((t, surface));
        }
    }

    let mut out = if changed { render(&chars, &kept) } else { text.to_string() };
    if !has_content(&tokenize(&out, &bundle.modifiers)) {
        out = pick(&profile.minimal_phrases, rng).to_string();
    }
    if !profile.insertion_pool.is_empty() && rng.random_bool(profile.insertion_probability) {
        out = format!("{out} {}", pick(&profile.insertion_pool, rng));
    }
    out = purge(out, profile, bundle);

    ResponseCandidate {
        text: out,
        ..candidate.clone()
    }
}

/// Drops any removal token that survived, e.g. one formed by re-joining text.
fn purge(text: String, profile: &AffectiveProfile, bundle: &LexiconBundle) -> String {
    let mut text = text;
    for _ in 0..4 {
        let tokens = tokenize(&text, &bundle.modifiers);
        if !tokens.iter().any(|t| profile.is_removal(t, bundle)) {
            return text;
        }
        let chars: Vec<char> = text.chars().collect();
        let kept: Vec<(&Token, String)> = tokens
            .iter()
            .filter(|t| !profile.is_removal(t, bundle))
            .map(|t| (t, t.surface.clone()))
            .collect();
        text = render(&chars, &kept);
    }
    let tokens = tokenize(&text, &bundle.modifiers);
    if has_content(&tokens) && !tokens.iter().any(|t| profile.is_removal(t, bundle)) {
        text
    } else {
        profile.minimal_phrases[0].clone()
    }
}
