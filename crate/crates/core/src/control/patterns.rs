//! Keyword/wildcard pattern rules used as the open-domain fallback.
//!
//! ```text
//! TAG generic
//! PATTERN indeed * SAY "indeed it is so."
//! PATTERN i like * SAY "why do you like {1}?"
//! FALLBACK "i see."
//! ```

use std::fs;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;

use super::alds::unescape;
use super::{CandidateSource, ControlError, ResponseCandidate, Target, PRIORITY_PATTERN};
use crate::perception::{Token, TokenKind};

pub const TAGS: [&str; 4] = ["bar", "stranger", "exclusion-short", "generic"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternElem {
    Word(String),
    Star,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternRule {
    pub pattern: Vec<PatternElem>,
    pub template: String,
    pub tag: String,
}

impl PatternRule {
    pub fn wildcards(&self) -> usize {
        self.pattern.iter().filter(|e| **e == PatternElem::Star).count()
    }

    /// Wildcard captures when `words` matches; stars take as few tokens as possible.
    pub fn captures(&self, words: &[String]) -> Option<Vec<Vec<String>>> {
        let mut caps = Vec::with_capacity(self.wildcards());
        matches(&self.pattern, words, &mut caps).then_some(caps)
    }
}

fn matches(pattern: &[PatternElem], words: &[String], caps: &mut Vec<Vec<String>>) -> bool {
    match pattern.split_first() {
        None => words.is_empty(),
        Some((PatternElem::Word(w), rest)) => {
            words.first() == Some(w) && matches(rest, &words[1..], caps)
        }
        Some((PatternElem::Star, rest)) => {
            for take in 0..=words.len() {
                caps.push(words[..take].to_vec());
                if matches(rest, &words[take..], caps) {
                    return true;
                }
                caps.pop();
            }
            false
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PatternSet {
    pub rules: Vec<PatternRule>,
    /// `(tag, text)` lines used when nothing else applies.
    pub fallbacks: Vec<(String, String)>,
}

impl PatternSet {
    pub fn extend(&mut self, other: PatternSet) {
        self.rules.extend(other.rules);
        self.fallbacks.extend(other.fallbacks);
    }

    pub fn fallback_texts(&self) -> Vec<&str> {
        self.fallbacks.iter().map(|(_, t)| t.as_str()).collect()
    }
}

static LINE_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"^PATTERN\s+(.+?)\s+SAY\s+"((?:[^"\\]|\\.)*)"$"#).unwrap());
static FALLBACK_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"^FALLBACK\s+"((?:[^"\\]|\\.)*)"$"#).unwrap());
static CAPTURE_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\{([^{}]*)\}").unwrap());

pub fn parse_patterns(text: &str, file: &str) -> Result<PatternSet, ControlError> {
    let mut set = PatternSet::default();
    let mut tag = "generic".to_string();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: String| ControlError::script(file, idx + 1, m);
        if let Some(t) = line.strip_prefix("TAG ") {
            let t = t.trim();
            if !TAGS.contains(&t) {
                return Err(err(format!("unknown tag {t:?}")));
            }
            tag = t.to_string();
        } else if let Some(c) = FALLBACK_RE.captures(line) {
            let text = unescape(&c[1]);
            if text.trim().is_empty() {
                return Err(err("empty fallback".into()));
            }
            set.fallbacks.push((tag.clone(), text));
        } else if let Some(c) = LINE_RE.captures(line) {
            let pattern: Vec<PatternElem> = c[1]
                .split_whitespace()
                .map(|w| match w {
                    "*" => PatternElem::Star,
                    w => PatternElem::Word(w.to_lowercase()),
                })
                .collect();
            let template = unescape(&c[2]);
            let rule = PatternRule {
                pattern,
                template,
                tag: tag.clone(),
            };
            for slot in CAPTURE_RE.captures_iter(&rule.template) {
                match slot[1].parse::<usize>() {
                    Ok(k) if (1..=rule.wildcards()).contains(&k) => {}
                    _ => return Err(err(format!("bad capture slot {{{}}}", &slot[1]))),
                }
            }
            set.rules.push(rule);
        } else {
            return Err(err(format!("unrecognized line {line:?}")));
        }
    }
    Ok(set)
}

pub fn load_patterns(path: &Path) -> Result<PatternSet, ControlError> {
    let text = fs::read_to_string(path).map_err(|e| ControlError::Io(path.display().to_string(), e))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    parse_patterns(&text, &name)
}

/// Lowercased words and emoticons, punctuation and `ignore` words dropped.
pub fn normalize(tokens: &[Token], ignore: &[&str]) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| t.kind != TokenKind::Punct)
        .map(|t| t.lower.clone())
        .filter(|w| !ignore.contains(&w.as_str()))
        .collect()
}

/// Every matching rule's filled template, most specific first, then file order.
pub fn match_patterns(words: &[String], set: &PatternSet) -> Vec<ResponseCandidate> {
    let mut hits: Vec<(usize, usize, String)> = set
        .rules
        .iter()
        .enumerate()
        .filter_map(|(order, rule)| {
            let caps = rule.captures(words)?;
            let consumed = caps.iter().map(Vec::len).sum();
            let text = CAPTURE_RE.replace_all(&rule.template, |c: &regex::Captures<'_>| {
                let k: usize = c[1].parse().unwrap_or(0);
                caps.get(k.wrapping_sub(1)).map(|c| c.join(" ")).unwrap_or_default()
            });
            let text = text.split_whitespace().collect::<Vec<_>>().join(" ");
            (!text.is_empty()).then_some((consumed, order, text))
        })
        .collect();
    hits.sort();
    hits.into_iter()
        .map(|(consumed, _, text)| {
            let mut c = ResponseCandidate::new(text, CandidateSource::Pattern, PRIORITY_PATTERN, Target::Broadcast);
            c.specificity = consumed;
            c
        })
        .collect()
}
