//! Surface features, gazetteer entities and utterance focus.

use std::collections::{BTreeMap, BTreeSet};

use super::tokenize::{Token, TokenKind};
use crate::lexicon::{Gazetteer, LexiconBundle, Polarity};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SurfaceFeatures {
    pub exclamation_count: usize,
    pub question_mark_count: usize,
    pub emoticons: Vec<(String, Polarity)>,
    pub all_caps_token_count: usize,
}

pub fn detect_surface(text: &str, tokens: &[Token], bundle: &LexiconBundle) -> SurfaceFeatures {
    SurfaceFeatures {
        exclamation_count: text.matches('!').count(),
        question_mark_count: text.matches('?').count(),
        emoticons: tokens
            .iter()
            .filter(|t| t.kind == TokenKind::Emoticon)
            .filter_map(|t| {
                bundle
                    .modifiers
                    .emoticon(&t.surface)
                    .map(|p| (t.surface.clone(), p))
            })
            .collect(),
        all_caps_token_count: tokens.iter().filter(|t| t.is_word() && t.is_all_caps).count(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityMention {
    pub gazetteer: String,
    pub phrase: String,
    /// Character offsets `[start, end)`.
    pub span: (usize, usize),
}

/// Longest gazetteer phrase first, then regular expressions; spans never overlap.
pub fn detect_entities(text: &str, tokens: &[Token], gazetteers: &[Gazetteer]) -> Vec<EntityMention> {
    let enabled: Vec<&Gazetteer> = gazetteers.iter().filter(|g| g.is_enabled()).collect();
    let chars: Vec<char> = text.chars().collect();
    let slice = |(a, b): (usize, usize)| chars[a..b].iter().collect::<String>();
    let max_len = enabled.iter().map(|g| g.max_phrase_words()).max().unwrap_or(0);

    let mut found = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if !tokens[i].is_word() {
            i += 1;
            continue;
        }
        let run = tokens[i..]
            .iter()
            .take(max_len)
            .take_while(|t| t.is_word())
            .count();
        let hit = (1..=run).rev().find_map(|len| {
            let phrase = tokens[i..i + len]
                .iter()
                .map(|t| t.lower.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            enabled
                .iter()
                .find(|g| g.contains(&phrase))
                .map(|g| (len, g.name.clone()))
        });
        match hit {
            Some((len, gazetteer)) => {
                let span = (tokens[i].span.0, tokens[i + len - 1].span.1);
                found.push(EntityMention {
                    gazetteer,
                    phrase: slice(span),
                    span,
                });
                i += len;
            }
            None => i += 1,
        }
    }

    let char_of_byte: BTreeMap<usize, usize> = text
        .char_indices()
        .enumerate()
        .map(|(ci, (b, _))| (b, ci))
        .chain(std::iter::once((text.len(), chars.len())))
        .collect();
    for g in &enabled {
        for re in g.patterns() {
            for m in re.find_iter(text) {
                let span = (char_of_byte[&m.start()], char_of_byte[&m.end()]);
                if span.0 == span.1 {
                    continue;
                }
                let overlaps = found
                    .iter()
                    .any(|e: &EntityMention| span.0 < e.span.1 && e.span.0 < span.1);
                if !overlaps {
                    found.push(EntityMention {
                        gazetteer: g.name.clone(),
                        phrase: slice(span),
                        span,
                    });
                }
            }
        }
    }
    found.sort_by_key(|e| e.span);
    found
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FocusResult {
    pub focus_terms: Vec<String>,
}

pub const MAX_FOCUS_TERMS: usize = 3;

/// Ranks non-stopword tokens by corpus rarity (unknown words rarest),
/// later position winning ties, and keeps the top three.
pub fn detect_focus(tokens: &[Token], bundle: &LexiconBundle) -> FocusResult {
    let mut last_position: BTreeMap<&str, usize> = BTreeMap::new();
    for t in tokens.iter().filter(|t| t.is_word()) {
        let w = t.lower.as_str();
        let content = w.chars().count() >= 2
            && w.chars().any(char::is_alphabetic)
            && !bundle.stopwords.contains(w);
        if content {
            last_position.insert(w, t.position);
        }
    }
    let mut ranked: Vec<(&str, usize)> = last_position.into_iter().collect();
    ranked.sort_by(|(wa, pa), (wb, pb)| {
        let fa = bundle.frequencies.get(*wa).copied().unwrap_or(0);
        let fb = bundle.frequencies.get(*wb).copied().unwrap_or(0);
        fa.cmp(&fb).then(pb.cmp(pa))
    });
    let mut seen = BTreeSet::new();
    FocusResult {
        focus_terms: ranked
            .into_iter()
            .filter(|(w, _)| seen.insert(*w))
            .take(MAX_FOCUS_TERMS)
            .map(|(w, _)| w.to_string())
            .collect(),
    }
}
