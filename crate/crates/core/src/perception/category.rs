use std::collections::BTreeMap;

use super::tokenize::{words, Token};
use crate::lexicon::CategoryLexicon;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CategoryProfile {
    pub counts: BTreeMap<String, usize>,
    pub word_total: usize,
}

impl CategoryProfile {
    pub fn count(&self, category: &str) -> usize {
        self.counts.get(category).copied().unwrap_or(0)
    }

    pub fn contains(&self, category: &str) -> bool {
        self.count(category) > 0
    }
}

/// Counts, per category, the word tokens whose lookup includes it.
pub fn categorize(tokens: &[Token], lexicon: &CategoryLexicon) -> CategoryProfile {
    let mut profile = CategoryProfile::default();
    for token in words(tokens) {
        profile.word_total += 1;
        for cat in lexicon.lookup_categories(&token.lower) {
            *profile.counts.entry(cat).or_insert(0) += 1;
        }
    }
    profile
}
