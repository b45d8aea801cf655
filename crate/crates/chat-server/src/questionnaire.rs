//! Post-session Likert questionnaire (1 = definitely not .. 7 = definitely yes).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::ChatError;

pub const CONSTRUCTS: [&str; 8] = [
    "enjoyment",
    "emotional_connection",
    "realism",
    "coherence",
    "positive_change",
    "negative_change",
    "future_interaction",
    "trustworthiness",
];

pub type Answers = BTreeMap<String, u8>;

/// The item ids a participant has to answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemSet {
    items: Vec<String>,
}

impl ItemSet {
    pub fn dyadic() -> Self {
        Self {
            items: CONSTRUCTS.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Every construct asked once about the system and once about the
    /// other human.
    pub fn triadic() -> Self {
        Self {
            items: CONSTRUCTS
                .iter()
                .flat_map(|c| [format!("{c}_system"), format!("{c}_partner")])
                .collect(),
        }
    }

    /// One item id per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ChatError> {
        let mut items: Vec<String> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.contains(char::is_whitespace) {
                return Err(ChatError::Validation(format!("line {}: item ids are single words", i + 1)));
            }
            if items.iter().any(|x| x == line) {
                return Err(ChatError::Validation(format!("line {}: duplicate item {line:?}", i + 1)));
            }
            items.push(line.to_string());
        }
        if items.is_empty() {
            return Err(ChatError::Validation("questionnaire has no items".into()));
        }
        Ok(Self { items })
    }

    pub fn load(path: &Path) -> Result<Self, ChatError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ChatError::Resource(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    /// Checks that every item is answered with an integer in 1..=7 and
    /// nothing else is present.
    pub fn validate(&self, answers: &BTreeMap<String, Value>) -> Result<Answers, ChatError> {
        let mut out = Answers::new();
        for key in answers.keys() {
            if !self.items.contains(key) {
                return Err(ChatError::Validation(format!("unknown item {key:?}")));
            }
        }
        for item in &self.items {
            let v = answers
                .get(item)
                .ok_or_else(|| ChatError::Validation(format!("item {item:?} is missing")))?;
            match v.as_u64() {
                Some(n @ 1..=7) => {
                    out.insert(item.clone(), n as u8);
                }
                _ => {
                    return Err(ChatError::Validation(format!(
                        "item {item:?} must be an integer from 1 to 7, got {v}"
                    )))
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn all(set: &ItemSet, v: Value) -> BTreeMap<String, Value> {
        set.items().iter().map(|i| (i.clone(), v.clone())).collect()
    }

    #[test]
    fn all_fours_accepted() {
        let set = ItemSet::dyadic();
        let a = set.validate(&all(&set, json!(4))).unwrap();
        assert_eq!(a.len(), 8);
        assert!(a.values().all(|v| *v == 4));
    }

    #[test]
    fn out_of_range_and_non_integers_rejected() {
        let set = ItemSet::dyadic();
        for bad in [json!(8), json!(0), json!(-1), json!(4.5), json!("4"), json!(null)] {
            let mut a = all(&set, json!(4));
            a.insert("realism".into(), bad);
            assert!(matches!(set.validate(&a), Err(ChatError::Validation(_))));
        }
    }

    #[test]
    fn missing_and_unknown_items_rejected() {
        let set = ItemSet::dyadic();
        let mut a = all(&set, json!(4));
        a.remove("coherence");
        assert!(set.validate(&a).is_err());
        let mut a = all(&set, json!(4));
        a.insert("mood".into(), json!(3));
        assert!(set.validate(&a).is_err());
    }

    #[test]
    fn triadic_set_covers_both_partners() {
        let set = ItemSet::triadic();
        assert_eq!(set.items().len(), 16);
        assert!(set.items().contains(&"trustworthiness_partner".to_string()));
    }

    #[test]
    fn parse_item_file() {
        let set = ItemSet::parse("# items\nenjoyment\n\nrealism # comment\n").unwrap();
        assert_eq!(set.items(), ["enjoyment", "realism"]);
        assert!(ItemSet::parse("a\na\n").is_err());
        assert!(ItemSet::parse("# none\n").is_err());
    }
}
