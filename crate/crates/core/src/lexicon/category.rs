use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use super::tsv::{self, TsvFile};
use super::LexiconError;

pub const WILDCARD: char = '*';

/// Coarse grouping of word categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CategoryGroup {
    Linguistic,
    Psychological,
    PersonalConcern,
    Paralinguistic,
}

impl FromStr for CategoryGroup {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linguistic" => Ok(Self::Linguistic),
            "psychological" => Ok(Self::Psychological),
            "personal-concern" => Ok(Self::PersonalConcern),
            "paralinguistic" => Ok(Self::Paralinguistic),
            other => Err(format!("unknown category group {other:?}")),
        }
    }
}

impl fmt::Display for CategoryGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Linguistic => "linguistic",
            Self::Psychological => "psychological",
            Self::PersonalConcern => "personal-concern",
            Self::Paralinguistic => "paralinguistic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryInfo {
    pub name: String,
    pub group: CategoryGroup,
}

/// A dictionary pattern: either an exact word or a stem followed by `*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CategoryPattern {
    Exact(String),
    Stem(String),
}

impl CategoryPattern {
    pub fn parse(raw: &str) -> Result<Self, String> {
        let raw = raw.to_lowercase();
        if raw.is_empty() {
            return Err("empty pattern".into());
        }
        if raw.chars().any(char::is_whitespace) {
            return Err(format!("pattern {raw:?} contains whitespace"));
        }
        match raw.find(WILDCARD) {
            None => Ok(Self::Exact(raw)),
            Some(pos) if pos + 1 == raw.len() && pos > 0 => {
                Ok(Self::Stem(raw[..pos].to_string()))
            }
            Some(_) => Err(format!(
                "pattern {raw:?} must end in exactly one trailing '*' after a nonempty stem"
            )),
        }
    }

    pub fn matches(&self, word: &str) -> bool {
        match self {
            Self::Exact(w) => w == word,
            Self::Stem(stem) => word.starts_with(stem.as_str()),
        }
    }
}

impl fmt::Display for CategoryPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact(w) => f.write_str(w),
            Self::Stem(s) => write!(f, "{s}{WILDCARD}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryEntry {
    pub pattern: CategoryPattern,
    pub categories: BTreeSet<String>,
}

/// Word-category dictionary with stem wildcards.
#[derive(Debug, Clone, Default)]
pub struct CategoryLexicon {
    entries: Vec<CategoryEntry>,
    registry: BTreeMap<String, CategoryInfo>,
    exact: HashMap<String, BTreeSet<String>>,
    stems: HashMap<String, BTreeSet<String>>,
}

impl PartialEq for CategoryLexicon {
    fn eq(&self, other: &Self) -> bool {
        // the hash indexes are derived from `entries`
        self.entries == other.entries && self.registry == other.registry
    }
}

impl CategoryLexicon {
    pub fn new(
        registry: BTreeMap<String, CategoryInfo>,
        entries: Vec<CategoryEntry>,
    ) -> Result<Self, LexiconError> {
        let mut exact: HashMap<String, BTreeSet<String>> = HashMap::new();
        let mut stems: HashMap<String, BTreeSet<String>> = HashMap::new();
        for entry in &entries {
            if let Some(unknown) = entry.categories.iter().find(|c| !registry.contains_key(*c)) {
                return Err(LexiconError::Invariant(format!(
                    "pattern {} references unregistered category {unknown:?}",
                    entry.pattern
                )));
            }
            if entry.categories.is_empty() {
                return Err(LexiconError::Invariant(format!(
                    "pattern {} has no categories",
                    entry.pattern
                )));
            }
            let (index, key) = match &entry.pattern {
                CategoryPattern::Exact(w) => (&mut exact, w),
                CategoryPattern::Stem(s) => (&mut stems, s),
            };
            if index.insert(key.clone(), entry.categories.clone()).is_some() {
                return Err(LexiconError::Invariant(format!(
                    "duplicate category pattern {}",
                    entry.pattern
                )));
            }
        }
        Ok(Self {
            entries,
            registry,
            exact,
            stems,
        })
    }

    pub(crate) fn load(registry_file: TsvFile, entries_file: TsvFile) -> Result<Self, LexiconError> {
        let mut registry = BTreeMap::new();
        for row in &registry_file.rows {
            tsv::expect_fields(&registry_file, row, 3)?;
            let id = tsv::word_entry(&registry_file, row, &row.fields[0])?;
            let group = row.fields[2]
                .parse::<CategoryGroup>()
                .map_err(|m| registry_file.format_error(row.line, m))?;
            let info = CategoryInfo {
                name: row.fields[1].clone(),
                group,
            };
            if registry.insert(id.clone(), info).is_some() {
                return Err(LexiconError::Duplicate {
                    file: registry_file.file_name(),
                    line: row.line,
                    entry: id,
                });
            }
        }

        let mut entries = Vec::with_capacity(entries_file.rows.len());
        let mut seen = BTreeSet::new();
        for row in &entries_file.rows {
            tsv::expect_fields(&entries_file, row, 2)?;
            let pattern = CategoryPattern::parse(&row.fields[0])
                .map_err(|m| entries_file.format_error(row.line, m))?;
            if !seen.insert(pattern.clone()) {
                return Err(LexiconError::Duplicate {
                    file: entries_file.file_name(),
                    line: row.line,
                    entry: pattern.to_string(),
                });
            }
            let categories: BTreeSet<String> = row.fields[1]
                .split(',')
                .map(|c| c.trim().to_lowercase())
                .filter(|c| !c.is_empty())
                .collect();
            if categories.is_empty() {
                return Err(entries_file.format_error(row.line, "no category ids"));
            }
            entries.push(CategoryEntry {
                pattern,
                categories,
            });
        }
        Self::new(registry, entries)
    }

    pub fn entries(&self) -> &[CategoryEntry] {
        &self.entries
    }

    pub fn registry(&self) -> &BTreeMap<String, CategoryInfo> {
        &self.registry
    }

    pub fn contains_category(&self, id: &str) -> bool {
        self.registry.contains_key(id)
    }

    /// Union of the categories of every exact pattern equal to `word` and
    /// every stem pattern that is a prefix of `word`.
    pub fn lookup_categories(&self, word: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        if word.is_empty() {
            return out;
        }
        if let Some(cats) = self.exact.get(word) {
            out.extend(cats.iter().cloned());
        }
        for (idx, ch) in word.char_indices() {
            let prefix = &word[..idx + ch.len_utf8()];
            if let Some(cats) = self.stems.get(prefix) {
                out.extend(cats.iter().cloned());
            }
        }
        out
    }
}
