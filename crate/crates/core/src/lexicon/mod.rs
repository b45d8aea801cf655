//! Lexical resources: polarity word lists, VAD norms, the word-category
//! dictionary, sentiment modifiers, emoticons and bar-context gazetteers.
//!
//! Everything is read from a directory of UTF-8 TSV files (`#` starts a
//! comment line). The resulting [`LexiconBundle`] is immutable and can be
//! shared across sessions behind an `Arc`.

mod category;
pub(crate) mod tsv;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use regex::Regex;
use thiserror::Error;

pub use category::{CategoryEntry, CategoryGroup, CategoryInfo, CategoryLexicon, CategoryPattern};

/// Environment variable that overrides the lexicon root directory.
pub const LEXICON_DIR_ENV: &str = "AFFECT_LEXICON_DIR";

pub const DEFAULT_INTENSIFIER: f64 = 1.5;
pub const DEFAULT_DIMINISHER: f64 = 0.5;

pub const VAD_MIN: f64 = 1.0;
pub const VAD_MAX: f64 = 9.0;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("required lexicon file missing: {0}")]
    MissingFile(PathBuf),
    #[error("{file}:{line}: {message}")]
    Format {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{file}:{line}: duplicate entry {entry:?}")]
    Duplicate {
        file: String,
        line: usize,
        entry: String,
    },
    #[error("lexicon invariant violated: {0}")]
    Invariant(String),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn opposite(self) -> Self {
        match self {
            Self::Positive => Self::Negative,
            Self::Negative => Self::Positive,
        }
    }
}

impl FromStr for Polarity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "positive" | "pos" => Ok(Self::Positive),
            "negative" | "neg" => Ok(Self::Negative),
            other => Err(format!("unknown polarity {other:?}")),
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Positive => "positive",
            Self::Negative => "negative",
        })
    }
}

/// A pair of positive/negative word lists from one source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarityLexicon {
    pub source_id: String,
    positive: BTreeSet<String>,
    negative: BTreeSet<String>,
}

impl PolarityLexicon {
    pub fn new(
        source_id: impl Into<String>,
        positive: BTreeSet<String>,
        negative: BTreeSet<String>,
    ) -> Result<Self, LexiconError> {
        let source_id = source_id.into();
        if let Some(w) = positive.intersection(&negative).next() {
            return Err(LexiconError::Invariant(format!(
                "{w:?} is both positive and negative in lexicon {source_id:?}"
            )));
        }
        for w in positive.iter().chain(&negative) {
            if w.is_empty() || w.chars().any(|c| c.is_whitespace() || c.is_uppercase()) {
                return Err(LexiconError::Invariant(format!(
                    "polarity entry {w:?} must be a lowercase single word"
                )));
            }
        }
        Ok(Self {
            source_id,
            positive,
            negative,
        })
    }

    pub fn positive_words(&self) -> &BTreeSet<String> {
        &self.positive
    }

    pub fn negative_words(&self) -> &BTreeSet<String> {
        &self.negative
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VadEntry {
    pub valence: f64,
    pub arousal: f64,
    pub dominance: f64,
}

/// Per-word valence/arousal/dominance norms on 1..=9 scales.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VadLexicon {
    entries: BTreeMap<String, VadEntry>,
}

impl VadLexicon {
    pub fn new(entries: BTreeMap<String, VadEntry>) -> Result<Self, LexiconError> {
        for (word, e) in &entries {
            for (dim, v) in [
                ("valence", e.valence),
                ("arousal", e.arousal),
                ("dominance", e.dominance),
            ] {
                if !(VAD_MIN..=VAD_MAX).contains(&v) {
                    return Err(LexiconError::Invariant(format!(
                        "{dim} of {word:?} is {v}, outside [1, 9]"
                    )));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, word: &str) -> Option<&VadEntry> {
        self.entries.get(word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &VadEntry)> {
        self.entries.iter()
    }
}

/// Negations, intensifiers, diminishers and the emoticon table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModifierTables {
    pub negations: BTreeSet<String>,
    pub intensifiers: BTreeMap<String, f64>,
    pub diminishers: BTreeMap<String, f64>,
    pub emoticons: BTreeMap<String, Polarity>,
}

impl ModifierTables {
    pub fn validate(&self) -> Result<(), LexiconError> {
        if let Some((w, m)) = self.intensifiers.iter().find(|(_, m)| **m <= 1.0) {
            return Err(LexiconError::Invariant(format!(
                "intensifier {w:?} has multiplier {m}, must be > 1"
            )));
        }
        if let Some((w, m)) = self
            .diminishers
            .iter()
            .find(|(_, m)| **m <= 0.0 || **m >= 1.0)
        {
            return Err(LexiconError::Invariant(format!(
                "diminisher {w:?} has multiplier {m}, must be in (0, 1)"
            )));
        }
        let overlap = self
            .negations
            .iter()
            .find(|w| self.intensifiers.contains_key(*w) || self.diminishers.contains_key(*w))
            .or_else(|| {
                self.intensifiers
                    .keys()
                    .find(|w| self.diminishers.contains_key(*w))
            });
        if let Some(w) = overlap {
            return Err(LexiconError::Invariant(format!(
                "{w:?} appears in more than one modifier list"
            )));
        }
        Ok(())
    }

    pub fn is_negation(&self, word: &str) -> bool {
        self.negations.contains(word)
    }

    /// Multiplier of an intensifier or diminisher, if `word` is one.
    pub fn modifier(&self, word: &str) -> Option<f64> {
        self.intensifiers
            .get(word)
            .or_else(|| self.diminishers.get(word))
            .copied()
    }

    pub fn is_modifier(&self, word: &str) -> bool {
        self.is_negation(word) || self.modifier(word).is_some()
    }

    pub fn emoticon(&self, token: &str) -> Option<Polarity> {
        self.emoticons.get(token).copied()
    }
}

/// Named phrase list plus regular expressions for one entity type.
#[derive(Debug, Clone)]
pub struct Gazetteer {
    pub name: String,
    entries: BTreeSet<String>,
    patterns: Vec<Regex>,
}

impl PartialEq for Gazetteer {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.entries == other.entries
            && self.patterns.len() == other.patterns.len()
            && self
                .patterns
                .iter()
                .zip(&other.patterns)
                .all(|(a, b)| a.as_str() == b.as_str())
    }
}

impl Gazetteer {
    pub fn new(
        name: impl Into<String>,
        entries: impl IntoIterator<Item = String>,
        patterns: &[&str],
    ) -> Result<Self, LexiconError> {
        let name = name.into();
        let entries = entries
            .into_iter()
            .map(|e| e.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase())
            .filter(|e| !e.is_empty())
            .collect();
        let patterns = patterns
            .iter()
            .map(|p| compile_case_insensitive(p))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| LexiconError::Invariant(format!("gazetteer {name}: {e}")))?;
        Ok(Self {
            name,
            entries,
            patterns,
        })
    }

    /// A gazetteer with no phrases is loaded but disabled.
    pub fn is_enabled(&self) -> bool {
        !self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeSet<String> {
        &self.entries
    }

    pub fn patterns(&self) -> &[Regex] {
        &self.patterns
    }

    pub fn contains(&self, phrase: &str) -> bool {
        self.entries.contains(phrase)
    }

    /// Longest phrase length in words.
    pub fn max_phrase_words(&self) -> usize {
        self.entries
            .iter()
            .map(|e| e.split(' ').count())
            .max()
            .unwrap_or(0)
    }
}

fn compile_case_insensitive(pattern: &str) -> Result<Regex, regex::Error> {
    Regex::new(&format!("(?i){pattern}"))
}

/// Number of entries loaded from each resource.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadCounts {
    pub positive: usize,
    pub negative: usize,
    pub vad: usize,
    pub category_patterns: usize,
    pub categories: usize,
    pub negations: usize,
    pub intensifiers: usize,
    pub diminishers: usize,
    pub emoticons: usize,
    pub gazetteer_phrases: BTreeMap<String, usize>,
}

/// All lexical resources, validated and indexed.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconBundle {
    pub polarity: Vec<PolarityLexicon>,
    pub vad: VadLexicon,
    pub categories: CategoryLexicon,
    pub modifiers: ModifierTables,
    pub gazetteers: Vec<Gazetteer>,
    pub stopwords: BTreeSet<String>,
    pub frequencies: BTreeMap<String, u64>,
    positive_union: BTreeSet<String>,
    negative_union: BTreeSet<String>,
}

impl LexiconBundle {
    pub fn new(
        polarity: Vec<PolarityLexicon>,
        vad: VadLexicon,
        categories: CategoryLexicon,
        modifiers: ModifierTables,
        mut gazetteers: Vec<Gazetteer>,
    ) -> Result<Self, LexiconError> {
        modifiers.validate()?;
        gazetteers.sort_by(|a, b| a.name.cmp(&b.name));
        let positive_union = polarity
            .iter()
            .flat_map(|l| l.positive.iter().cloned())
            .collect();
        let negative_union = polarity
            .iter()
            .flat_map(|l| l.negative.iter().cloned())
            .collect();
        Ok(Self {
            polarity,
            vad,
            categories,
            modifiers,
            gazetteers,
            stopwords: BTreeSet::new(),
            frequencies: BTreeMap::new(),
            positive_union,
            negative_union,
        })
    }

    pub fn with_focus_tables(
        mut self,
        stopwords: BTreeSet<String>,
        frequencies: BTreeMap<String, u64>,
    ) -> Self {
        self.stopwords = stopwords;
        self.frequencies = frequencies;
        self
    }

    /// Union of the positive lists of every polarity lexicon.
    pub fn positive_words(&self) -> &BTreeSet<String> {
        &self.positive_union
    }

    pub fn negative_words(&self) -> &BTreeSet<String> {
        &self.negative_union
    }

    pub fn words_of(&self, polarity: Polarity) -> &BTreeSet<String> {
        match polarity {
            Polarity::Positive => &self.positive_union,
            Polarity::Negative => &self.negative_union,
        }
    }

    pub fn is_polar(&self, word: &str, polarity: Polarity) -> bool {
        self.words_of(polarity).contains(word)
    }

    pub fn gazetteer(&self, name: &str) -> Option<&Gazetteer> {
        self.gazetteers.iter().find(|g| g.name == name)
    }

    pub fn counts(&self) -> LoadCounts {
        LoadCounts {
            positive: self.positive_union.len(),
            negative: self.negative_union.len(),
            vad: self.vad.len(),
            category_patterns: self.categories.entries().len(),
            categories: self.categories.registry().len(),
            negations: self.modifiers.negations.len(),
            intensifiers: self.modifiers.intensifiers.len(),
            diminishers: self.modifiers.diminishers.len(),
            emoticons: self.modifiers.emoticons.len(),
            gazetteer_phrases: self
                .gazetteers
                .iter()
                .map(|g| (g.name.clone(), g.entries.len()))
                .collect(),
        }
    }
}

/// Resolves the lexicon directory: `AFFECT_LEXICON_DIR` if set, else `fallback`.
pub fn resolve_lexicon_dir(fallback: impl Into<PathBuf>) -> PathBuf {
    std::env::var_os(LEXICON_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| fallback.into())
}

/// Loads and validates every lexicon file under `root`.
pub fn load_lexicons(root: impl AsRef<Path>) -> Result<LexiconBundle, LexiconError> {
    let root = root.as_ref();

    let mut polarity = vec![load_polarity(
        "default",
        tsv::read_required(root, "positive.tsv")?,
        tsv::read_required(root, "negative.tsv")?,
    )?];
    // extra sources come as positive_<id>.tsv / negative_<id>.tsv pairs
    for id in suffixed_names(root, "positive_", ".tsv")? {
        let pos = tsv::read_required(root, &format!("positive_{id}.tsv"))?;
        let neg = tsv::read_required(root, &format!("negative_{id}.tsv"))?;
        polarity.push(load_polarity(&id, pos, neg)?);
    }

    let vad = load_vad(tsv::read_required(root, "vad.tsv")?)?;
    let categories = CategoryLexicon::load(
        tsv::read_required(root, "category_registry.tsv")?,
        tsv::read_required(root, "categories.tsv")?,
    )?;
    let modifiers = ModifierTables {
        negations: load_word_set(&tsv::read_required(root, "negations.tsv")?)?,
        intensifiers: load_multipliers(
            &tsv::read_required(root, "intensifiers.tsv")?,
            DEFAULT_INTENSIFIER,
        )?,
        diminishers: load_multipliers(
            &tsv::read_required(root, "diminishers.tsv")?,
            DEFAULT_DIMINISHER,
        )?,
        emoticons: load_emoticons(&tsv::read_required(root, "emoticons.tsv")?)?,
    };

    let mut gazetteers = Vec::new();
    for name in suffixed_names(root, "gazetteer_", ".tsv")? {
        gazetteers.push(load_gazetteer(root, &name)?);
    }

    let stopwords = match tsv::read_optional(root, "stopwords.tsv")? {
        Some(f) => load_word_set(&f)?,
        None => BTreeSet::new(),
    };
    let frequencies = match tsv::read_optional(root, "frequencies.tsv")? {
        Some(f) => load_frequencies(&f)?,
        None => BTreeMap::new(),
    };

    let bundle = LexiconBundle::new(polarity, vad, categories, modifiers, gazetteers)?
        .with_focus_tables(stopwords, frequencies);
    let c = bundle.counts();
    log::info!(
        "loaded lexicons from {}: {} positive, {} negative, {} vad, {} category patterns, {} modifiers, {} emoticons, {} gazetteers",
        root.display(),
        c.positive,
        c.negative,
        c.vad,
        c.category_patterns,
        c.negations + c.intensifiers + c.diminishers,
        c.emoticons,
        c.gazetteer_phrases.len()
    );
    Ok(bundle)
}

fn suffixed_names(root: &Path, prefix: &str, suffix: &str) -> Result<Vec<String>, LexiconError> {
    let dir = fs::read_dir(root).map_err(|source| LexiconError::Io {
        path: root.to_path_buf(),
        source,
    })?;
    let mut names: Vec<String> = dir
        .filter_map(Result::ok)
        .filter_map(|e| e.file_name().to_str().map(str::to_string))
        .filter_map(|n| {
            n.strip_prefix(prefix)
                .and_then(|rest| rest.strip_suffix(suffix))
                .filter(|id| !id.is_empty())
                .map(str::to_string)
        })
        .collect();
    names.sort();
    Ok(names)
}

fn load_word_set(file: &tsv::TsvFile) -> Result<BTreeSet<String>, LexiconError> {
    let mut set = BTreeSet::new();
    for row in &file.rows {
        tsv::expect_fields(file, row, 1)?;
        let word = tsv::word_entry(file, row, &row.fields[0])?;
        if !set.insert(word.clone()) {
            return Err(LexiconError::Duplicate {
                file: file.file_name(),
                line: row.line,
                entry: word,
            });
        }
    }
    Ok(set)
}

fn load_polarity(
    id: &str,
    positive: tsv::TsvFile,
    negative: tsv::TsvFile,
) -> Result<PolarityLexicon, LexiconError> {
    PolarityLexicon::new(id, load_word_set(&positive)?, load_word_set(&negative)?)
}

fn load_vad(file: tsv::TsvFile) -> Result<VadLexicon, LexiconError> {
    let mut entries = BTreeMap::new();
    for row in &file.rows {
        tsv::expect_fields(&file, row, 4)?;
        let word = tsv::word_entry(&file, row, &row.fields[0])?;
        let entry = VadEntry {
            valence: tsv::number(&file, row, &row.fields[1])?,
            arousal: tsv::number(&file, row, &row.fields[2])?,
            dominance: tsv::number(&file, row, &row.fields[3])?,
        };
        if entries.insert(word.clone(), entry).is_some() {
            return Err(LexiconError::Duplicate {
                file: file.file_name(),
                line: row.line,
                entry: word,
            });
        }
    }
    VadLexicon::new(entries)
}

fn load_multipliers(
    file: &tsv::TsvFile,
    default: f64,
) -> Result<BTreeMap<String, f64>, LexiconError> {
    let mut map = BTreeMap::new();
    for row in &file.rows {
        if row.fields.is_empty() || row.fields.len() > 2 {
            return Err(file.format_error(row.line, "expected `word` or `word<TAB>multiplier`"));
        }
        let word = tsv::word_entry(file, row, &row.fields[0])?;
        let mult = match row.fields.get(1) {
            Some(raw) => tsv::number(file, row, raw)?,
            None => default,
        };
        if map.insert(word.clone(), mult).is_some() {
            return Err(LexiconError::Duplicate {
                file: file.file_name(),
                line: row.line,
                entry: word,
            });
        }
    }
    Ok(map)
}

fn load_emoticons(file: &tsv::TsvFile) -> Result<BTreeMap<String, Polarity>, LexiconError> {
    let mut map = BTreeMap::new();
    for row in &file.rows {
        tsv::expect_fields(file, row, 2)?;
        // emoticons keep their case: ":D" and ":d" are different faces
        let face = row.fields[0].clone();
        if face.is_empty() || face.chars().any(char::is_whitespace) {
            return Err(file.format_error(row.line, "emoticon must be a nonempty single token"));
        }
        let polarity = row.fields[1]
            .parse::<Polarity>()
            .map_err(|m| file.format_error(row.line, m))?;
        if map.insert(face.clone(), polarity).is_some() {
            return Err(LexiconError::Duplicate {
                file: file.file_name(),
                line: row.line,
                entry: face,
            });
        }
    }
    Ok(map)
}

fn load_gazetteer(root: &Path, name: &str) -> Result<Gazetteer, LexiconError> {
    let phrases = tsv::read_required(root, &format!("gazetteer_{name}.tsv"))?;
    let mut entries = BTreeSet::new();
    for row in &phrases.rows {
        let phrase = row.fields.join(" ").to_lowercase();
        let phrase = phrase.split_whitespace().collect::<Vec<_>>().join(" ");
        if !entries.insert(phrase.clone()) {
            return Err(LexiconError::Duplicate {
                file: phrases.file_name(),
                line: row.line,
                entry: phrase,
            });
        }
    }

    let regex_path = root.join(format!("gazetteer_{name}.regex"));
    let mut patterns = Vec::new();
    if regex_path.is_file() {
        let text = fs::read_to_string(&regex_path).map_err(|source| LexiconError::Io {
            path: regex_path.clone(),
            source,
        })?;
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let re = compile_case_insensitive(line).map_err(|e| LexiconError::Format {
                file: format!("gazetteer_{name}.regex"),
                line: idx + 1,
                message: e.to_string(),
            })?;
            patterns.push(re);
        }
    }
    Ok(Gazetteer {
        name: name.to_string(),
        entries,
        patterns,
    })
}

fn load_frequencies(file: &tsv::TsvFile) -> Result<BTreeMap<String, u64>, LexiconError> {
    let mut map = BTreeMap::new();
    for row in &file.rows {
        tsv::expect_fields(file, row, 2)?;
        let word = tsv::word_entry(file, row, &row.fields[0])?;
        let count = row.fields[1]
            .parse::<u64>()
            .map_err(|_| file.format_error(row.line, "count must be a non-negative integer"))?;
        if map.insert(word.clone(), count).is_some() {
            return Err(LexiconError::Duplicate {
                file: file.file_name(),
                line: row.line,
                entry: word,
            });
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &Path, name: &str, body: &str) {
        let mut f = fs::File::create(dir.join(name)).unwrap();
        f.write_all(body.as_bytes()).unwrap();
    }

    fn minimal_dir() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path();
        write(p, "positive.tsv", "# comment\nGlad\nhappy\nwelcome\ngreat\nsir\nplease\n");
        write(p, "negative.tsv", "bad\nsad\n");
        write(p, "vad.tsv", "happy\t8.21\t6.49\t7.09\nsad\t1.61\t4.13\t3.40\n");
        write(p, "category_registry.tsv", "posemo\tpositive emotion\tpsychological\nnegate\tnegations\tlinguistic\n");
        write(p, "categories.tsv", "happ*\tposemo\nnot\tnegate\n");
        write(p, "negations.tsv", "not\n");
        write(p, "intensifiers.tsv", "very\t2.0\nreally\n");
        write(p, "diminishers.tsv", "slightly\t0.5\n");
        write(p, "emoticons.tsv", ":)\tpositive\n:(\tnegative\n");
        dir
    }

    #[test]
    fn loads_minimal_directory() {
        let dir = minimal_dir();
        let bundle = load_lexicons(dir.path()).unwrap();
        for w in ["glad", "happy", "welcome", "great", "sir", "please"] {
            assert!(bundle.positive_words().contains(w), "{w}");
        }
        let happy = bundle.vad.get("happy").unwrap();
        assert_eq!((happy.valence, happy.arousal, happy.dominance), (8.21, 6.49, 7.09));
        assert_eq!(bundle.modifiers.intensifiers["really"], DEFAULT_INTENSIFIER);
        assert_eq!(bundle.modifiers.emoticon(":("), Some(Polarity::Negative));
        assert!(bundle.gazetteers.is_empty());
    }

    #[test]
    fn missing_required_file() {
        let dir = minimal_dir();
        fs::remove_file(dir.path().join("vad.tsv")).unwrap();
        assert!(matches!(
            load_lexicons(dir.path()),
            Err(LexiconError::MissingFile(p)) if p.ends_with("vad.tsv")
        ));
    }

    #[test]
    fn malformed_row_reports_line() {
        let dir = minimal_dir();
        write(dir.path(), "vad.tsv", "# header\nhappy\t8.2\t6.4\n");
        match load_lexicons(dir.path()) {
            Err(LexiconError::Format { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn vad_out_of_range_is_an_error_not_clamped() {
        let dir = minimal_dir();
        write(dir.path(), "vad.tsv", "happy\t9.5\t6.4\t7.0\n");
        assert!(matches!(
            load_lexicons(dir.path()),
            Err(LexiconError::Invariant(_))
        ));
        write(dir.path(), "vad.tsv", "happy\t0.99\t6.4\t7.0\n");
        assert!(load_lexicons(dir.path()).is_err());
    }

    #[test]
    fn duplicate_word_rejected() {
        let dir = minimal_dir();
        write(dir.path(), "negative.tsv", "bad\nBAD\n");
        assert!(matches!(
            load_lexicons(dir.path()),
            Err(LexiconError::Duplicate { line: 2, .. })
        ));
    }

    #[test]
    fn polarity_overlap_rejected() {
        let dir = minimal_dir();
        write(dir.path(), "negative.tsv", "bad\nhappy\n");
        assert!(matches!(
            load_lexicons(dir.path()),
            Err(LexiconError::Invariant(_))
        ));
    }

    #[test]
    fn modifier_multiplier_bounds() {
        let dir = minimal_dir();
        write(dir.path(), "intensifiers.tsv", "very\t0.9\n");
        assert!(load_lexicons(dir.path()).is_err());
        let dir = minimal_dir();
        write(dir.path(), "diminishers.tsv", "slightly\t1.0\n");
        assert!(load_lexicons(dir.path()).is_err());
        let dir = minimal_dir();
        write(dir.path(), "diminishers.tsv", "not\t0.5\n");
        assert!(load_lexicons(dir.path()).is_err());
    }

    #[test]
    fn empty_gazetteer_is_disabled() {
        let dir = minimal_dir();
        write(dir.path(), "gazetteer_snacks.tsv", "# nothing yet\n");
        let bundle = load_lexicons(dir.path()).unwrap();
        let g = bundle.gazetteer("snacks").unwrap();
        assert!(g.entries().is_empty());
        assert!(!g.is_enabled());
    }

    #[test]
    fn gazetteer_with_regex() {
        let dir = minimal_dir();
        write(dir.path(), "gazetteer_drinks.tsv", "Beer\nred   wine\n");
        write(dir.path(), "gazetteer_drinks.regex", "# c\n\\bpint of \\w+\n");
        let bundle = load_lexicons(dir.path()).unwrap();
        let g = bundle.gazetteer("drinks").unwrap();
        assert!(g.contains("beer") && g.contains("red wine"));
        assert_eq!(g.max_phrase_words(), 2);
        assert!(g.patterns()[0].is_match("A PINT OF stout"));
    }

    #[test]
    fn extra_polarity_sources_are_unioned() {
        let dir = minimal_dir();
        write(dir.path(), "positive_gi.tsv", "happy\ncheerful\n");
        write(dir.path(), "negative_gi.tsv", "gloomy\n");
        let bundle = load_lexicons(dir.path()).unwrap();
        assert_eq!(bundle.polarity.len(), 2);
        assert!(bundle.positive_words().contains("cheerful"));
        assert_eq!(
            bundle.positive_words().iter().filter(|w| *w == "happy").count(),
            1
        );
    }

    #[test]
    fn loading_twice_is_identical() {
        let dir = minimal_dir();
        assert_eq!(
            load_lexicons(dir.path()).unwrap(),
            load_lexicons(dir.path()).unwrap()
        );
    }
}
