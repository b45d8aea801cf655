//! Dialogue-act tagging over lowercase unigram and bigram presence features.
//!
//! The default model is a one-vs-rest averaged perceptron. Anything that
//! implements [`DaModel`] can be plugged into the perceiver instead.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::tokenize::{tokenize, Token};
use crate::lexicon::ModifierTables;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DialogueAct {
    Accept,
    Bye,
    Clarify,
    Continuer,
    Emotion,
    Emphasis,
    Greet,
    NoAnswer,
    Other,
    Reject,
    Statement,
    WhQuestion,
    YesAnswer,
    YesNoQuestion,
    Order,
}

impl DialogueAct {
    pub const ALL: [DialogueAct; 15] = [
        Self::Accept,
        Self::Bye,
        Self::Clarify,
        Self::Continuer,
        Self::Emotion,
        Self::Emphasis,
        Self::Greet,
        Self::NoAnswer,
        Self::Other,
        Self::Reject,
        Self::Statement,
        Self::WhQuestion,
        Self::YesAnswer,
        Self::YesNoQuestion,
        Self::Order,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Accept => "Accept",
            Self::Bye => "Bye",
            Self::Clarify => "Clarify",
            Self::Continuer => "Continuer",
            Self::Emotion => "Emotion",
            Self::Emphasis => "Emphasis",
            Self::Greet => "Greet",
            Self::NoAnswer => "NoAnswer",
            Self::Other => "Other",
            Self::Reject => "Reject",
            Self::Statement => "Statement",
            Self::WhQuestion => "WhQuestion",
            Self::YesAnswer => "YesAnswer",
            Self::YesNoQuestion => "YesNoQuestion",
            Self::Order => "Order",
        }
    }

    pub fn is_question(self) -> bool {
        matches!(self, Self::WhQuestion | Self::YesNoQuestion)
    }
}

impl fmt::Display for DialogueAct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DialogueAct {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        // NPS-style spellings are accepted as aliases
        let alias = match s {
            "nAnswer" => "NoAnswer",
            "yAnswer" => "YesAnswer",
            "whQuestion" => "WhQuestion",
            "ynQuestion" => "YesNoQuestion",
            other => other,
        };
        Self::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(alias))
            .ok_or_else(|| format!("unknown dialogue act {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DialogueActLabel {
    pub label: DialogueAct,
    /// Softmax-normalized class score in [0, 1].
    pub confidence: f64,
}

impl DialogueActLabel {
    pub fn empty() -> Self {
        Self {
            label: DialogueAct::Other,
            confidence: 0.0,
        }
    }
}

#[derive(Debug, Error)]
pub enum DaError {
    #[error("line {line}: unknown dialogue act class {label:?}")]
    UnknownClass { line: usize, label: String },
    #[error("line {line}: expected `label<TAB>text`")]
    Format { line: usize },
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("invalid model file: {0}")]
    BadModel(String),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
}

/// Settings of the kernel classifier the taxonomy and feature set were
/// originally tuned with. Kept as documentation of the reference setup;
/// the default model here is linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceKernelConfig {
    pub svm_type: &'static str,
    pub kernel: &'static str,
    pub cost: f64,
    pub gamma: f64,
    pub reported_cv_accuracy: f64,
}

pub const REFERENCE_KERNEL_CONFIG: ReferenceKernelConfig = ReferenceKernelConfig {
    svm_type: "C-SVM",
    kernel: "RBF",
    cost: 8.0,
    gamma: 0.03125,
    reported_cv_accuracy: 0.761,
};

/// A trained dialogue-act model.
pub trait DaModel: Send + Sync + fmt::Debug {
    fn classify_tokens(&self, tokens: &[Token]) -> DialogueActLabel;
}

pub type Corpus = Vec<(String, DialogueAct)>;

/// Parses `label<TAB>text` lines; `#` lines and blank lines are skipped.
pub fn parse_corpus(text: &str) -> Result<Corpus, DaError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (label, utterance) = line
            .split_once('\t')
            .ok_or(DaError::Format { line: idx + 1 })?;
        let label = label
            .trim()
            .parse::<DialogueAct>()
            .map_err(|_| DaError::UnknownClass {
                line: idx + 1,
                label: label.trim().to_string(),
            })?;
        out.push((utterance.trim().to_string(), label));
    }
    Ok(out)
}

pub fn load_corpus(path: &Path) -> Result<Corpus, DaError> {
    let text =
        fs::read_to_string(path).map_err(|e| DaError::Io(path.display().to_string(), e))?;
    parse_corpus(&text)
}

const BOS: &str = "<s>";
const EOS: &str = "</s>";

/// Lowercase unigram and bigram presence features, sorted and deduplicated.
pub fn features(tokens: &[Token]) -> BTreeSet<String> {
    let mut feats = BTreeSet::new();
    let lowered: Vec<&str> = tokens.iter().map(|t| t.lower.as_str()).collect();
    for w in &lowered {
        feats.insert(format!("u:{w}"));
    }
    let padded: Vec<&str> = std::iter::once(BOS)
        .chain(lowered.iter().copied())
        .chain(std::iter::once(EOS))
        .collect();
    for pair in padded.windows(2) {
        feats.insert(format!("b:{} {}", pair[0], pair[1]));
    }
    feats
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { epochs: 12, seed: 7 }
    }
}

/// One-vs-rest averaged perceptron.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearDaModel {
    labels: Vec<DialogueAct>,
    vocab: BTreeMap<String, usize>,
    /// `weights[class][feature]`; the last slot of each row is the bias.
    weights: Vec<Vec<f64>>,
}

pub const MODEL_MAGIC: &str = "ALDA1";

impl LinearDaModel {
    pub fn labels(&self) -> &[DialogueAct] {
        &self.labels
    }

    pub fn train(
        corpus: &[(String, DialogueAct)],
        modifiers: &ModifierTables,
        config: TrainConfig,
    ) -> Result<Self, DaError> {
        if corpus.is_empty() {
            return Err(DaError::EmptyCorpus);
        }
        let labels: Vec<DialogueAct> = corpus
            .iter()
            .map(|(_, l)| *l)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let encoded: Vec<BTreeSet<String>> = corpus
            .iter()
            .map(|(text, _)| features(&tokenize(text, modifiers)))
            .collect();
        let vocab: BTreeMap<String, usize> = encoded
            .iter()
            .flatten()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(i, f)| (f, i))
            .collect();
        let bias = vocab.len();
        let examples: Vec<(Vec<usize>, DialogueAct)> = encoded
            .iter()
            .zip(corpus)
            .map(|(feats, (_, label))| {
                let mut idx: Vec<usize> = feats.iter().map(|f| vocab[f]).collect();
                idx.push(bias);
                (idx, *label)
            })
            .collect();

        let mut order: Vec<usize> = (0..examples.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut schedule = Vec::with_capacity(config.epochs);
        for _ in 0..config.epochs {
            order.shuffle(&mut rng);
            schedule.push(order.clone());
        }

        let weights = labels
            .iter()
            .map(|class| {
                let mut w = vec![0.0f64; bias + 1];
                let mut acc = vec![0.0f64; bias + 1];
                let mut step = 1.0f64;
                for epoch in &schedule {
                    for &i in epoch {
                        let (x, label) = &examples[i];
                        let y = if label == class { 1.0 } else { -1.0 };
                        let score: f64 = x.iter().map(|&f| w[f]).sum();
                        if y * score <= 0.0 {
                            for &f in x {
                                w[f] += y;
                                acc[f] += step * y;
                            }
                        }
                        step += 1.0;
                    }
                }
                w.iter().zip(&acc).map(|(w, a)| w - a / step).collect()
            })
            .collect();

        Ok(Self {
            labels,
            vocab,
            weights,
        })
    }

    /// Raw class scores for a feature set.
    pub fn scores(&self, feats: &BTreeSet<String>) -> Vec<f64> {
        let bias = self.vocab.len();
        let idx: Vec<usize> = feats
            .iter()
            .filter_map(|f| self.vocab.get(f).copied())
            .chain(std::iter::once(bias))
            .collect();
        self.weights
            .iter()
            .map(|row| idx.iter().map(|&i| row[i]).sum())
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(MODEL_MAGIC);
        out.push('\n');
        let labels: Vec<&str> = self.labels.iter().map(|l| l.as_str()).collect();
        out.push_str(&format!("labels\t{}\n", labels.join(",")));
        out.push_str(&format!("features\t{}\n", self.vocab.len()));
        let row = |i: usize| {
            self.weights
                .iter()
                .map(|w| format!("{:?}", w[i]))
                .collect::<Vec<_>>()
                .join(" ")
        };
        for (feat, &i) in &self.vocab {
            out.push_str(&format!("{feat}\t{}\n", row(i)));
        }
        out.push_str(&format!("{BIAS_KEY}\t{}\n", row(self.vocab.len())));
        out
    }

    pub fn from_text(text: &str) -> Result<Self, DaError> {
        let bad = |m: &str| DaError::BadModel(m.to_string());
        let mut lines = text.lines();
        if lines.next() != Some(MODEL_MAGIC) {
            return Err(bad("missing ALDA1 header"));
        }
        let labels: Vec<DialogueAct> = lines
            .next()
            .and_then(|l| l.strip_prefix("labels\t"))
            .ok_or_else(|| bad("missing labels line"))?
            .split(',')
            .map(|l| l.parse::<DialogueAct>().map_err(DaError::BadModel))
            .collect::<Result<_, _>>()?;
        let n: usize = lines
            .next()
            .and_then(|l| l.strip_prefix("features\t"))
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| bad("missing features line"))?;
        let mut vocab = BTreeMap::new();
        let mut weights = vec![vec![0.0; n + 1]; labels.len()];
        let mut saw_bias = false;
        for line in lines {
            let (feat, values) = line.split_once('\t').ok_or_else(|| bad("malformed row"))?;
            let values: Vec<f64> = values
                .split(' ')
                .map(|v| v.parse::<f64>().map_err(|_| bad("bad weight")))
                .collect::<Result<_, _>>()?;
            if values.len() != labels.len() {
                return Err(bad("weight count does not match label count"));
            }
            let slot = if feat == BIAS_KEY {
                saw_bias = true;
                n
            } else {
                let i = vocab.len();
                if i >= n {
                    return Err(bad("more feature rows than declared"));
                }
                vocab.insert(feat.to_string(), i);
                i
            };
            for (class, v) in values.into_iter().enumerate() {
                weights[class][slot] = v;
            }
        }
        if vocab.len() != n || !saw_bias {
            return Err(bad("truncated model"));
        }
        Ok(Self {
            labels,
            vocab,
            weights,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), DaError> {
        fs::write(path, self.to_text()).map_err(|e| DaError::Io(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<Self, DaError> {
        let text =
            fs::read_to_string(path).map_err(|e| DaError::Io(path.display().to_string(), e))?;
        Self::from_text(&text)
    }
}

const BIAS_KEY: &str = "__bias__";

impl DaModel for LinearDaModel {
    fn classify_tokens(&self, tokens: &[Token]) -> DialogueActLabel {
        if tokens.is_empty() || self.labels.is_empty() {
            return DialogueActLabel::empty();
        }
        let scores = self.scores(&features(tokens));
        // first maximum wins, labels are in a fixed order
        let (best, _) = scores
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bs), (i, &s)| {
                if s > bs {
                    (i, s)
                } else {
                    (bi, bs)
                }
            });
        let max = scores[best];
        let z: f64 = scores.iter().map(|s| (s - max).exp()).sum();
        DialogueActLabel {
            label: self.labels[best],
            confidence: 1.0 / z,
        }
    }
}

pub fn classify_dialogue_act(
    text: &str,
    model: &dyn DaModel,
    modifiers: &ModifierTables,
) -> DialogueActLabel {
    model.classify_tokens(&tokenize(text, modifiers))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub folds: usize,
    pub correct: usize,
    pub total: usize,
    pub fold_accuracy: Vec<f64>,
}

impl CvReport {
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }
}

/// Stratified k-fold cross validation with a seeded fold assignment.
pub fn cross_validate(
    corpus: &[(String, DialogueAct)],
    modifiers: &ModifierTables,
    folds: usize,
    config: TrainConfig,
) -> Result<CvReport, DaError> {
    if corpus.is_empty() {
        return Err(DaError::EmptyCorpus);
    }
    let folds = folds.max(2);
    let mut by_class: BTreeMap<DialogueAct, Vec<usize>> = BTreeMap::new();
    for (i, (_, label)) in corpus.iter().enumerate() {
        by_class.entry(*label).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
    let mut fold_of = vec![0usize; corpus.len()];
    let mut next = 0;
    for idx in by_class.values_mut() {
        idx.shuffle(&mut rng);
        for &i in idx.iter() {
            fold_of[i] = next % folds;
            next += 1;
        }
    }

    let mut report = CvReport {
        folds,
        correct: 0,
        total: 0,
        fold_accuracy: Vec::with_capacity(folds),
    };
    for fold in 0..folds {
        let train: Vec<(String, DialogueAct)> = corpus
            .iter()
            .enumerate()
            .filter(|(i, _)| fold_of[*i] != fold)
            .map(|(_, ex)| ex.clone())
            .collect();
        let model = LinearDaModel::train(&train, modifiers, config)?;
        let (mut ok, mut n) = (0, 0);
        for (i, (text, label)) in corpus.iter().enumerate() {
            if fold_of[i] != fold {
                continue;
            }
            n += 1;
            if classify_dialogue_act(text, &model, modifiers).label == *label {
                ok += 1;
            }
        }
        report.correct += ok;
        report.total += n;
        report
            .fold_accuracy
            .push(if n == 0 { 0.0 } else { ok as f64 / n as f64 });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Corpus {
        [
            ("yes, that's right", DialogueAct::Accept),
            ("bye bye, see you", DialogueAct::Bye),
            ("what do you mean?", DialogueAct::Clarify),
            ("and then", DialogueAct::Continuer),
            ("lol haha", DialogueAct::Emotion),
            ("really really!", DialogueAct::Emphasis),
            ("hello there", DialogueAct::Greet),
            ("nope", DialogueAct::NoAnswer),
            ("brb", DialogueAct::Other),
            ("no way, I disagree", DialogueAct::Reject),
            ("I live in Bremen", DialogueAct::Statement),
            ("what would you like to drink?", DialogueAct::WhQuestion),
            ("yes", DialogueAct::YesAnswer),
            ("are you a robot?", DialogueAct::YesNoQuestion),
            ("a beer please", DialogueAct::Order),
        ]
        .into_iter()
        .map(|(t, l)| (t.to_string(), l))
        .collect()
    }

    #[test]
    fn labels_round_trip() {
        for a in DialogueAct::ALL {
            assert_eq!(a.as_str().parse::<DialogueAct>().unwrap(), a);
        }
        assert_eq!("ynQuestion".parse::<DialogueAct>().unwrap(), DialogueAct::YesNoQuestion);
        assert!("Shout".parse::<DialogueAct>().is_err());
    }

    #[test]
    fn corpus_parsing_rejects_unknown_class() {
        let c = parse_corpus("# c\nGreet\thello\nOrder\tone beer\n").unwrap();
        assert_eq!(c.len(), 2);
        assert!(matches!(
            parse_corpus("Greet\thi\nShout\tHEY\n"),
            Err(DaError::UnknownClass { line: 2, .. })
        ));
        assert!(matches!(parse_corpus("Greet hello"), Err(DaError::Format { line: 1 })));
    }

    #[test]
    fn features_are_unigrams_and_bigrams() {
        let toks = tokenize("Hi there!", &ModifierTables::default());
        let f = features(&toks);
        for expected in ["u:hi", "u:there", "u:!", "b:<s> hi", "b:hi there", "b:there !", "b:! </s>"] {
            assert!(f.contains(expected), "{expected}");
        }
        assert_eq!(f.len(), 7);
    }

    #[test]
    fn toy_corpus_training_accuracy_is_perfect() {
        let m = ModifierTables::default();
        let model = LinearDaModel::train(&toy(), &m, TrainConfig::default()).unwrap();
        for (text, label) in toy() {
            let got = classify_dialogue_act(&text, &model, &m);
            assert_eq!(got.label, label, "{text}");
            assert!((0.0..=1.0).contains(&got.confidence));
        }
    }

    #[test]
    fn empty_utterance_is_other_with_zero_confidence() {
        let m = ModifierTables::default();
        let model = LinearDaModel::train(&toy(), &m, TrainConfig::default()).unwrap();
        assert_eq!(classify_dialogue_act("", &model, &m), DialogueActLabel::empty());
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let m = ModifierTables::default();
        assert!(matches!(
            LinearDaModel::train(&[], &m, TrainConfig::default()),
            Err(DaError::EmptyCorpus)
        ));
    }

    #[test]
    fn model_text_round_trip() {
        let m = ModifierTables::default();
        let model = LinearDaModel::train(&toy(), &m, TrainConfig::default()).unwrap();
        let text = model.to_text();
        assert!(text.starts_with("ALDA1\n"));
        let back = LinearDaModel::from_text(&text).unwrap();
        assert_eq!(back, model);
        assert!(LinearDaModel::from_text("ALDA0\n").is_err());
        let truncated: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(LinearDaModel::from_text(&truncated).is_err());
    }

    #[test]
    fn training_is_deterministic() {
        let m = ModifierTables::default();
        let a = LinearDaModel::train(&toy(), &m, TrainConfig::default()).unwrap();
        let b = LinearDaModel::train(&toy(), &m, TrainConfig::default()).unwrap();
        assert_eq!(a, b);
    }
}
