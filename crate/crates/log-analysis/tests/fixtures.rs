use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;
use std::sync::{Arc, LazyLock};

use affect_analysis::{
    build_report, category_rates, parse_log, parse_log_dir, sentiment_distribution, to_csv_string, word_count_stats,
    AnalysisError, Analyzer, Grouping, ParticipantClass, ReportKind, EMOTION_CATEGORIES,
};
use affect_chat::SessionLog;
use affect_core::lexicon::load_lexicons;
use affect_core::perception::{classify_sentiment, tokenize, SentimentClass, SentimentConfig};
use affect_core::{bundled_data_dir, default_lexicon_dir};

static ANALYZER: LazyLock<Analyzer> = LazyLock::new(|| {
    let bundle = load_lexicons(default_lexicon_dir()).unwrap();
    Analyzer::new(Arc::new(bundle), SentimentConfig::default())
});

fn fixture(name: &str) -> PathBuf {
    bundled_data_dir().join("sessions/fixtures").join(name)
}

/// categories.tsv read straight from disk: (pattern, is_stem, categories).
fn raw_categories() -> Vec<(String, bool, Vec<String>)> {
    let text = fs::read_to_string(default_lexicon_dir().join("categories.tsv")).unwrap();
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (pat, cats) = l.split_once('\t').unwrap();
            let stem = pat.ends_with('*');
            let cats = cats.split(',').map(|c| c.trim().to_string()).collect();
            (pat.trim_end_matches('*').to_string(), stem, cats)
        })
        .collect()
}

fn raw_emoticons() -> BTreeSet<String> {
    let text = fs::read_to_string(default_lexicon_dir().join("emoticons.tsv")).unwrap();
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| l.split('\t').next().unwrap().to_string())
        .collect()
}

/// Naive recount: whitespace chunks trimmed of non-alphanumeric edges.
fn naive_words(text: &str) -> Vec<String> {
    let faces = raw_emoticons();
    text.split_whitespace()
        .filter(|c| !faces.contains(*c))
        .map(|c| c.trim_matches(|ch: char| !ch.is_alphanumeric()).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

fn naive_count(text: &str, cat: &str, table: &[(String, bool, Vec<String>)]) -> usize {
    naive_words(text)
        .iter()
        .filter(|w| {
            table.iter().any(|(pat, stem, cats)| {
                cats.iter().any(|c| c == cat) && if *stem { w.starts_with(pat.as_str()) } else { *w == pat }
            })
        })
        .count()
}

#[test]
fn triadic_fixture_has_three_classes() {
    let recs = parse_log(&fixture("bar-triadic.tsv"), &ANALYZER).unwrap();
    assert_eq!(recs.len(), 50);
    let classes: BTreeSet<_> = recs.iter().map(|r| r.class).collect();
    assert_eq!(
        classes,
        BTreeSet::from([ParticipantClass::Bartender, ParticipantClass::Included, ParticipantClass::Excluded])
    );
    assert!(recs.iter().filter(|r| r.sender == "Maria").all(|r| r.class == ParticipantClass::Excluded));
    assert!(recs.iter().filter(|r| r.sender == "Juliana").all(|r| r.class == ParticipantClass::Included));
    let rows = word_count_stats(&recs, Grouping::PerClass);
    assert_eq!(rows.len(), 3);
}

#[test]
fn word_counts_match_a_naive_recount() {
    let recs = parse_log_dir(&bundled_data_dir().join("sessions/fixtures"), &ANALYZER).unwrap();
    for r in &recs {
        assert_eq!(r.word_count, naive_words(&r.text).len(), "{:?}", r.text);
    }
    let total: usize = recs.iter().map(|r| r.word_count).sum();
    for grouping in [Grouping::SystemVsHuman, Grouping::PerClass] {
        let rows = word_count_stats(&recs, grouping);
        let sum: f64 = rows.iter().map(|s| s.total.unwrap()).sum();
        assert_eq!(sum, total as f64);
        assert_eq!(rows.iter().map(|s| s.n).sum::<usize>(), recs.len());
        for s in &rows {
            assert!((s.mean.unwrap() * s.n as f64 - s.total.unwrap()).abs() < 1e-9);
        }
    }
}

#[test]
fn category_rates_match_a_naive_recount() {
    let table = raw_categories();
    let recs = parse_log_dir(&bundled_data_dir().join("sessions/fixtures"), &ANALYZER).unwrap();
    let cats = ["posemo", "negemo", "social", "i", "you", "negate"];
    for r in &recs {
        for cat in cats {
            assert_eq!(r.category(cat), naive_count(&r.text, cat, &table), "{cat} in {:?}", r.text);
        }
    }
    let rows = category_rates(&recs, &cats, Grouping::PerClass);
    let mut by_group: BTreeMap<&str, Vec<_>> = BTreeMap::new();
    for r in &recs {
        by_group.entry(r.class.as_str()).or_default().push(r);
    }
    for s in &rows {
        let cat = s.metric.strip_suffix("_per_100_words").unwrap();
        let rs = &by_group[s.group.as_str()];
        let hits: usize = rs.iter().map(|r| naive_count(&r.text, cat, &table)).sum();
        let words: usize = rs.iter().map(|r| naive_words(&r.text).len()).sum();
        let expected = 100.0 * hits as f64 / words as f64;
        assert!((s.mean.unwrap() - expected).abs() < 1e-9, "{} {}", s.group, s.metric);
    }
}

#[test]
fn sentiment_shares_sum_to_one_and_match_a_tally() {
    let recs = parse_log_dir(&bundled_data_dir().join("sessions/fixtures"), &ANALYZER).unwrap();
    let rows = sentiment_distribution(&recs, Grouping::PerClass);
    let mut sums: BTreeMap<&str, f64> = BTreeMap::new();
    for s in &rows {
        *sums.entry(s.group.as_str()).or_default() += s.mean.unwrap();
        let class = s.metric.strip_prefix("share_").unwrap();
        let group: Vec<_> = recs.iter().filter(|r| r.class.as_str() == s.group).collect();
        let k = group
            .iter()
            .filter(|r| {
                let toks = tokenize(&r.text, &ANALYZER.bundle.modifiers);
                classify_sentiment(&toks, &ANALYZER.bundle, &SentimentConfig::default()).klass.to_string() == class
            })
            .count();
        assert_eq!(s.total, Some(k as f64));
        assert!((s.mean.unwrap() - k as f64 / group.len() as f64).abs() < 1e-12);
    }
    for (g, sum) in sums {
        assert!((sum - 1.0).abs() < 1e-9, "{g}: {sum}");
    }
    assert_eq!(SentimentClass::ALL.len() * 7, rows.len());
}

#[test]
fn dyadic_fixtures_split_by_profile() {
    let neutral = parse_log(&fixture("stranger-neutral.tsv"), &ANALYZER).unwrap();
    let negative = parse_log(&fixture("stranger-negative.tsv"), &ANALYZER).unwrap();
    let cls = |rs: &[affect_analysis::UtteranceRecord]| rs.iter().map(|r| r.class).collect::<BTreeSet<_>>();
    assert_eq!(
        cls(&neutral),
        BTreeSet::from([ParticipantClass::SystemNeutral, ParticipantClass::UserWithNeutral])
    );
    assert_eq!(
        cls(&negative),
        BTreeSet::from([ParticipantClass::SystemNegative, ParticipantClass::UserWithNegative])
    );
    // the negative bot never produces a positive utterance
    assert!(negative
        .iter()
        .filter(|r| r.class == ParticipantClass::SystemNegative)
        .all(|r| r.sentiment != SentimentClass::Positive && r.category("posemo") == 0));
}

#[test]
fn empty_log_gives_no_rows() {
    let dir = tempfile::tempdir().unwrap();
    let mut log = SessionLog::read(&fixture("stranger-neutral.tsv")).unwrap();
    log.messages.clear();
    log.meta.room = "empty".into();
    let (tsv, _) = log.write_to(dir.path()).unwrap();
    let recs = parse_log(&tsv, &ANALYZER).unwrap();
    assert!(recs.is_empty());
    for kind in [ReportKind::Categories, ReportKind::Sentiment] {
        assert!(build_report(&recs, kind).is_empty());
    }
    assert!(category_rates(&recs, &EMOTION_CATEGORIES, Grouping::SystemVsHuman).is_empty());
}

#[test]
fn missing_sidecar_and_unknown_sender_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    let tsv = dir.path().join("orphan.tsv");
    fs::copy(fixture("stranger-neutral.tsv"), &tsv).unwrap();
    assert!(matches!(parse_log(&tsv, &ANALYZER), Err(AnalysisError::MetadataMissing(_))));

    let mut log = SessionLog::read(&fixture("stranger-neutral.tsv")).unwrap();
    log.meta.room = "intruder".into();
    log.messages[1].sender = "Mallory".into();
    let (tsv, _) = log.write_to(dir.path()).unwrap();
    match parse_log(&tsv, &ANALYZER) {
        Err(AnalysisError::Format(m)) => assert!(m.contains("Mallory"), "{m}"),
        other => panic!("expected a format error, got {other:?}"),
    }
}

#[test]
fn csv_output_is_deterministic() {
    let dir = bundled_data_dir().join("sessions/fixtures");
    for kind in [ReportKind::WordCount, ReportKind::Categories, ReportKind::Sentiment] {
        let a = to_csv_string(&build_report(&parse_log_dir(&dir, &ANALYZER).unwrap(), kind)).unwrap();
        let b = to_csv_string(&build_report(&parse_log_dir(&dir, &ANALYZER).unwrap(), kind)).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("group,metric,n,total,mean,sd\n"));
    }
}
