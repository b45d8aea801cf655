use std::collections::BTreeMap;

use affect_core::perception::SentimentClass;

use crate::records::UtteranceRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grouping {
    /// Two groups, `system` and `user`.
    SystemVsHuman,
    PerClass,
}

impl Grouping {
    fn key(self, r: &UtteranceRecord) -> (u8, String) {
        match self {
            Self::SystemVsHuman if r.class.is_system() => (0, "system".into()),
            Self::SystemVsHuman => (1, "user".into()),
            Self::PerClass => (r.class as u8, r.class.as_str().into()),
        }
    }
}

/// One output row. Missing values (sd for n < 2, rates over zero words)
/// stay `None` rather than becoming zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    pub group: String,
    pub metric: String,
    /// Utterances in the group.
    pub n: usize,
    pub total: Option<f64>,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
}

fn groups(records: &[UtteranceRecord], grouping: Grouping) -> Vec<(String, Vec<&UtteranceRecord>)> {
    let mut map: BTreeMap<(u8, String), Vec<&UtteranceRecord>> = BTreeMap::new();
    for r in records {
        map.entry(grouping.key(r)).or_default().push(r);
    }
    map.into_iter().map(|((_, name), rs)| (name, rs)).collect()
}

fn mean_sd(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    let n = xs.len();
    if n == 0 {
        return (None, None);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let sd = (n >= 2).then(|| {
        let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    });
    (Some(mean), sd)
}

/// Per group: total words, and mean and sample sd of words per utterance.
pub fn word_count_stats(records: &[UtteranceRecord], grouping: Grouping) -> Vec<GroupStats> {
    groups(records, grouping)
        .into_iter()
        .map(|(group, rs)| {
            let xs: Vec<f64> = rs.iter().map(|r| r.word_count as f64).collect();
            let (mean, sd) = mean_sd(&xs);
            GroupStats {
                group,
                metric: "words".into(),
                n: rs.len(),
                total: Some(xs.iter().sum()),
                mean,
                sd,
            }
        })
        .collect()
}

/// System words divided by user words, from `word_count_stats` rows grouped
/// system-vs-human.
pub fn system_user_ratio(stats: &[GroupStats]) -> Option<f64> {
    let total = |g: &str| stats.iter().find(|s| s.group == g && s.metric == "words")?.total;
    let (sys, user) = (total("system")?, total("user")?);
    (user > 0.0).then(|| sys / user)
}

/// Per group and category: tokens in the category per 100 words of the
/// group (`mean`), with the raw token count in `total`.
pub fn category_rates(records: &[UtteranceRecord], categories: &[&str], grouping: Grouping) -> Vec<GroupStats> {
    let mut out = Vec::new();
    for (group, rs) in groups(records, grouping) {
        let words: usize = rs.iter().map(|r| r.word_count).sum();
        for cat in categories {
            let hits: usize = rs.iter().map(|r| r.category(cat)).sum();
            out.push(GroupStats {
                group: group.clone(),
                metric: format!("{cat}_per_100_words"),
                n: rs.len(),
                total: Some(hits as f64),
                mean: (words > 0).then(|| 100.0 * hits as f64 / words as f64),
                sd: None,
            });
        }
    }
    out
}

/// Per group, the share of utterances in each sentiment class
/// (negative, neutral, positive).
pub fn sentiment_distribution(records: &[UtteranceRecord], grouping: Grouping) -> Vec<GroupStats> {
    let mut out = Vec::new();
    for (group, rs) in groups(records, grouping) {
        for class in SentimentClass::ALL {
            let k = rs.iter().filter(|r| r.sentiment == class).count();
            out.push(GroupStats {
                group: group.clone(),
                metric: format!("share_{class}"),
                n: rs.len(),
                total: Some(k as f64),
                mean: Some(k as f64 / rs.len() as f64),
                sd: None,
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    WordCount,
    Categories,
    Sentiment,
}

/// Emotion-word categories reported by [`ReportKind::Categories`].
pub const EMOTION_CATEGORIES: [&str; 2] = ["posemo", "negemo"];

/// Rows for one report. The word-count report lists system and user
/// totals, then each class, then a `system/user` row whose `mean` is the
/// word ratio.
pub fn build_report(records: &[UtteranceRecord], kind: ReportKind) -> Vec<GroupStats> {
    match kind {
        ReportKind::WordCount => {
            let mut rows = word_count_stats(records, Grouping::SystemVsHuman);
            let ratio = system_user_ratio(&rows);
            rows.extend(word_count_stats(records, Grouping::PerClass));
            rows.push(GroupStats {
                group: "system/user".into(),
                metric: "word_ratio".into(),
                n: records.len(),
                total: None,
                mean: ratio,
                sd: None,
            });
            rows
        }
        ReportKind::Categories => category_rates(records, &EMOTION_CATEGORIES, Grouping::PerClass),
        ReportKind::Sentiment => sentiment_distribution(records, Grouping::PerClass),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::records::ParticipantClass;

    fn rec(class: ParticipantClass, words: usize, sentiment: SentimentClass, cats: &[(&str, usize)]) -> UtteranceRecord {
        UtteranceRecord {
            room: "r".into(),
            class,
            sender: "s".into(),
            text: String::new(),
            word_count: words,
            sentiment,
            categories: cats.iter().map(|(c, n)| (c.to_string(), *n)).collect(),
        }
    }

    #[test]
    fn single_utterance_has_no_sd() {
        let rs = [rec(ParticipantClass::Bartender, 7, SentimentClass::Neutral, &[])];
        let s = word_count_stats(&rs, Grouping::PerClass);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].mean, Some(7.0));
        assert_eq!(s[0].sd, None);
    }

    #[test]
    fn sample_sd() {
        let rs: Vec<_> = [2, 4, 4, 4, 5, 5, 7, 9]
            .iter()
            .map(|w| rec(ParticipantClass::Included, *w, SentimentClass::Neutral, &[]))
            .collect();
        let s = &word_count_stats(&rs, Grouping::PerClass)[0];
        assert_eq!(s.mean, Some(5.0));
        assert!((s.sd.unwrap() - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rates_per_hundred_words() {
        let rs = [rec(ParticipantClass::Included, 3, SentimentClass::Neutral, &[("posemo", 2), ("negemo", 1)])];
        let s = category_rates(&rs, &["posemo", "negemo"], Grouping::PerClass);
        assert!((s[0].mean.unwrap() - 66.666_666_666).abs() < 1e-6);
        assert!((s[1].mean.unwrap() - 33.333_333_333).abs() < 1e-6);
    }

    #[test]
    fn wordless_group_has_no_rate() {
        let rs = [rec(ParticipantClass::Excluded, 0, SentimentClass::Neutral, &[])];
        let s = category_rates(&rs, &["posemo"], Grouping::PerClass);
        assert_eq!(s[0].mean, None);
        assert!(category_rates(&[], &["posemo"], Grouping::PerClass).is_empty());
    }

    #[test]
    fn distribution_shares() {
        use SentimentClass::*;
        let rs: Vec<_> = [Positive, Positive, Negative, Neutral]
            .iter()
            .map(|c| rec(ParticipantClass::Bartender, 1, *c, &[]))
            .collect();
        let s = sentiment_distribution(&rs, Grouping::PerClass);
        let shares: Vec<f64> = s.iter().map(|g| g.mean.unwrap()).collect();
        assert_eq!(shares, [0.25, 0.25, 0.5]);
        let neutral: Vec<_> = (0..5).map(|_| rec(ParticipantClass::Included, 1, Neutral, &[])).collect();
        let s = sentiment_distribution(&neutral, Grouping::PerClass);
        assert_eq!(s.iter().map(|g| g.mean.unwrap()).collect::<Vec<_>>(), [0.0, 1.0, 0.0]);
    }

    #[test]
    fn system_vs_human_groups_and_ratio() {
        let rs = [
            rec(ParticipantClass::Bartender, 120, SentimentClass::Neutral, &[]),
            rec(ParticipantClass::Bartender, 80, SentimentClass::Neutral, &[]),
            rec(ParticipantClass::Included, 50, SentimentClass::Neutral, &[]),
            rec(ParticipantClass::Excluded, 40, SentimentClass::Neutral, &[]),
        ];
        let s = word_count_stats(&rs, Grouping::SystemVsHuman);
        assert_eq!(s.iter().map(|g| g.group.as_str()).collect::<Vec<_>>(), ["system", "user"]);
        assert!(system_user_ratio(&s).unwrap() > 2.0);
        let per = word_count_stats(&rs, Grouping::PerClass);
        assert_eq!(per.iter().map(|g| g.group.as_str()).collect::<Vec<_>>(), ["Bartender", "Included", "Excluded"]);
    }
}
