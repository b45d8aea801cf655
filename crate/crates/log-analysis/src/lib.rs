//! Text analyses over exported session logs: word counts per source,
//! emotion-word rates and sentiment-class distributions per participant
//! class.

pub mod records;
pub mod report;
pub mod stats;

use thiserror::Error;

pub use records::{parse_log, parse_log_dir, Analyzer, ParticipantClass, UtteranceRecord};
pub use report::{export_csv, read_csv, to_csv_string};
pub use stats::{
    build_report, category_rates, sentiment_distribution, system_user_ratio, word_count_stats, GroupStats,
    Grouping, ReportKind, EMOTION_CATEGORIES,
};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("{0}")]
    Format(String),
    #[error("metadata missing: {0}")]
    MetadataMissing(String),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl From<affect_chat::LogReadError> for AnalysisError {
    fn from(e: affect_chat::LogReadError) -> Self {
        use affect_chat::LogReadError as E;
        match e {
            E::MetadataMissing(p) => Self::MetadataMissing(p),
            E::Io(p, e) => Self::Io(p, e),
            other => Self::Format(other.to_string()),
        }
    }
}
