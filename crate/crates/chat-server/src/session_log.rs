//! Session transcripts. The TSV holds `timestamp`, `interactant` and
//! `utterance` columns; a JSON sidecar with the same stem holds the config,
//! role assignment, seed and questionnaire answers.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use affect_core::control::Role;
use chrono::{DateTime, NaiveDateTime, Timelike, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::SessionConfig;
use crate::questionnaire::Answers;

pub const TSV_HEADER: &str = "timestamp\tinteractant\tutterance";
pub const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

#[derive(Debug, Error)]
pub enum LogReadError {
    #[error("{0}: {1}")]
    Io(String, #[source] io::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("no metadata sidecar {0}")]
    MetadataMissing(String),
    #[error("metadata: {0}")]
    Metadata(#[from] serde_json::Error),
}

fn format_err(line: usize, message: impl Into<String>) -> LogReadError {
    LogReadError::Format {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub timestamp: DateTime<Utc>,
    pub sender: String,
    pub text: String,
}

impl Message {
    /// Timestamps keep whole seconds only.
    pub fn new(timestamp: DateTime<Utc>, sender: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            timestamp: truncate_secs(timestamp),
            sender: sender.into(),
            text: text.into(),
        }
    }

    pub fn ts_string(&self) -> String {
        self.timestamp.format(TIMESTAMP_FORMAT).to_string()
    }
}

pub fn truncate_secs(t: DateTime<Utc>) -> DateTime<Utc> {
    t.with_nanosecond(0).unwrap_or(t)
}

pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    NaiveDateTime::parse_from_str(s, TIMESTAMP_FORMAT)
        .ok()
        .map(|t| t.and_utc())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionMeta {
    pub room: String,
    pub config: SessionConfig,
    pub bot_name: String,
    pub roles: BTreeMap<String, Role>,
    pub seed: u64,
    pub started_at: Option<DateTime<Utc>>,
    pub closed_at: Option<DateTime<Utc>>,
    #[serde(default)]
    pub questionnaire: BTreeMap<String, Answers>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionLog {
    pub meta: SessionMeta,
    pub messages: Vec<Message>,
}

pub fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape_field(s: &str) -> Option<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        out.push(match chars.next()? {
            '\\' => '\\',
            't' => '\t',
            'n' => '\n',
            'r' => '\r',
            _ => return None,
        });
    }
    Some(out)
}

pub fn messages_to_tsv(messages: &[Message]) -> String {
    let mut out = String::from(TSV_HEADER);
    out.push('\n');
    for m in messages {
        out.push_str(&m.ts_string());
        out.push('\t');
        out.push_str(&escape_field(&m.sender));
        out.push('\t');
        out.push_str(&escape_field(&m.text));
        out.push('\n');
    }
    out
}

pub fn parse_tsv(text: &str) -> Result<Vec<Message>, LogReadError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == TSV_HEADER => {}
        Some(_) => return Err(format_err(1, format!("header must be {TSV_HEADER:?}"))),
        None => return Err(format_err(1, "empty file")),
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(format_err(n, format!("expected 3 columns, found {}", cols.len())));
        }
        let timestamp = parse_timestamp(cols[0]).ok_or_else(|| format_err(n, "bad timestamp"))?;
        let sender = unescape_field(cols[1]).ok_or_else(|| format_err(n, "bad escape"))?;
        let text = unescape_field(cols[2]).ok_or_else(|| format_err(n, "bad escape"))?;
        out.push(Message {
            timestamp,
            sender,
            text,
        });
    }
    Ok(out)
}

impl SessionLog {
    pub fn to_tsv(&self) -> String {
        messages_to_tsv(&self.messages)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.meta).expect("metadata serializes");
        s.push('\n');
        s
    }

    pub fn parse(tsv: &str, json: &str) -> Result<Self, LogReadError> {
        Ok(Self {
            messages: parse_tsv(tsv)?,
            meta: serde_json::from_str(json)?,
        })
    }

    /// Writes `<room>.tsv` and `<room>.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> io::Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let tsv = dir.join(format!("{}.tsv", self.meta.room));
        let json = dir.join(format!("{}.json", self.meta.room));
        fs::write(&tsv, self.to_tsv())?;
        fs::write(&json, self.to_json())?;
        Ok((tsv, json))
    }

    /// Reads a TSV file and its `.json` sidecar.
    pub fn read(tsv_path: &Path) -> Result<Self, LogReadError> {
        let json_path = tsv_path.with_extension("json");
        if !json_path.is_file() {
            return Err(LogReadError::MetadataMissing(json_path.display().to_string()));
        }
        let read = |p: &Path| fs::read_to_string(p).map_err(|e| LogReadError::Io(p.display().to_string(), e));
        Self::parse(&read(tsv_path)?, &read(&json_path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;
    use proptest::prelude::*;

    fn t(s: u32) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2013, 5, 2, 16, 40, s).unwrap()
    }

    #[test]
    fn tsv_rows() {
        let msgs = vec![
            Message::new(t(43), "bartender", "hi, i am the bartender here."),
            Message::new(t(59), "Juliana", "hello"),
        ];
        let tsv = messages_to_tsv(&msgs);
        assert_eq!(
            tsv,
            "timestamp\tinteractant\tutterance\n\
             2013-05-02T16:40:43Z\tbartender\thi, i am the bartender here.\n\
             2013-05-02T16:40:59Z\tJuliana\thello\n"
        );
        assert_eq!(parse_tsv(&tsv).unwrap(), msgs);
    }

    #[test]
    fn sub_second_precision_dropped() {
        let m = Message::new(t(1) + chrono::Duration::milliseconds(999), "a", "b");
        assert_eq!(m.timestamp, t(1));
    }

    #[test]
    fn malformed_rows() {
        assert!(matches!(parse_tsv(""), Err(LogReadError::Format { line: 1, .. })));
        assert!(parse_tsv("time\tsender\n").is_err());
        let bad_cols = format!("{TSV_HEADER}\n2013-05-02T16:40:43Z\tx\n");
        assert!(matches!(parse_tsv(&bad_cols), Err(LogReadError::Format { line: 2, .. })));
        let bad_ts = format!("{TSV_HEADER}\n4:40:43 PM\tx\ty\n");
        assert!(parse_tsv(&bad_ts).is_err());
        let bad_esc = format!("{TSV_HEADER}\n2013-05-02T16:40:43Z\tx\ty\\q\n");
        assert!(parse_tsv(&bad_esc).is_err());
    }

    #[test]
    fn missing_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("room-1.tsv");
        fs::write(&p, format!("{TSV_HEADER}\n")).unwrap();
        assert!(matches!(SessionLog::read(&p), Err(LogReadError::MetadataMissing(_))));
    }

    proptest! {
        #[test]
        fn escaping_round_trips(s in "[ -~\t\n\r\\\\äé]{0,40}") {
            let e = escape_field(&s);
            prop_assert!(!e.contains('\t') && !e.contains('\n') && !e.contains('\r'));
            prop_assert_eq!(unescape_field(&e).unwrap(), s);
        }

        #[test]
        fn tsv_round_trips(rows in prop::collection::vec(("[A-Za-z]{1,8}", "[ -~\t\n]{0,30}", 0u32..60), 0..10)) {
            let msgs: Vec<Message> = rows.iter().map(|(s, x, sec)| Message::new(t(*sec), s.clone(), x.clone())).collect();
            prop_assert_eq!(parse_tsv(&messages_to_tsv(&msgs)).unwrap(), msgs);
        }
    }
}
