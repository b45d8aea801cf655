//! Line-oriented TSV reading shared by every lexicon file.

use std::fs;
use std::path::{Path, PathBuf};

use super::LexiconError;

/// One non-comment, non-blank row of a TSV file.
#[derive(Debug, Clone)]
pub(crate) struct Row {
    pub line: usize,
    pub fields: Vec<String>,
}

pub(crate) struct TsvFile {
    pub path: PathBuf,
    pub rows: Vec<Row>,
}

impl TsvFile {
    pub fn file_name(&self) -> String {
        self.path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default()
    }

    pub fn format_error(&self, line: usize, message: impl Into<String>) -> LexiconError {
        LexiconError::Format {
            file: self.file_name(),
            line,
            message: message.into(),
        }
    }
}

pub(crate) fn read_required(root: &Path, name: &str) -> Result<TsvFile, LexiconError> {
    let path = root.join(name);
    if !path.is_file() {
        return Err(LexiconError::MissingFile(path));
    }
    read(&path)
}

pub(crate) fn read_optional(root: &Path, name: &str) -> Result<Option<TsvFile>, LexiconError> {
    let path = root.join(name);
    if !path.is_file() {
        return Ok(None);
    }
    read(&path).map(Some)
}

pub(crate) fn read(path: &Path) -> Result<TsvFile, LexiconError> {
    let text = fs::read_to_string(path).map_err(|source| LexiconError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse(path, &text))
}

pub(crate) fn parse(path: &Path, text: &str) -> TsvFile {
    let rows = text
        .lines()
        .enumerate()
        .filter_map(|(idx, raw)| {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                return None;
            }
            Some(Row {
                line: idx + 1,
                fields: line.split('\t').map(|f| f.trim().to_string()).collect(),
            })
        })
        .collect();
    TsvFile {
        path: path.to_path_buf(),
        rows,
    }
}

/// Lowercases a single-word entry and rejects internal whitespace.
pub(crate) fn word_entry(file: &TsvFile, row: &Row, raw: &str) -> Result<String, LexiconError> {
    if raw.is_empty() {
        return Err(file.format_error(row.line, "empty entry"));
    }
    if raw.chars().any(char::is_whitespace) {
        return Err(file.format_error(row.line, format!("entry {raw:?} contains whitespace")));
    }
    Ok(raw.to_lowercase())
}

pub(crate) fn number(file: &TsvFile, row: &Row, raw: &str) -> Result<f64, LexiconError> {
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| file.format_error(row.line, format!("{raw:?} is not a number")))
}

pub(crate) fn expect_fields(file: &TsvFile, row: &Row, n: usize) -> Result<(), LexiconError> {
    if row.fields.len() != n {
        return Err(file.format_error(
            row.line,
            format!("expected {n} tab-separated fields, found {}", row.fields.len()),
        ));
    }
    Ok(())
}
