use std::fs;
use std::path::Path;

use crate::stats::GroupStats;
use crate::AnalysisError;

pub const CSV_HEADER: [&str; 6] = ["group", "metric", "n", "total", "mean", "sd"];

fn cell(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_default()
}

/// CSV with columns `group,metric,n,total,mean,sd`; numbers carry six
/// decimals and missing values are empty cells.
pub fn to_csv_string(stats: &[GroupStats]) -> Result<String, AnalysisError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for s in stats {
        w.write_record([
            s.group.clone(),
            s.metric.clone(),
            s.n.to_string(),
            cell(s.total),
            cell(s.mean),
            cell(s.sd),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| AnalysisError::Io("csv buffer".into(), e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn export_csv(stats: &[GroupStats], path: &Path) -> Result<(), AnalysisError> {
    let text = to_csv_string(stats)?;
    fs::write(path, text).map_err(|e| AnalysisError::Io(path.display().to_string(), e))
}

/// Reads a file written by [`export_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<GroupStats>, AnalysisError> {
    let mut r = csv::Reader::from_path(path)?;
    let num = |s: &str| -> Result<Option<f64>, AnalysisError> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| AnalysisError::Format(format!("bad number {s:?}")))
        }
    };
    let mut out = Vec::new();
    for row in r.records() {
        let row = row?;
        if row.len() != CSV_HEADER.len() {
            return Err(AnalysisError::Format(format!("expected {} columns", CSV_HEADER.len())));
        }
        out.push(GroupStats {
            group: row[0].to_string(),
            metric: row[1].to_string(),
            n: row[2].parse().map_err(|_| AnalysisError::Format(format!("bad count {:?}", &row[2])))?,
            total: num(&row[3])?,
            mean: num(&row[4])?,
            sd: num(&row[5])?,
        });
    }
    Ok(out)
}
