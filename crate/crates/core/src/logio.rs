//! Reading and writing logs and graphs.
//!
//! Logs are stored as JSON lines, one event per line:
//!
//! ```text
//! {"case":"945","event":"e3","activities":["d"],"t_min":"2011-12-06T00:00:00.000Z","t_max":"2011-12-10T00:00:00.000Z","determinate":true}
//! ```
//!
//! Timestamps are written as RFC 3339 UTC with millisecond precision. The
//! reader also accepts offsets, `YYYY-MM-DD`, `YYYY-MM-DD HH:MM:SS` and
//! `DD-MM-YYYY`; dates without a time are midnight UTC.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Read, Write};

use chrono::{DateTime, NaiveDate, NaiveDateTime, SecondsFormat};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::BehaviorGraph;
use crate::model::{
    validate_log, EventId, ModelError, Timestamp, UncertainEvent, UncertainLog, UncertainTrace,
};

#[derive(Debug, Error)]
pub enum LogIoError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    InvalidEvent { line: usize, source: ModelError },
    #[error(transparent)]
    InvalidLog(#[from] ModelError),
    #[error("row {row}: {message}")]
    Csv { row: usize, message: String },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventRecord {
    case: String,
    event: String,
    activities: Vec<String>,
    t_min: String,
    t_max: String,
    determinate: bool,
}

pub fn format_timestamp(t: Timestamp) -> String {
    match DateTime::from_timestamp_millis(t.0) {
        Some(dt) => dt.to_rfc3339_opts(SecondsFormat::Millis, true),
        // outside chrono's range; keep it lossless
        None => t.0.to_string(),
    }
}

pub fn parse_timestamp(s: &str) -> Option<Timestamp> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(Timestamp(dt.timestamp_millis()));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(Timestamp(dt.and_utc().timestamp_millis()));
        }
    }
    for fmt in ["%Y-%m-%d", "%d-%m-%Y"] {
        if let Ok(d) = NaiveDate::parse_from_str(s, fmt) {
            let dt = d.and_hms_opt(0, 0, 0)?;
            return Some(Timestamp(dt.and_utc().timestamp_millis()));
        }
    }
    s.parse::<i64>().ok().map(Timestamp)
}

/// Writes one line per event ordered by (case, t_min, event id). Returns the
/// number of bytes written.
pub fn write_log<W: Write>(log: &UncertainLog, mut out: W) -> Result<usize, LogIoError> {
    let mut traces: Vec<&UncertainTrace> = log.traces.iter().collect();
    traces.sort_by(|a, b| a.case_id.cmp(&b.case_id));
    let mut written = 0;
    for trace in traces {
        let mut events: Vec<&UncertainEvent> = trace.events.iter().collect();
        events.sort_by(|a, b| (a.t_min(), a.id()).cmp(&(b.t_min(), b.id())));
        for e in events {
            let record = EventRecord {
                case: trace.case_id.clone(),
                event: e.id().to_string(),
                activities: e.activities().iter().cloned().collect(),
                t_min: format_timestamp(e.t_min()),
                t_max: format_timestamp(e.t_max()),
                determinate: e.is_determinate(),
            };
            let mut line = serde_json::to_string(&record).map_err(io::Error::from)?;
            line.push('\n');
            out.write_all(line.as_bytes())?;
            written += line.len();
        }
    }
    out.flush()?;
    Ok(written)
}

/// Reads a JSON-lines log. Blank lines are skipped; traces come back sorted
/// by case id.
pub fn read_log<R: BufRead>(input: R) -> Result<UncertainLog, LogIoError> {
    let mut cases: BTreeMap<String, Vec<UncertainEvent>> = BTreeMap::new();
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: EventRecord = serde_json::from_str(&line).map_err(|e| LogIoError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let time = |field: &str, value: &str| {
            parse_timestamp(value).ok_or_else(|| LogIoError::Parse {
                line: line_no,
                message: format!("unparseable {field} {value:?}"),
            })
        };
        let t_min = time("t_min", &record.t_min)?;
        let t_max = time("t_max", &record.t_max)?;
        let invalid = |source| LogIoError::InvalidEvent {
            line: line_no,
            source,
        };
        let id = EventId::new(record.event).map_err(invalid)?;
        let event = UncertainEvent::new(id, record.activities, t_min, t_max, record.determinate)
            .map_err(invalid)?;
        cases.entry(record.case).or_default().push(event);
    }
    let log = UncertainLog::new(
        cases
            .into_iter()
            .map(|(case, events)| UncertainTrace::new(case, events))
            .collect(),
    );
    validate_log(&log).map_err(ModelError::InvalidLog)?;
    Ok(log)
}

/// Column names for [`import_certain_csv`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMap {
    pub case: String,
    pub activity: String,
    pub time: String,
    pub id: Option<String>,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            case: "case".into(),
            activity: "activity".into(),
            time: "timestamp".into(),
            id: None,
        }
    }
}

/// Imports a certain log from CSV. Traces keep first-appearance order; events
/// without an id column are named `<case>#<index>` (0-based within the case).
pub fn import_certain_csv<R: Read>(input: R, columns: &ColumnMap) -> Result<UncertainLog, LogIoError> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| LogIoError::Csv {
            row: 0,
            message: e.to_string(),
        })?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| LogIoError::Csv {
                row: 0,
                message: format!("missing column {name:?}"),
            })
    };
    let case_col = column(&columns.case)?;
    let activity_col = column(&columns.activity)?;
    let time_col = column(&columns.time)?;
    let id_col = columns.id.as_deref().map(column).transpose()?;

    let mut order: Vec<String> = Vec::new();
    let mut cases: BTreeMap<String, Vec<UncertainEvent>> = BTreeMap::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| LogIoError::Csv {
            row,
            message: e.to_string(),
        })?;
        let field = |c: usize| record.get(c).unwrap_or("");
        let case = field(case_col).to_owned();
        let raw_time = field(time_col);
        let at = parse_timestamp(raw_time).ok_or_else(|| LogIoError::Csv {
            row,
            message: format!("unparseable timestamp {raw_time:?}"),
        })?;
        let events = cases.entry(case.clone()).or_insert_with(|| {
            order.push(case.clone());
            Vec::new()
        });
        let id = match id_col {
            Some(c) => field(c).to_owned(),
            None => format!("{case}#{}", events.len()),
        };
        let bad_row = |e: ModelError| LogIoError::Csv {
            row,
            message: e.to_string(),
        };
        let id = EventId::new(id).map_err(bad_row)?;
        let activity = field(activity_col);
        let activities = if activity.is_empty() { vec![] } else { vec![activity] };
        events.push(UncertainEvent::certain(id, activities, at, true).map_err(bad_row)?);
    }
    let log = UncertainLog::new(
        order
            .into_iter()
            .map(|case| {
                let events = cases.remove(&case).unwrap_or_default();
                UncertainTrace::new(case, events)
            })
            .collect(),
    );
    validate_log(&log).map_err(ModelError::InvalidLog)?;
    Ok(log)
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Renders a behavior graph as a Graphviz digraph. Indeterminate events get a
/// dashed outline. Output is byte-deterministic.
pub fn render_dot(graph: &BehaviorGraph) -> String {
    let mut out = format!("digraph {} {{\n", quote(graph.case_id()));
    out.push_str("  rankdir=LR;\n  node [shape=circle];\n");
    for v in graph.vertices() {
        let label = v.activities.iter().cloned().collect::<Vec<_>>().join(",");
        out.push_str(&format!("  {} [label={}", quote(v.id.as_str()), quote(&label)));
        if !v.determinate {
            out.push_str(", style=dashed");
        }
        out.push_str("];\n");
    }
    for (v, w) in graph.edges() {
        out.push_str(&format!("  {} -> {};\n", quote(v.as_str()), quote(w.as_str())));
    }
    out.push_str("}\n");
    out
}

pub fn export_dot<W: Write>(graph: &BehaviorGraph, mut out: W) -> Result<usize, LogIoError> {
    let dot = render_dot(graph);
    out.write_all(dot.as_bytes())?;
    out.flush()?;
    Ok(dot.len())
}
