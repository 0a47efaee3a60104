//! CSV and JSON-lines readers producing a [`Corpus`].

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::Deserialize;

use crate::corpus::{Corpus, Document, RawDocument, Timestamp};
use crate::error::{Error, Result};
use crate::text::{normalize_tokenize, IngestOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    JsonLines,
}

impl Format {
    /// Guesses from the file extension: `.jsonl`/`.ndjson`/`.json` are JSON
    /// lines, anything else is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ["jsonl", "ndjson", "json"].contains(&ext.to_ascii_lowercase().as_str()) => Format::JsonLines,
            _ => Format::Csv,
        }
    }
}

/// Row-level bookkeeping from one ingestion pass.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub rows_read: usize,
    pub retweets_dropped: usize,
    /// Rows skipped in lenient mode, as (line, reason).
    pub skipped: Vec<(u64, String)>,
}

pub fn ingest(path: impl AsRef<Path>, format: Format, options: &IngestOptions) -> Result<Corpus> {
    ingest_with_report(path, format, options).map(|(corpus, _)| corpus)
}

pub fn ingest_with_report(
    path: impl AsRef<Path>,
    format: Format,
    options: &IngestOptions,
) -> Result<(Corpus, IngestReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ingest_reader(file, format, options)
}

pub fn ingest_reader<R: Read>(reader: R, format: Format, options: &IngestOptions) -> Result<(Corpus, IngestReport)> {
    let mut report = IngestReport::default();
    let mut raw = Vec::new();
    let mut on_row = |row: Result<RawDocument>, report: &mut IngestReport| -> Result<()> {
        report.rows_read += 1;
        match row {
            Ok(doc) => raw.push(doc),
            Err(err @ (Error::MalformedRow { .. } | Error::Timestamp { .. })) if options.lenient => {
                let line = match &err {
                    Error::MalformedRow { line, .. } | Error::Timestamp { line, .. } => *line,
                    _ => 0,
                };
                report.skipped.push((line, err.to_string()));
            }
            Err(err) => return Err(err),
        }
        Ok(())
    };
    match format {
        Format::Csv => read_csv(reader, &mut report, &mut on_row)?,
        Format::JsonLines => read_json_lines(reader, &mut report, &mut on_row)?,
    }

    let mut documents = Vec::with_capacity(raw.len());
    for doc in raw {
        if doc.is_retweet {
            report.retweets_dropped += 1;
            continue;
        }
        let tokens = normalize_tokenize(&doc.text, options);
        documents.push(Document::new(doc.id, doc.timestamp, tokens));
    }
    Ok((Corpus::from_documents(documents), report))
}

type RowSink<'a> = dyn FnMut(Result<RawDocument>, &mut IngestReport) -> Result<()> + 'a;

fn parse_flag(value: &str, line: u64) -> Result<Option<bool>> {
    match value.trim().to_ascii_lowercase().as_str() {
        "" => Ok(None),
        "true" | "t" | "1" | "yes" | "y" => Ok(Some(true)),
        "false" | "f" | "0" | "no" | "n" => Ok(Some(false)),
        other => Err(Error::MalformedRow {
            line,
            message: format!("is_retweet value {other:?} is not a boolean"),
        }),
    }
}

fn build_raw(id: &str, timestamp: &str, text: &str, flag: Option<bool>, line: u64) -> Result<RawDocument> {
    if id.trim().is_empty() {
        return Err(Error::MalformedRow {
            line,
            message: "empty id".into(),
        });
    }
    let timestamp: Timestamp = timestamp.parse().map_err(|_| Error::Timestamp {
        line,
        value: timestamp.to_string(),
    })?;
    let is_retweet = flag.unwrap_or_else(|| text.trim_start().starts_with("RT @"));
    Ok(RawDocument {
        id: id.trim().to_string(),
        timestamp,
        text: text.to_string(),
        is_retweet,
    })
}

fn read_csv<R: Read>(reader: R, report: &mut IngestReport, sink: &mut RowSink<'_>) -> Result<()> {
    let mut csv = csv::ReaderBuilder::new()
        .flexible(true)
        .has_headers(true)
        .from_reader(reader);
    let headers = csv
        .headers()
        .map_err(|e| Error::MalformedRow {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.iter().all(|h| h.trim().is_empty()) {
        return Ok(());
    }
    let column = |name: &'static str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or(Error::MissingColumn(name))
    };
    let id_col = column("id")?;
    let ts_col = column("timestamp")?;
    let text_col = column("text")?;
    let rt_col = column("is_retweet").ok();

    for record in csv.records() {
        let row = match record {
            Ok(record) => {
                let line = record.position().map_or(0, |p| p.line());
                match (record.get(id_col), record.get(ts_col), record.get(text_col)) {
                    (Some(id), Some(ts), Some(text)) => rt_col
                        .and_then(|c| record.get(c))
                        .map_or(Ok(None), |v| parse_flag(v, line))
                        .and_then(|flag| build_raw(id, ts, text, flag, line)),
                    _ => Err(Error::MalformedRow {
                        line,
                        message: format!("expected at least {} fields, found {}", headers.len(), record.len()),
                    }),
                }
            }
            Err(e) => Err(Error::MalformedRow {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            }),
        };
        sink(row, report)?;
    }
    Ok(())
}

#[derive(Deserialize)]
struct JsonRow {
    id: serde_json::Value,
    timestamp: String,
    text: String,
    #[serde(default)]
    is_retweet: Option<serde_json::Value>,
}

fn json_flag(value: Option<&serde_json::Value>, line: u64) -> Result<Option<bool>> {
    use serde_json::Value;
    match value {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Bool(b)) => Ok(Some(*b)),
        Some(Value::String(s)) => parse_flag(s, line),
        Some(Value::Number(n)) => parse_flag(&n.to_string(), line),
        Some(other) => Err(Error::MalformedRow {
            line,
            message: format!("is_retweet value {other} is not a boolean"),
        }),
    }
}

fn parse_json_row(text: &str, line: u64) -> Result<RawDocument> {
    let row: JsonRow = serde_json::from_str(text).map_err(|e| Error::MalformedRow {
        line,
        message: e.to_string(),
    })?;
    let id = match &row.id {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Number(n) => n.to_string(),
        other => {
            return Err(Error::MalformedRow {
                line,
                message: format!("id {other} is neither a string nor a number"),
            })
        }
    };
    let flag = json_flag(row.is_retweet.as_ref(), line)?;
    build_raw(&id, &row.timestamp, &row.text, flag, line)
}

fn read_json_lines<R: Read>(reader: R, report: &mut IngestReport, sink: &mut RowSink<'_>) -> Result<()> {
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let number = i as u64 + 1;
        let line = line.map_err(|e| Error::MalformedRow {
            line: number,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        sink(parse_json_row(&line, number), report)?;
    }
    Ok(())
}
