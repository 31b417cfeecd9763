//! JSON and CSV serialization of processed files.

use std::io::Write;

use serde::Serialize;
use tableparser_core::scan::Operator;
use tableparser_core::{CharTable, CollapsedLine, StatRecord, StatsReport, TableClass};

/// Output of one input file.
#[derive(Debug, Clone)]
pub struct FileOutput {
    pub file: String,
    pub payload: Payload,
}

#[derive(Debug, Clone)]
pub enum Payload {
    Matrix(Vec<CharTable>),
    Text(Vec<CollapsedLine>),
    Stats(StatsReport),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Matrix,
    Text,
    Stats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
struct MatrixOut<'a> {
    file: &'a str,
    table_index: usize,
    caption: Option<&'a str>,
    footnote: Option<&'a str>,
    class: Option<TableClass>,
    n_header_rows: usize,
    cells: Vec<Vec<&'a str>>,
}

#[derive(Serialize)]
struct LineOut<'a> {
    file: &'a str,
    #[serde(flatten)]
    line: &'a CollapsedLine,
}

#[derive(Serialize)]
struct RecordOut<'a> {
    file: &'a str,
    #[serde(flatten)]
    record: &'a StatRecord,
}

/// Column names of the statistics CSV.
pub const STATS_COLUMNS: [&str; 20] = [
    "file",
    "table_index",
    "result",
    "stat_name",
    "stat_op",
    "stat_value",
    "df1",
    "df2",
    "SE",
    "p_op",
    "p",
    "codedP_op",
    "codedP",
    "Zest",
    "recalculatedP",
    "deltaP2tailed",
    "error",
    "errorType",
    "alpha4check",
    "correction_method",
];

fn matrices(outputs: &[FileOutput]) -> Vec<MatrixOut<'_>> {
    let mut v = Vec::new();
    for o in outputs {
        if let Payload::Matrix(tables) = &o.payload {
            for t in tables {
                v.push(MatrixOut {
                    file: &o.file,
                    table_index: t.index,
                    caption: t.caption.as_deref(),
                    footnote: t.footnote.as_deref(),
                    class: t.table_class,
                    n_header_rows: t.n_header_rows,
                    cells: t
                        .cells
                        .iter()
                        .map(|r| r.iter().map(|c| c.text.as_str()).collect())
                        .collect(),
                });
            }
        }
    }
    v
}

fn lines(outputs: &[FileOutput]) -> Vec<LineOut<'_>> {
    let mut v = Vec::new();
    for o in outputs {
        if let Payload::Text(ls) = &o.payload {
            v.extend(ls.iter().map(|line| LineOut {
                file: &o.file,
                line,
            }));
        }
    }
    v
}

fn record_tables(outputs: &[FileOutput]) -> Vec<Vec<RecordOut<'_>>> {
    let mut v = Vec::new();
    for o in outputs {
        if let Payload::Stats(r) = &o.payload {
            for t in &r.tables {
                v.push(
                    t.records
                        .iter()
                        .map(|record| RecordOut {
                            file: &o.file,
                            record,
                        })
                        .collect(),
                );
            }
        }
    }
    v
}

/// Writes one JSON document. Statistics are nested per table unless
/// `merged` is set.
pub fn write_json(
    command: Command,
    outputs: &[FileOutput],
    merged: bool,
    out: &mut dyn Write,
) -> std::io::Result<()> {
    let value = match command {
        Command::Matrix => serde_json::to_value(matrices(outputs)),
        Command::Text => serde_json::to_value(lines(outputs)),
        Command::Stats if merged => serde_json::to_value(
            record_tables(outputs)
                .into_iter()
                .flatten()
                .collect::<Vec<_>>(),
        ),
        Command::Stats => serde_json::to_value(record_tables(outputs)),
    }
    .map_err(std::io::Error::other)?;
    serde_json::to_writer_pretty(&mut *out, &value).map_err(std::io::Error::other)?;
    writeln!(out)
}

fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn op(v: Option<Operator>) -> String {
    v.map(|o| o.as_str().to_string()).unwrap_or_default()
}

/// One CSV row of a record, in [`STATS_COLUMNS`] order.
pub fn record_row(file: &str, r: &StatRecord) -> Vec<String> {
    vec![
        file.to_string(),
        r.table_index.to_string(),
        r.result.clone(),
        r.stat_name.as_str().to_string(),
        r.stat_op.as_str().to_string(),
        format!("{}", r.stat_value),
        num(r.df1),
        num(r.df2),
        num(r.se),
        op(r.p_op),
        num(r.p),
        op(r.coded_p_op),
        num(r.coded_p),
        num(r.z_est),
        num(r.recalculated_p),
        num(r.delta_p2tailed),
        r.error.map(|e| e.to_string()).unwrap_or_default(),
        r.error_type.map(|e| e.to_string()).unwrap_or_default(),
        format!("{}", r.alpha4check),
        r.correction_method.clone().unwrap_or_default(),
    ]
}

/// Writes RFC 4180 CSV: one row per cell, line or record.
pub fn write_csv(
    command: Command,
    outputs: &[FileOutput],
    out: &mut dyn Write,
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match command {
        Command::Matrix => {
            w.write_record([
                "file",
                "table_index",
                "row",
                "col",
                "text",
                "bold",
                "italic",
            ])?;
            for o in outputs {
                if let Payload::Matrix(tables) = &o.payload {
                    for t in tables {
                        for (i, row) in t.cells.iter().enumerate() {
                            for (j, c) in row.iter().enumerate() {
                                w.write_record([
                                    o.file.clone(),
                                    t.index.to_string(),
                                    i.to_string(),
                                    j.to_string(),
                                    c.text.clone(),
                                    c.bold.to_string(),
                                    c.italic.to_string(),
                                ])?;
                            }
                        }
                    }
                }
            }
        }
        Command::Text => {
            w.write_record(["file", "table_index", "strategy", "row", "col", "text"])?;
            for l in lines(outputs) {
                let strategy = serde_json::to_value(l.line.strategy)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default();
                w.write_record([
                    l.file.to_string(),
                    l.line.table_index.to_string(),
                    strategy,
                    l.line.row.map(|r| r.to_string()).unwrap_or_default(),
                    l.line.col.map(|c| c.to_string()).unwrap_or_default(),
                    l.line.text.clone(),
                ])?;
            }
        }
        Command::Stats => {
            w.write_record(STATS_COLUMNS)?;
            for r in record_tables(outputs).into_iter().flatten() {
                w.write_record(record_row(r.file, r.record))?;
            }
        }
    }
    w.flush()
}
