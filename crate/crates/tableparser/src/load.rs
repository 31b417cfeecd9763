//! Reading documents from disk into raw tables.

use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use tableparser_core::{extract_table_nodes, RawTable, SourceFormat};
use thiserror::Error;

/// Member of a DOCX archive that holds the document body.
pub const DOCX_BODY: &str = "word/document.xml";

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{}: unsupported file extension (expected .xml, .html, .htm, .docx, .csv or .tsv)", .0.display())]
    UnknownExtension(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: not a readable DOCX archive: {reason}", path.display())]
    Archive { path: PathBuf, reason: String },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
}

/// Input kinds recognized by file extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    Xml,
    Html,
    Docx,
    Csv,
    Tsv,
}

impl InputKind {
    pub fn from_path(path: &Path) -> Option<InputKind> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        Some(match ext.as_str() {
            "xml" | "nxml" => InputKind::Xml,
            "html" | "htm" => InputKind::Html,
            "docx" => InputKind::Docx,
            "csv" => InputKind::Csv,
            "tsv" => InputKind::Tsv,
            _ => return None,
        })
    }
}

fn read_text(path: &Path) -> Result<String, LoadError> {
    let bytes = std::fs::read(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

/// Extracts `word/document.xml` from a DOCX archive.
pub fn read_docx_body(path: &Path) -> Result<String, LoadError> {
    let file = File::open(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let archive_err = |reason: String| LoadError::Archive {
        path: path.to_path_buf(),
        reason,
    };
    let mut archive = zip::ZipArchive::new(file).map_err(|e| archive_err(e.to_string()))?;
    let mut member = archive
        .by_name(DOCX_BODY)
        .map_err(|e| archive_err(format!("{DOCX_BODY}: {e}")))?;
    let mut bytes = Vec::new();
    member
        .read_to_end(&mut bytes)
        .map_err(|e| archive_err(format!("{DOCX_BODY}: {e}")))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// Renders delimited rows as table markup; the first row is the header.
pub fn rows_to_markup(rows: &[Vec<String>]) -> String {
    let mut s = String::from("<table>");
    for (i, row) in rows.iter().enumerate() {
        let tag = if i == 0 { "th" } else { "td" };
        s.push_str("<tr>");
        for cell in row {
            s.push_str(&format!("<{tag}>{}</{tag}>", escape(cell)));
        }
        s.push_str("</tr>");
    }
    s.push_str("</table>");
    s
}

fn read_delimited(path: &Path, delimiter: u8) -> Result<Vec<RawTable>, LoadError> {
    let csv_err = |source| LoadError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(delimiter)
        .from_path(path)
        .map_err(csv_err)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        rows.push(record.iter().map(str::to_string).collect::<Vec<_>>());
    }
    if rows.is_empty() {
        return Ok(Vec::new());
    }
    Ok(vec![RawTable {
        table_markup: rows_to_markup(&rows),
        caption: None,
        footnote: None,
        source_format: SourceFormat::MatrixFile,
        index_in_document: 1,
    }])
}

/// Loads all tables of one input file.
pub fn load_tables(path: &Path) -> Result<Vec<RawTable>, LoadError> {
    let kind = InputKind::from_path(path)
        .ok_or_else(|| LoadError::UnknownExtension(path.to_path_buf()))?;
    match kind {
        InputKind::Xml => {
            let doc = read_text(path)?;
            let format = if doc.contains("<w:document") || doc.contains("<w:tbl") {
                SourceFormat::Docx
            } else {
                SourceFormat::Jats
            };
            Ok(extract_table_nodes(&doc, format))
        }
        InputKind::Html => Ok(extract_table_nodes(&read_text(path)?, SourceFormat::Html)),
        InputKind::Docx => Ok(extract_table_nodes(
            &read_docx_body(path)?,
            SourceFormat::Docx,
        )),
        InputKind::Csv => read_delimited(path, b','),
        InputKind::Tsv => read_delimited(path, b'\t'),
    }
}
