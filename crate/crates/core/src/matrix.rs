//! Conversion of table markup into rectangular grids of styled cells.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::classify::TableClass;
use crate::error::{Error, Warning};
use crate::ingest::{collapse_ws, docx_text_into, RawTable, SourceFormat};
use crate::markup::{self, Element, Node};
use crate::normalize::normalize_characters;
use crate::options::RunOptions;
use crate::scan::is_numeric_content;

/// Widest grid a column span may produce.
pub const MAX_COLUMNS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Cell {
    pub text: String,
    pub bold: bool,
    pub italic: bool,
    /// Set on cells whose content was copied in by span resolution.
    pub from_span: bool,
}

impl Cell {
    pub fn new(text: impl Into<String>) -> Self {
        Cell {
            text: text.into(),
            ..Cell::default()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.text.trim().is_empty()
    }
}

/// A rectangular table with its caption, footnote and classifier verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharTable {
    pub cells: Vec<Vec<Cell>>,
    pub caption: Option<String>,
    pub footnote: Option<String>,
    pub n_header_rows: usize,
    pub table_class: Option<TableClass>,
    /// 1-based position of the table in its document.
    pub index: usize,
    pub warnings: Vec<Warning>,
}

impl CharTable {
    /// Builds a table from plain strings; the first `n_header_rows` rows
    /// are headers. Ragged rows are padded on the right.
    pub fn from_rows<S: AsRef<str>>(rows: &[Vec<S>], n_header_rows: usize) -> Self {
        let mut cells: Vec<Vec<Cell>> = rows
            .iter()
            .map(|r| r.iter().map(|s| Cell::new(s.as_ref())).collect())
            .collect();
        pad_right(&mut cells);
        let n = cells.len();
        CharTable {
            cells,
            caption: None,
            footnote: None,
            n_header_rows: clamp_header(n_header_rows, n),
            table_class: None,
            index: 1,
            warnings: Vec::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.cells.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cells.first().map_or(0, |r| r.len())
    }

    /// Cell text, empty for positions outside the grid.
    pub fn text(&self, row: usize, col: usize) -> &str {
        self.cells
            .get(row)
            .and_then(|r| r.get(col))
            .map_or("", |c| c.text.as_str())
    }

    /// Transposed copy; the first column becomes the header row.
    pub fn transposed(&self) -> CharTable {
        let (n, m) = (self.n_rows(), self.n_cols());
        let mut cells = vec![vec![Cell::default(); n]; m];
        for (i, row) in self.cells.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                cells[j][i] = c.clone();
            }
        }
        CharTable {
            cells,
            n_header_rows: clamp_header(1, m),
            table_class: None,
            ..self.clone()
        }
    }
}

fn clamp_header(h: usize, n_rows: usize) -> usize {
    if n_rows <= 1 {
        0
    } else {
        h.min(n_rows - 1)
    }
}

fn pad_right(cells: &mut [Vec<Cell>]) {
    let width = cells.iter().map(|r| r.len()).max().unwrap_or(0);
    for row in cells.iter_mut() {
        row.resize(width, Cell::default());
    }
}

/// A source cell before span resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanCell {
    pub cell: Cell,
    pub colspan: usize,
    pub rowspan: usize,
}

impl SpanCell {
    pub fn new(text: impl Into<String>, colspan: usize, rowspan: usize) -> Self {
        SpanCell {
            cell: Cell::new(text),
            colspan: colspan.max(1),
            rowspan: rowspan.max(1),
        }
    }
}

/// Expands row and column spans into a rectangular grid.
///
/// The source cell keeps its content in the top-left slot of its region.
/// The other slots receive a copy (marked `from_span`) when the content is
/// a header label, or when `replicate` is on and the content is textual
/// or `rep_nums` is on; otherwise they stay empty. Rows spanning past the
/// last row are clamped, and column spans are capped at [`MAX_COLUMNS`],
/// each with a warning.
pub fn resolve_spans(
    rows: &[Vec<SpanCell>],
    n_header_rows: usize,
    replicate: bool,
    rep_nums: bool,
    warnings: &mut Vec<String>,
) -> Vec<Vec<Cell>> {
    let n = rows.len();
    let mut grid: Vec<Vec<Option<Cell>>> = vec![Vec::new(); n];
    for (r, row) in rows.iter().enumerate() {
        let mut col = 0;
        for sc in row {
            while grid[r].get(col).is_some_and(|c| c.is_some()) {
                col += 1;
            }
            let mut rowspan = sc.rowspan.max(1);
            if r + rowspan > n {
                warnings.push(format!(
                    "row span of {} at row {} exceeds the table and was clamped",
                    rowspan,
                    r + 1
                ));
                rowspan = n - r;
            }
            let mut colspan = sc.colspan.max(1);
            if col + colspan > MAX_COLUMNS {
                warnings.push(format!(
                    "column span of {} at row {} was capped at {} columns",
                    colspan,
                    r + 1,
                    MAX_COLUMNS
                ));
                colspan = MAX_COLUMNS.saturating_sub(col).max(1);
            }
            let numeric = is_numeric_content(&sc.cell.text);
            let header = r < n_header_rows;
            let fill = (header && !numeric) || (replicate && (rep_nums || !numeric));
            for dr in 0..rowspan {
                let target = &mut grid[r + dr];
                for dc in 0..colspan {
                    let c = col + dc;
                    if target.len() <= c {
                        target.resize(c + 1, None);
                    }
                    if target[c].is_some() {
                        continue;
                    }
                    let value = if dr == 0 && dc == 0 {
                        sc.cell.clone()
                    } else if fill && !sc.cell.is_empty() {
                        Cell {
                            from_span: true,
                            ..sc.cell.clone()
                        }
                    } else {
                        Cell::default()
                    };
                    target[c] = Some(value);
                }
            }
            col += colspan;
        }
    }
    let mut cells: Vec<Vec<Cell>> = grid
        .into_iter()
        .map(|row| row.into_iter().map(Option::unwrap_or_default).collect())
        .collect();
    pad_right(&mut cells);
    cells
}

/// Merges the header rows column by column into a single header row.
/// Empty parts and consecutive duplicates are dropped, the rest joined
/// with a space.
pub fn collapse_header_rows(mut table: CharTable) -> CharTable {
    let h = table.n_header_rows;
    if h < 2 {
        return table;
    }
    let n_cols = table.n_cols();
    let mut merged = Vec::with_capacity(n_cols);
    for col in 0..n_cols {
        let mut parts: Vec<&str> = Vec::new();
        for row in &table.cells[..h] {
            let t = row[col].text.trim();
            if t.is_empty() || parts.last() == Some(&t) {
                continue;
            }
            parts.push(t);
        }
        let last = &table.cells[h - 1][col];
        merged.push(Cell {
            text: parts.join(" "),
            bold: last.bold,
            italic: last.italic,
            from_span: false,
        });
    }
    table.cells.drain(..h);
    table.cells.insert(0, merged);
    table.n_header_rows = 1;
    table
}

struct SourceRow {
    cells: Vec<SpanCell>,
    header: bool,
}

/// Converts the markup of `raw` into a [`CharTable`].
pub fn table_to_matrix(raw: &RawTable, opts: &RunOptions) -> Result<CharTable, Error> {
    let root = markup::parse(&raw.table_markup);
    let rows = match raw.source_format {
        SourceFormat::Docx => root.find("w:tbl").map(|t| docx_rows(t, opts)),
        _ => {
            let table = if root.is("table") {
                Some(&root)
            } else {
                root.find("table")
            };
            table
                .or(Some(&root))
                .map(|t| html_rows(t, &raw.table_markup, opts))
        }
    };
    let rows = rows.unwrap_or_default();
    if rows.iter().all(|r| r.cells.is_empty()) {
        return Err(Error::Structure {
            table_index: raw.index_in_document,
            reason: String::from("table markup contains no rows"),
        });
    }

    let marked = rows.iter().take_while(|r| r.header).count();
    let n_header = clamp_header(if marked == 0 { 1 } else { marked }, rows.len());

    let span_rows: Vec<Vec<SpanCell>> = rows.into_iter().map(|r| r.cells).collect();
    let mut messages = Vec::new();
    let cells = resolve_spans(
        &span_rows,
        n_header,
        opts.replicate,
        opts.rep_nums,
        &mut messages,
    );
    let index = raw.index_in_document;
    let mut table = CharTable {
        cells,
        caption: raw.caption.clone(),
        footnote: raw.footnote.clone(),
        n_header_rows: n_header,
        table_class: None,
        index,
        warnings: messages
            .into_iter()
            .map(|m| Warning::new(index, m))
            .collect(),
    };
    if opts.collapse_header {
        table = collapse_header_rows(table);
    }
    Ok(table)
}

fn span_attr(el: &Element, name: &str) -> usize {
    el.attr(name)
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(1)
}

fn html_rows(table: &Element, src: &str, opts: &RunOptions) -> Vec<SourceRow> {
    let mut trs: Vec<(&Element, bool)> = Vec::new();
    collect_trs(table, false, &mut trs);
    let norm = opts.normalization();
    trs.into_iter()
        .map(|(tr, in_head)| {
            let tds: Vec<&Element> = tr
                .child_elements()
                .filter(|c| c.is("td") || c.is("th"))
                .collect();
            let all_th = !tds.is_empty() && tds.iter().all(|c| c.is("th"));
            let cells = tds
                .iter()
                .map(|td| {
                    let inner = &src[td.inner.clone()];
                    let text = collapse_ws(&normalize_characters(inner, &norm));
                    let (bold, italic) = html_style(td);
                    SpanCell {
                        cell: Cell {
                            text,
                            bold,
                            italic,
                            from_span: false,
                        },
                        colspan: span_attr(td, "colspan"),
                        rowspan: span_attr(td, "rowspan"),
                    }
                })
                .collect();
            SourceRow {
                cells,
                header: in_head || all_th,
            }
        })
        .collect()
}

fn collect_trs<'a>(el: &'a Element, in_head: bool, out: &mut Vec<(&'a Element, bool)>) {
    for child in el.child_elements() {
        match child.name.as_str() {
            "tr" => out.push((child, in_head)),
            "table" => {}
            "thead" => collect_trs(child, true, out),
            _ => collect_trs(child, in_head, out),
        }
    }
}

fn style_flags(el: &Element) -> (bool, bool) {
    let mut bold = matches!(el.name.as_str(), "b" | "strong");
    let mut italic = matches!(el.name.as_str(), "i" | "em");
    if let Some(style) = el.attr("style") {
        let s: String = style
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect::<String>()
            .to_ascii_lowercase();
        if s.contains("font-weight:bold") || s.contains("font-weight:700") {
            bold = true;
        }
        if s.contains("font-style:italic") {
            italic = true;
        }
    }
    (bold, italic)
}

/// Bold/italic apply when every visible text piece outside super- and
/// subscripts carries the style.
fn html_style(td: &Element) -> (bool, bool) {
    let (b0, i0) = style_flags(td);
    let mut pieces: Vec<(bool, bool)> = Vec::new();
    html_style_walk(td, b0, i0, &mut pieces);
    if pieces.is_empty() {
        return (false, false);
    }
    (pieces.iter().all(|p| p.0), pieces.iter().all(|p| p.1))
}

fn html_style_walk(el: &Element, bold: bool, italic: bool, out: &mut Vec<(bool, bool)>) {
    for child in &el.children {
        match child {
            Node::Text(t) => {
                if !t.trim().is_empty() {
                    out.push((bold, italic));
                }
            }
            Node::Element(e) => {
                if e.is("sup") || e.is("sub") {
                    continue;
                }
                let (b, i) = style_flags(e);
                html_style_walk(e, bold || b, italic || i, out);
            }
        }
    }
}

fn docx_rows(tbl: &Element, opts: &RunOptions) -> Vec<SourceRow> {
    let norm = opts.normalization();
    let trs = tbl.find_all("w:tr", &["w:tbl"]);
    // (grid column, cell, gridSpan, merge state) per row
    struct DocxCell {
        col: usize,
        cell: Cell,
        span: usize,
        merge: Merge,
    }
    #[derive(PartialEq)]
    enum Merge {
        None,
        Restart,
        Continue,
    }
    let mut parsed: Vec<(Vec<DocxCell>, bool)> = Vec::new();
    for tr in &trs {
        let trpr = tr.first_child("w:trpr");
        let header = trpr
            .and_then(|p| p.first_child("w:tblheader"))
            .is_some_and(|h| !matches!(h.attr("w:val"), Some("0" | "false" | "off")));
        let mut col = trpr
            .and_then(|p| p.first_child("w:gridbefore"))
            .and_then(|g| g.attr("w:val"))
            .and_then(|v| v.parse::<usize>().ok())
            .unwrap_or(0);
        let mut cells = Vec::new();
        if col > 0 {
            cells.push(DocxCell {
                col: 0,
                cell: Cell::default(),
                span: col,
                merge: Merge::None,
            });
        }
        for tc in tr.find_all("w:tc", &["w:tbl"]) {
            let tcpr = tc.first_child("w:tcpr");
            let span = tcpr
                .and_then(|p| p.first_child("w:gridspan"))
                .and_then(|g| g.attr("w:val"))
                .and_then(|v| v.parse::<usize>().ok())
                .filter(|&v| v > 0)
                .unwrap_or(1);
            let merge = match tcpr.and_then(|p| p.first_child("w:vmerge")) {
                None => Merge::None,
                Some(v) => match v.attr("w:val") {
                    Some("restart") => Merge::Restart,
                    _ => Merge::Continue,
                },
            };
            let mut raw = String::new();
            docx_text_into(tc, &mut raw);
            let text = collapse_ws(&normalize_characters(&raw.replace('\n', " "), &norm));
            let (bold, italic) = docx_style(tc);
            cells.push(DocxCell {
                col,
                cell: Cell {
                    text,
                    bold,
                    italic,
                    from_span: false,
                },
                span,
                merge,
            });
            col += span;
        }
        parsed.push((cells, header));
    }

    let mut out = Vec::with_capacity(parsed.len());
    for r in 0..parsed.len() {
        let mut cells = Vec::new();
        for c in &parsed[r].0 {
            if c.merge == Merge::Continue {
                continue;
            }
            let mut rowspan = 1;
            if c.merge == Merge::Restart {
                for next in parsed.iter().skip(r + 1) {
                    let continues = next
                        .0
                        .iter()
                        .any(|n| n.col == c.col && n.merge == Merge::Continue);
                    if !continues {
                        break;
                    }
                    rowspan += 1;
                }
            }
            cells.push(SpanCell {
                cell: c.cell.clone(),
                colspan: c.span,
                rowspan,
            });
        }
        out.push(SourceRow {
            cells,
            header: parsed[r].1,
        });
    }
    out
}

fn docx_flag(rpr: Option<&Element>, name: &str) -> bool {
    rpr.and_then(|p| p.first_child(name))
        .is_some_and(|b| !matches!(b.attr("w:val"), Some("0" | "false" | "off")))
}

fn docx_style(tc: &Element) -> (bool, bool) {
    let mut pieces: Vec<(bool, bool)> = Vec::new();
    for run in tc.find_all("w:r", &["w:tbl"]) {
        let rpr = run.first_child("w:rpr");
        let superscript = rpr
            .and_then(|p| p.first_child("w:vertalign"))
            .and_then(|v| v.attr("w:val"))
            .is_some_and(|v| v != "baseline");
        if superscript {
            continue;
        }
        let text: String = run
            .child_elements()
            .filter(|e| e.is("w:t"))
            .map(|e| e.raw_text())
            .collect();
        if text.trim().is_empty() {
            continue;
        }
        pieces.push((docx_flag(rpr, "w:b"), docx_flag(rpr, "w:i")));
    }
    if pieces.is_empty() {
        return (false, false);
    }
    (pieces.iter().all(|p| p.0), pieces.iter().all(|p| p.1))
}
