//! Locating tables, captions and footnotes inside JATS, HTML and
//! WordprocessingML documents.

use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::markup::{self, Element, Node};
use crate::normalize::{normalize_characters, NormalizationOptions};

/// Container format a table was taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceFormat {
    Jats,
    Html,
    Docx,
    MatrixFile,
}

/// A table as found in the source: its markup plus the surrounding text.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RawTable {
    pub table_markup: String,
    pub caption: Option<String>,
    pub footnote: Option<String>,
    pub source_format: SourceFormat,
    /// 1-based position among the tables of the document.
    pub index_in_document: usize,
}

const BLOCKS: &[&str] = &[
    "p",
    "div",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "li",
    "blockquote",
    "w:p",
    "title",
    "fn",
    "caption",
    "section",
    "article",
    "body",
    "header",
    "footer",
    "figcaption",
];

fn row_tag(format: SourceFormat) -> &'static str {
    match format {
        SourceFormat::Docx => "w:tr",
        _ => "tr",
    }
}

fn table_tag(format: SourceFormat) -> &'static str {
    match format {
        SourceFormat::Docx => "w:tbl",
        _ => "table",
    }
}

fn has_rows(table: &Element, format: SourceFormat) -> bool {
    table.find(row_tag(format)).is_some()
}

/// Finds all tables of `document` in document order.
///
/// JATS tables take their caption from `<caption>` and their footnote from
/// `<table-wrap-foot>`; HTML tables use a `<caption>` child when present;
/// otherwise, and for DOCX, the surrounding paragraphs are examined with
/// [`guess_caption_footer`]. Tables without rows are skipped.
pub fn extract_table_nodes(document: &str, format: SourceFormat) -> Vec<RawTable> {
    let root = markup::parse(document);
    let mut found: Vec<(Option<&Element>, &Element)> = Vec::new();
    collect_tables(&root, format, None, &mut found);

    let kept: Vec<(Option<&Element>, &Element)> = found
        .into_iter()
        .filter(|(_, t)| has_rows(t, format))
        .collect();
    let needs_guess = kept.iter().any(|(wrap, t)| {
        wrap.is_none() && !(format == SourceFormat::Html && t.first_child("caption").is_some())
    });
    let items = if needs_guess {
        block_sequence(&root, format)
    } else {
        Vec::new()
    };

    let mut tables = Vec::new();
    for (i, (wrap, table)) in kept.iter().enumerate() {
        let markup = String::from(&document[table.span.clone()]);
        let (caption, footnote) = match wrap {
            Some(w) => jats_caption_footer(w),
            None => {
                let guessed = guess_from_items(&items, table.span.start);
                if format == SourceFormat::Html {
                    match table.first_child("caption") {
                        Some(c) => (non_empty(block_text(c, format, " ")), guessed.1),
                        None => guessed,
                    }
                } else {
                    guessed
                }
            }
        };
        tables.push(RawTable {
            table_markup: markup,
            caption,
            footnote,
            source_format: format,
            index_in_document: i + 1,
        });
    }
    tables
}

fn collect_tables<'a>(
    el: &'a Element,
    format: SourceFormat,
    wrap: Option<&'a Element>,
    out: &mut Vec<(Option<&'a Element>, &'a Element)>,
) {
    let tag = table_tag(format);
    for child in el.child_elements() {
        if format == SourceFormat::Jats && child.is("table-wrap") {
            if let Some(t) = child.find("table") {
                out.push((Some(child), t));
            }
        } else if child.is(tag) {
            out.push((wrap, child));
        } else {
            collect_tables(child, format, wrap, out);
        }
    }
}

fn jats_caption_footer(wrap: &Element) -> (Option<String>, Option<String>) {
    let caption = wrap
        .first_child("caption")
        .and_then(|c| non_empty(block_text(c, SourceFormat::Jats, " ")));
    let footnote = wrap.first_child("table-wrap-foot").and_then(|f| {
        let leaves = leaf_blocks(f);
        let text = if leaves.is_empty() {
            block_text(f, SourceFormat::Jats, "\n")
        } else {
            let lines: Vec<String> = leaves
                .iter()
                .map(|b| block_text(b, SourceFormat::Jats, "\n"))
                .filter(|s| !s.is_empty())
                .collect();
            lines.join("\n")
        };
        non_empty(text)
    });
    (caption, footnote)
}

fn leaf_blocks(el: &Element) -> Vec<&Element> {
    let mut out = Vec::new();
    for child in el.child_elements() {
        if BLOCKS.contains(&child.name.as_str()) && !contains_block(child) {
            out.push(child);
        } else {
            out.extend(leaf_blocks(child));
        }
    }
    out
}

fn contains_block(el: &Element) -> bool {
    el.child_elements()
        .any(|c| BLOCKS.contains(&c.name.as_str()) || contains_block(c))
}

fn non_empty(s: String) -> Option<String> {
    if s.trim().is_empty() {
        None
    } else {
        Some(s)
    }
}

/// Plain text of a caption or footnote element. Line breaks become
/// `line_sep`, superscripts are marked with `^` and subscripts with `_`.
pub(crate) fn block_text(el: &Element, format: SourceFormat, line_sep: &str) -> String {
    let mut raw = String::new();
    match format {
        SourceFormat::Docx => docx_text_into(el, &mut raw),
        _ => html_text_into(el, &mut raw),
    }
    let opts = NormalizationOptions::default();
    let lines: Vec<String> = raw
        .split('\n')
        .map(|l| collapse_ws(&normalize_characters(l, &opts)))
        .filter(|l| !l.is_empty())
        .collect();
    lines.join(line_sep)
}

/// Collapses whitespace runs to single spaces and trims.
pub(crate) fn collapse_ws(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for w in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(w);
    }
    out
}

fn html_text_into(el: &Element, out: &mut String) {
    for child in &el.children {
        match child {
            Node::Text(t) => out.push_str(t),
            Node::Element(e) => match e.name.as_str() {
                "br" => out.push('\n'),
                "sup" => {
                    out.push('^');
                    html_text_into(e, out);
                }
                "sub" => {
                    out.push('_');
                    html_text_into(e, out);
                }
                "p" | "div" | "fn" | "li" | "tr" => {
                    out.push('\n');
                    html_text_into(e, out);
                    out.push('\n');
                }
                "td" | "th" => {
                    out.push(' ');
                    html_text_into(e, out);
                    out.push(' ');
                }
                _ => html_text_into(e, out),
            },
        }
    }
}

/// Text of WordprocessingML content: `w:t` runs, tabs as spaces, `w:br` as
/// line breaks, superscript runs prefixed with `^` and subscript runs with `_`.
pub(crate) fn docx_text_into(el: &Element, out: &mut String) {
    for child in el.child_elements() {
        match child.name.as_str() {
            "w:t" => out.push_str(&child.raw_text()),
            "w:tab" => out.push(' '),
            "w:br" | "w:cr" => out.push('\n'),
            "w:rpr" | "w:ppr" | "w:tcpr" | "w:trpr" | "w:tblpr" | "w:instrtext" => {}
            "w:r" => {
                match vert_align(child) {
                    Some("superscript") => out.push('^'),
                    Some("subscript") => out.push('_'),
                    _ => {}
                }
                docx_text_into(child, out);
            }
            "w:p" => {
                if !out.is_empty() && !out.ends_with('\n') {
                    out.push('\n');
                }
                docx_text_into(child, out);
            }
            _ => docx_text_into(child, out),
        }
    }
}

fn vert_align(run: &Element) -> Option<&str> {
    run.first_child("w:rpr")?
        .first_child("w:vertalign")?
        .attr("w:val")
}

enum Item {
    Table(usize),
    Block(String),
}

fn block_sequence(root: &Element, format: SourceFormat) -> Vec<Item> {
    let mut items = Vec::new();
    push_items(root, format, &mut items);
    items
}

fn push_items(el: &Element, format: SourceFormat, items: &mut Vec<Item>) {
    let tag = table_tag(format);
    for child in el.child_elements() {
        if child.is(tag) {
            items.push(Item::Table(child.span.start));
        } else if BLOCKS.contains(&child.name.as_str())
            && !contains_block(child)
            && child.find(tag).is_none()
        {
            items.push(Item::Block(block_text(child, format, "\n")));
        } else {
            push_items(child, format, items);
        }
    }
}

fn guess_from_items(items: &[Item], table_start: usize) -> (Option<String>, Option<String>) {
    let Some(pos) = items
        .iter()
        .position(|it| matches!(it, Item::Table(s) if *s == table_start))
    else {
        return (None, None);
    };
    let before = items[..pos].iter().rev().find(|it| match it {
        Item::Block(t) => !t.trim().is_empty(),
        Item::Table(_) => true,
    });
    let after = items[pos + 1..].iter().find(|it| match it {
        Item::Block(t) => !t.trim().is_empty(),
        Item::Table(_) => true,
    });
    let caption = match before {
        Some(Item::Block(t)) if count_sentences(t) == 1 => Some(t.replace('\n', " ")),
        _ => None,
    };
    let footnote = match after {
        Some(Item::Block(t)) if count_sentences(t) < 6 => Some(t.clone()),
        _ => None,
    };
    (caption, footnote)
}

/// Caption and footnote of the `table_position`-th (1-based) table of a
/// floating-paragraph document.
///
/// The nearest non-empty block before the table becomes the caption if it
/// holds exactly one sentence; the nearest non-empty block after it becomes
/// the footnote if it holds fewer than six sentences.
pub fn guess_caption_footer(
    document: &str,
    table_position: usize,
) -> (Option<String>, Option<String>) {
    let format = if document.contains("<w:tbl") {
        SourceFormat::Docx
    } else {
        SourceFormat::Html
    };
    let root = markup::parse(document);
    let items = block_sequence(&root, format);
    let starts: Vec<usize> = items
        .iter()
        .filter_map(|it| match it {
            Item::Table(s) => Some(*s),
            Item::Block(_) => None,
        })
        .collect();
    match table_position.checked_sub(1).and_then(|i| starts.get(i)) {
        Some(&start) => guess_from_items(&items, start),
        None => (None, None),
    }
}

const NON_TERMINAL: &[&str] = &[
    "e.g.", "i.e.", "fig.", "figs.", "no.", "nos.", "vs.", "et al.", "cf.", "approx.", "ca.",
    "resp.", "tab.", "eq.", "dr.", "prof.", "etc.",
];

/// Number of sentences in `text`; empty text has zero.
///
/// A sentence ends at `.`, `!` or `?` followed by whitespace and an upper
/// case letter. Common abbreviations and `Table N.` / `Fig N.` labels do not
/// end a sentence.
pub fn count_sentences(text: &str) -> usize {
    let t = text.trim();
    if t.is_empty() {
        return 0;
    }
    let chars: Vec<(usize, char)> = t.char_indices().collect();
    let mut count = 1;
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if matches!(c, '.' | '!' | '?') {
            let mut j = i + 1;
            let mut saw_ws = false;
            while j < chars.len() && chars[j].1.is_whitespace() {
                saw_ws = true;
                j += 1;
            }
            if saw_ws
                && j < chars.len()
                && chars[j].1.is_uppercase()
                && !(c == '.' && ends_with_abbreviation(&t[..pos + 1]))
            {
                count += 1;
            }
            i = j.max(i + 1);
            continue;
        }
        i += 1;
    }
    count
}

fn ends_with_abbreviation(prefix: &str) -> bool {
    let lower = prefix.to_lowercase();
    for abbr in NON_TERMINAL {
        if lower.ends_with(abbr) {
            let start = lower.len() - abbr.len();
            let boundary = lower[..start]
                .chars()
                .next_back()
                .is_none_or(|c| !c.is_alphanumeric());
            if boundary {
                return true;
            }
        }
    }
    // "Table 5." / "Fig 2." / "Table S1."
    let body = &prefix[..prefix.len() - 1];
    let word_start = body.rfind(|c: char| c.is_whitespace()).map_or(0, |i| i + 1);
    let label = &body[word_start..];
    let before = body[..word_start].trim_end();
    let last_word = before
        .rsplit(|c: char| c.is_whitespace())
        .next()
        .unwrap_or("");
    let numbered = !label.is_empty()
        && label.chars().any(|c| c.is_ascii_digit())
        && label.chars().all(|c| c.is_ascii_alphanumeric() || c == '.');
    numbered && matches!(last_word, "Table" | "Tab" | "Fig" | "Figure" | "TABLE")
}
