//! Table preprocessing (label filling, bracket and code decoding,
//! imputation, abbreviation expansion, df handling) and collapsing into
//! text lines.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::classify::{
    classify_table, core_label, is_model_stat_label, leading_ordinal, TableClass,
};
use crate::error::{Error, Warning};
use crate::ingest::RawTable;
use crate::legend::{parse_legend_codings, CodeToken, DiagonalMeaning, LegendCodes};
use crate::matrix::{table_to_matrix, CharTable};
use crate::options::RunOptions;
use crate::scan::{
    format_number, is_code_char, leading_number, leading_value_end, split_top_level,
    starts_numeric, Operator,
};

/// Separator between a row and a column label in matrix-wise output.
pub const MATRIX_JOIN: &str = " <<~>> ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CollapseStrategy {
    Row,
    Column,
    Matrix,
    Model,
}

/// One line of collapsed table content.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapsedLine {
    pub text: String,
    pub table_index: usize,
    pub strategy: CollapseStrategy,
    /// Source row of the line, if it stems from a single row.
    pub row: Option<usize>,
    /// Source column of the line, if it stems from a single column.
    pub col: Option<usize>,
}

/// Collapsed lines of a whole document plus everything noticed on the way.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TextReport {
    pub lines: Vec<CollapsedLine>,
    pub warnings: Vec<Warning>,
    #[serde(skip)]
    pub errors: Vec<Error>,
}

/// Structural reading of a table that drives preprocessing and collapsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub class: TableClass,
    /// Number of header rows.
    pub header_rows: usize,
    /// The first column holds row labels.
    pub labels: bool,
    /// First row of the model-statistic or ANOVA residual part.
    pub lower: Option<usize>,
    pub anova: bool,
    /// First row of the correlation block.
    pub block: Option<usize>,
}

const RESIDUAL_LABELS: &[&str] = &["residuals", "residual", "error", "within", "total"];

fn effective_class(table: &CharTable, opts: &RunOptions) -> TableClass {
    opts.force_class
        .or(table.table_class)
        .unwrap_or_else(|| classify_table(table))
}

fn is_one_way(table: &CharTable) -> bool {
    let h = table.n_header_rows;
    if h == 0 || table.text(h - 1, 0).trim().is_empty() {
        return false;
    }
    let mut any = false;
    for i in h..table.n_rows() {
        let t = table.text(i, 0).trim();
        if t.is_empty() {
            continue;
        }
        if !starts_numeric(t) {
            return false;
        }
        any = true;
    }
    any
}

/// Reads the layout of `table` for class `class`.
pub fn layout(table: &CharTable, class: TableClass) -> Layout {
    let h = table.n_header_rows;
    let n = table.n_rows();
    let labels = table.n_cols() >= 2 && class != TableClass::Vector && !is_one_way(table);
    let mut lay = Layout {
        class,
        header_rows: h,
        labels,
        lower: None,
        anova: false,
        block: None,
    };
    if !labels {
        return lay;
    }
    if class.is_model() {
        lay.lower = (h..n).find(|&i| is_model_stat_label(table.text(i, 0), true));
    } else if class == TableClass::TabledResult {
        lay.lower = (h + 1..n).find(|&i| {
            RESIDUAL_LABELS.contains(&core_label(table.text(i, 0)).to_lowercase().as_str())
        });
        lay.anova = lay.lower.is_some();
    } else if class == TableClass::Correlation {
        let headers: Vec<String> = (1..table.n_cols())
            .map(|j| core_label(&header_label(table, j)).to_lowercase())
            .filter(|s| !s.is_empty())
            .collect();
        lay.block = (h..n)
            .find(|&i| {
                let l = core_label(table.text(i, 0)).to_lowercase();
                !l.is_empty() && headers.contains(&l)
            })
            .or_else(|| (h..n).find(|&i| leading_ordinal(table.text(i, 0)).is_some()))
            .or(Some(h));
    }
    lay
}

/// Header text of column `j`: the distinct non-empty header parts joined.
pub fn header_label(table: &CharTable, j: usize) -> String {
    let mut parts: Vec<&str> = Vec::new();
    for i in 0..table.n_header_rows {
        let t = table.text(i, j).trim();
        if !t.is_empty() && parts.last() != Some(&t) {
            parts.push(t);
        }
    }
    parts.join(" ")
}

fn set_header(table: &mut CharTable, j: usize, text: &str) {
    let h = table.n_header_rows;
    if h == 0 {
        return;
    }
    for i in 0..h - 1 {
        table.cells[i][j].text.clear();
    }
    table.cells[h - 1][j].text = text.to_string();
}

/// Empty row labels inherit the label above; a non-empty top-left header
/// is prefixed to every label as `Descriptor: label` and then removed.
pub fn fill_row_labels(mut table: CharTable) -> CharTable {
    let h = table.n_header_rows;
    let n = table.n_rows();
    if table.n_cols() < 2 {
        return table;
    }
    let mut last: Option<String> = None;
    for i in h..n {
        let row_has_data = table.cells[i][1..].iter().any(|c| !c.is_empty());
        if table.cells[i][0].is_empty() {
            if let (Some(l), true) = (&last, row_has_data) {
                table.cells[i][0].text = l.clone();
                table.cells[i][0].from_span = true;
            }
        } else {
            last = Some(table.cells[i][0].text.clone());
        }
    }
    let descriptor = if h > 0 {
        header_label(&table, 0)
    } else {
        String::new()
    };
    if !descriptor.is_empty() {
        for i in h..n {
            if !table.cells[i][0].is_empty() {
                table.cells[i][0].text = format!("{}: {}", descriptor, table.cells[i][0].text);
            }
        }
        for i in 0..h {
            table.cells[i][0].text.clear();
        }
    }
    table
}

/// Replaces ordinal-only column headers (`1.`, `2.`) by the labels of the
/// rows carrying the same ordinal, and strips the ordinals from the labels.
fn map_numbered_headers(table: &mut CharTable) {
    let h = table.n_header_rows;
    if h == 0 {
        return;
    }
    let mut by_ordinal: Vec<(u32, String)> = Vec::new();
    for i in h..table.n_rows() {
        if let Some((n, rest)) = leading_ordinal(table.text(i, 0)) {
            if !rest.is_empty() {
                by_ordinal.push((n, rest.to_string()));
            }
        }
    }
    if by_ordinal.is_empty() {
        return;
    }
    for j in 1..table.n_cols() {
        let head = header_label(table, j);
        if let Some((n, rest)) = leading_ordinal(&head) {
            if rest.is_empty() {
                if let Some((_, label)) = by_ordinal.iter().find(|(k, _)| *k == n) {
                    let label = label.clone();
                    set_header(table, j, &label);
                }
            }
        }
    }
    for i in h..table.n_rows() {
        if let Some((_, rest)) = leading_ordinal(table.text(i, 0)) {
            if !rest.is_empty() {
                table.cells[i][0].text = rest.to_string();
            }
        }
    }
}

struct Bracket<'a> {
    value: &'a str,
    inner: &'a str,
    codes: &'a str,
}

fn split_bracket(cell: &str) -> Option<Bracket<'_>> {
    let t = cell.trim();
    let end = leading_value_end(t)?;
    let rest = t[end..].trim_start();
    let close = match rest.chars().next()? {
        '(' => ')',
        '[' => ']',
        _ => return None,
    };
    let close_at = rest.rfind(close)?;
    let codes = rest[close_at + 1..].trim();
    if !codes.chars().all(|c| is_code_char(c) || c == '^') {
        return None;
    }
    let inner = rest[1..close_at].trim();
    leading_number(inner)?;
    Some(Bracket {
        value: t[..end].trim_end(),
        inner,
        codes,
    })
}

fn title_case(s: &str) -> String {
    s.split_whitespace()
        .map(|w| {
            let mut c = w.chars();
            match c.next() {
                Some(f) => f.to_uppercase().chain(c).collect::<String>(),
                None => String::new(),
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// A short statistic token in brackets inside a header: `Mean (SD) income`.
fn header_bracket_token(header: &str) -> Option<(usize, usize, &str)> {
    let open = header.find('(')?;
    let close = open + header[open..].find(')')?;
    let token = header[open + 1..close].trim();
    let ok = !token.is_empty()
        && token.chars().count() <= 10
        && token
            .chars()
            .all(|c| c.is_alphanumeric() || c == '%' || c == ' ')
        && token.chars().any(|c| c.is_alphabetic() || c == '%');
    ok.then_some((open, close, token))
}

fn unbalanced(s: &str) -> bool {
    s.matches('(').count() != s.matches(')').count()
        || s.matches('[').count() != s.matches(']').count()
}

/// Rewrites numbers in brackets according to the header or the footnote.
pub fn expand_brackets(
    mut table: CharTable,
    legend: &LegendCodes,
    warnings: &mut Vec<Warning>,
) -> CharTable {
    let h = table.n_header_rows;
    let first = if is_one_way(&table) { 0 } else { 1 };
    let mut j = first;
    while j < table.n_cols() {
        let header = header_label(&table, j);
        let mut handled = false;
        if let Some((open, close, token)) = header_bracket_token(&header) {
            let remaining = format!("{} {}", header[..open].trim(), header[close + 1..].trim());
            let remaining = remaining.trim().to_string();
            if token == "%" {
                let mut any = false;
                for i in h..table.n_rows() {
                    if let Some(b) = split_bracket(&table.cells[i][j].text) {
                        let text = format!("{}{}, {}%", b.value, b.codes, b.inner);
                        table.cells[i][j].text = text;
                        any = true;
                    }
                }
                if any {
                    set_header(&mut table, j, &remaining);
                    handled = true;
                }
            } else {
                let token = token.to_string();
                let matches: Vec<usize> = (h..table.n_rows())
                    .filter(|&i| split_bracket(&table.cells[i][j].text).is_some())
                    .collect();
                if !matches.is_empty() {
                    for row in table.cells.iter_mut() {
                        row.insert(j + 1, Default::default());
                    }
                    for &i in &matches {
                        let (value, inner) = {
                            let b = split_bracket(&table.cells[i][j].text).unwrap_or(Bracket {
                                value: "",
                                inner: "",
                                codes: "",
                            });
                            (format!("{}{}", b.value, b.codes), b.inner.to_string())
                        };
                        table.cells[i][j].text = value;
                        table.cells[i][j + 1].text = inner;
                    }
                    set_header(&mut table, j, &title_case(&remaining));
                    set_header(&mut table, j + 1, &token);
                    handled = true;
                    j += 1;
                }
            }
        }
        if !handled {
            for i in h..table.n_rows() {
                let text = table.cells[i][j].text.clone();
                if let (Some(meaning), Some(b)) = (&legend.bracket_meaning, split_bracket(&text)) {
                    let new = match meaning {
                        crate::legend::BracketMeaning::Percent => {
                            format!("{}{}, {}%", b.value, b.codes, b.inner)
                        }
                        crate::legend::BracketMeaning::CI => {
                            format!("{}{};; CI=[{}]", b.value, b.codes, b.inner)
                        }
                        m => format!("{}{};; {}={}", b.value, b.codes, m.label(), b.inner),
                    };
                    table.cells[i][j].text = new;
                } else if unbalanced(&text) {
                    warnings.push(Warning::new(
                        table.index,
                        format!(
                            "unmatched bracket in row {}, column {} left as is",
                            i + 1,
                            j + 1
                        ),
                    ));
                }
            }
        }
        j += 1;
    }
    table
}

/// Harmonizes a few frequent header spellings.
pub fn unify_header_labels(mut table: CharTable) -> CharTable {
    for i in 0..table.n_header_rows {
        for cell in table.cells[i].iter_mut() {
            let new = match cell.text.trim() {
                "Categories" => "Category",
                "categories" => "category",
                "Freq." | "Freq" | "freq." | "freq" => "Frequency",
                _ => continue,
            };
            cell.text = new.to_string();
        }
    }
    table
}

fn superscript_token(s: &str) -> usize {
    let mut it = s.char_indices();
    match it.next() {
        Some((_, c)) if c.is_alphanumeric() => s
            .char_indices()
            .take_while(|(_, ch)| ch.is_alphanumeric())
            .map(|(k, ch)| k + ch.len_utf8())
            .last()
            .unwrap_or(0),
        Some((_, c)) if is_code_char(c) => s
            .char_indices()
            .take_while(|(_, ch)| *ch == c)
            .map(|(k, ch)| k + ch.len_utf8())
            .last()
            .unwrap_or(0),
        _ => 0,
    }
}

/// Replaces labelled superscripts `^a` by ` (label)`.
pub fn decode_superscripts(mut table: CharTable, legend: &LegendCodes) -> CharTable {
    if legend.superscript_labels.is_empty() {
        return table;
    }
    for row in table.cells.iter_mut() {
        for cell in row.iter_mut() {
            if !cell.text.contains('^') {
                continue;
            }
            let mut out = String::new();
            let mut rest = cell.text.as_str();
            while let Some(pos) = rest.find('^') {
                out.push_str(&rest[..pos]);
                let after = &rest[pos + 1..];
                let n = superscript_token(after);
                let token = &after[..n];
                let label = legend
                    .superscript_labels
                    .iter()
                    .find(|(k, _)| k == token)
                    .map(|(_, v)| v);
                let is_code = legend.p_code(&CodeToken::Sign(token.to_string())).is_some();
                match label {
                    Some(l) if n > 0 && !is_code => {
                        out.push_str(" (");
                        out.push_str(l);
                        out.push(')');
                    }
                    _ => {
                        out.push('^');
                        out.push_str(token);
                    }
                }
                rest = &after[n..];
            }
            out.push_str(rest);
            cell.text = out;
        }
    }
    table
}

/// Coding state of body cells after p-value decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct Coding {
    coded: bool,
    significant: bool,
}

fn annotate(code: &crate::legend::PCode) -> String {
    format!(";; p{}{}", code.op.as_str(), code.literal)
}

fn insert_after_number(text: &str, annotation: &str) -> Option<String> {
    let tok = leading_number(text)?;
    Some(format!(
        "{}{}{}",
        &text[..tok.end],
        annotation,
        &text[tok.end..]
    ))
}

fn body_columns(lay: &Layout, n_cols: usize) -> core::ops::Range<usize> {
    if lay.labels {
        1..n_cols
    } else {
        0..n_cols
    }
}

#[allow(clippy::needless_range_loop)]
fn decode_p_markers_inner(
    table: &mut CharTable,
    legend: &LegendCodes,
    lay: &Layout,
    warnings: &mut Vec<Warning>,
) -> Vec<Vec<Coding>> {
    let n = table.n_rows();
    let m = table.n_cols();
    let mut coding = vec![vec![Coding::default(); m]; n];
    let signs = legend.sign_codes();
    for i in lay.header_rows..n {
        let mut styled: Vec<(usize, String)> = Vec::new();
        for j in body_columns(lay, m) {
            let text = table.cells[i][j].text.clone();
            let Some(tok) = leading_number(&text) else {
                continue;
            };
            let rest = &text[tok.end..];
            let (hat, after) = match rest.strip_prefix('^') {
                Some(a) => (true, a),
                None => (false, rest),
            };
            let mut new_text = None;
            for (sign, code) in &signs {
                let alnum = sign.chars().all(|c| c.is_alphanumeric());
                if alnum && !hat {
                    continue;
                }
                if let Some(tail) = after.strip_prefix(sign) {
                    if alnum && tail.chars().next().is_some_and(|c| c.is_alphanumeric()) {
                        continue;
                    }
                    new_text = Some(format!("{}{}{}", &text[..tok.end], annotate(code), tail));
                    coding[i][j] = Coding {
                        coded: true,
                        significant: matches!(code.op, Operator::Lt | Operator::Le),
                    };
                    break;
                }
            }
            match new_text {
                Some(t) => table.cells[i][j].text = t,
                None => {
                    if after.chars().next().is_some_and(is_code_char) {
                        warnings.push(Warning::new(
                            table.index,
                            format!(
                                "unknown p-value code in row {}, column {}: {}",
                                i + 1,
                                j + 1,
                                text
                            ),
                        ));
                    }
                }
            }
            let cell = &table.cells[i][j];
            let style = if cell.bold {
                legend.p_code(&CodeToken::Bold)
            } else {
                None
            }
            .or_else(|| {
                if cell.italic {
                    legend.p_code(&CodeToken::Italic)
                } else {
                    None
                }
            });
            if let Some(code) = style {
                let before = cell.text.clone();
                if let Some(t) = insert_after_number(&before, &annotate(code)) {
                    table.cells[i][j].text = t;
                    coding[i][j] = Coding {
                        coded: true,
                        significant: matches!(code.op, Operator::Lt | Operator::Le),
                    };
                    styled.push((j, before));
                }
            }
        }
        // Style-coded duplicates within a row: only the last one is kept.
        if styled.len() > 1 {
            for (j, before) in &styled[..styled.len() - 1] {
                table.cells[i][*j].text = before.clone();
                coding[i][*j] = Coding::default();
            }
        }
    }
    coding
}

fn imputable(text: &str) -> bool {
    starts_numeric(text) && !text.contains(";; p")
}

fn impute_cells(
    table: &mut CharTable,
    cells: &[(usize, usize)],
    coding: &[Vec<Coding>],
    annotation: &str,
) {
    if !cells.iter().any(|&(i, j)| coding[i][j].significant) {
        return;
    }
    for &(i, j) in cells {
        if coding[i][j].coded {
            continue;
        }
        let text = &table.cells[i][j].text;
        if !imputable(text) {
            continue;
        }
        if let Some(t) = insert_after_number(text, annotation) {
            table.cells[i][j].text = t;
        }
    }
}

fn is_diagonal(table: &CharTable, i: usize, j: usize, lay: &Layout) -> bool {
    let row = core_label(table.text(i, 0)).to_lowercase();
    let col = core_label(&header_label(table, j)).to_lowercase();
    if !row.is_empty() && !col.is_empty() {
        return row == col;
    }
    lay.block.is_some_and(|b| i >= b && i - b + 1 == j)
}

fn impute_nonsignificant_inner(
    table: &mut CharTable,
    legend: &LegendCodes,
    lay: &Layout,
    coding: &[Vec<Coding>],
) {
    let Some(max) = legend.max_significance_threshold() else {
        return;
    };
    let annotation = format!(";; p>{}", format_number(max));
    let n = table.n_rows();
    let cols = body_columns(lay, table.n_cols());
    let h = lay.header_rows;
    match lay.class {
        TableClass::Vector | TableClass::Text => {}
        TableClass::Correlation => {
            let start = lay.block.unwrap_or(h);
            let mut cells = Vec::new();
            for i in start..n {
                for j in cols.clone() {
                    let t = table.text(i, j);
                    if t.trim().is_empty() || is_diagonal(table, i, j, lay) {
                        continue;
                    }
                    if leading_number(t).is_some_and(|v| v.value.abs() == 1.0) {
                        continue;
                    }
                    cells.push((i, j));
                }
            }
            impute_cells(table, &cells, coding, &annotation);
        }
        _ => {
            let upper_end = lay.lower.unwrap_or(n);
            for j in cols.clone() {
                let cells: Vec<(usize, usize)> = (h..upper_end).map(|i| (i, j)).collect();
                impute_cells(table, &cells, coding, &annotation);
            }
            if lay.class.is_model() {
                if let Some(lower) = lay.lower {
                    for i in lower..n {
                        let cells: Vec<(usize, usize)> = cols.clone().map(|j| (i, j)).collect();
                        impute_cells(table, &cells, coding, &annotation);
                    }
                }
            }
        }
    }
}

fn replace_tokens(text: &str, key: &str, long: &str) -> String {
    let mut out = String::new();
    let mut idx = 0;
    while let Some(pos) = text[idx..].find(key) {
        let at = idx + pos;
        let before = text[..at].chars().next_back();
        let after = text[at + key.len()..].chars().next();
        let key_ends_alnum = key.chars().next_back().is_some_and(|c| c.is_alphanumeric());
        let bounded = before.is_none_or(|c| !c.is_alphanumeric())
            && after.is_none_or(|c| !(c.is_alphanumeric() && key_ends_alnum) && c != '.');
        out.push_str(&text[idx..at]);
        if bounded {
            out.push_str(long);
        } else {
            out.push_str(key);
        }
        idx = at + key.len();
    }
    out.push_str(&text[idx..]);
    out
}

/// Writes out abbreviations in row labels and headers.
pub fn expand_abbreviations(mut table: CharTable, legend: &LegendCodes) -> CharTable {
    if legend.abbreviations.is_empty() {
        return table;
    }
    let mut abbr: Vec<&(String, String)> = legend.abbreviations.iter().collect();
    abbr.sort_by_key(|a| core::cmp::Reverse(a.0.len()));
    let h = table.n_header_rows;
    let expand = |s: &str| {
        let mut t = s.to_string();
        for (k, v) in &abbr {
            t = replace_tokens(&t, k, v);
        }
        t
    };
    for i in 0..table.n_rows() {
        for j in 0..table.n_cols() {
            if i >= h && j > 0 {
                continue;
            }
            let t = expand(&table.cells[i][j].text);
            table.cells[i][j].text = t;
        }
    }
    table
}

fn impute_df_inner(table: &mut CharTable, legend: &LegendCodes, lay: &Layout) {
    let n = table.n_rows();
    let h = lay.header_rows;
    let cols = body_columns(lay, table.n_cols());
    let df = legend.sample_size.filter(|&s| s > 2).map(|s| s - 2);
    if lay.class == TableClass::Correlation {
        if let Some(df) = df {
            for i in lay.block.unwrap_or(h)..n {
                for j in cols.clone() {
                    let t = table.text(i, j).trim().to_string();
                    let Some(v) = leading_number(&t) else {
                        continue;
                    };
                    if is_diagonal(table, i, j, lay) && v.value.abs() != 1.0 {
                        continue;
                    }
                    if t.starts_with('r') {
                        continue;
                    }
                    table.cells[i][j].text = format!("r({df})={t}");
                }
            }
        }
        return;
    }
    for j in cols.clone() {
        let head = header_label(table, j).to_lowercase();
        let head = head.trim();
        if matches!(head, "t" | "t-value" | "t value" | "t-test") {
            if let Some(df) = df {
                for i in h..n {
                    let t = table.text(i, j).trim().to_string();
                    if starts_numeric(&t) {
                        table.cells[i][j].text = format!("t({df})={t}");
                    }
                }
                set_header(table, j, "");
            }
        }
    }
    if !lay.anova {
        return;
    }
    let Some(df_col) = cols
        .clone()
        .find(|&j| header_label(table, j).trim().eq_ignore_ascii_case("df"))
    else {
        return;
    };
    let lower = lay.lower.unwrap_or(n);
    let residual = (lower..n).find(|&i| {
        let l = core_label(table.text(i, 0)).to_lowercase();
        l != "total" && RESIDUAL_LABELS.contains(&l.as_str())
    });
    let Some(res_row) = residual else {
        return;
    };
    let Some(res_df) = leading_number(table.text(res_row, df_col)).map(|t| t.literal.to_string())
    else {
        return;
    };
    for i in h..n {
        let t = table.text(i, df_col).trim().to_string();
        let Some(tok) = leading_number(&t) else {
            continue;
        };
        let v = tok.literal;
        table.cells[i][df_col].text = if i < lower {
            format!("df1={v}, df2={res_df}")
        } else if i == res_row {
            format!("df2={v}")
        } else {
            format!("df={v}")
        };
    }
    set_header(table, df_col, "");
}

/// Runs every enabled preprocessing step on a classified table.
pub fn preprocess(
    table: &CharTable,
    legend: &LegendCodes,
    opts: &RunOptions,
    warnings: &mut Vec<Warning>,
) -> CharTable {
    let class = effective_class(table, opts);
    let mut t = table.clone();
    t.table_class = table.table_class.or(Some(class));
    if matches!(class, TableClass::Vector) {
        return t;
    }
    if matches!(class, TableClass::Matrix | TableClass::Correlation) {
        map_numbered_headers(&mut t);
    }
    let labels = layout(&t, class).labels;
    if labels && class != TableClass::Text {
        t = fill_row_labels(t);
    }
    if opts.bracket_handling {
        t = expand_brackets(t, legend, warnings);
    }
    t = unify_header_labels(t);
    if opts.superscript2bracket {
        t = decode_superscripts(t, legend);
    }
    let lay = layout(&t, class);
    if opts.decode_p {
        let coding = decode_p_markers_inner(&mut t, legend, &lay, warnings);
        if opts.no_sign2p {
            impute_nonsignificant_inner(&mut t, legend, &lay, &coding);
        }
    }
    if opts.expand_abbreviations {
        t = expand_abbreviations(t, legend);
    }
    if opts.df_handling {
        let lay = layout(&t, class);
        impute_df_inner(&mut t, legend, &lay);
    }
    t
}

/// Decodes codes in body cells; see [`preprocess`] for the full chain.
pub fn decode_p_markers(
    mut table: CharTable,
    legend: &LegendCodes,
    opts: &RunOptions,
    warnings: &mut Vec<Warning>,
) -> CharTable {
    let lay = layout(&table, effective_class(&table, opts));
    let coding = decode_p_markers_inner(&mut table, legend, &lay, warnings);
    if opts.no_sign2p {
        impute_nonsignificant_inner(&mut table, legend, &lay, &coding);
    }
    table
}

/// Attaches `;; p>alpha` to uncoded numeric cells of a table whose codes
/// have already been decoded.
pub fn impute_nonsignificant(
    mut table: CharTable,
    legend: &LegendCodes,
    class: TableClass,
) -> CharTable {
    let lay = layout(&table, class);
    let coding: Vec<Vec<Coding>> = table
        .cells
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| {
                    let sig = c.text.contains(";; p<");
                    Coding {
                        coded: c.text.contains(";; p"),
                        significant: sig,
                    }
                })
                .collect()
        })
        .collect();
    impute_nonsignificant_inner(&mut table, legend, &lay, &coding);
    table
}

/// Adds degrees of freedom to correlations, t values and ANOVA rows.
pub fn impute_df(mut table: CharTable, legend: &LegendCodes, class: TableClass) -> CharTable {
    let lay = layout(&table, class);
    impute_df_inner(&mut table, legend, &lay);
    table
}

fn token(header: &str, cell: &str) -> String {
    let header = header.trim();
    if header.is_empty() {
        cell.to_string()
    } else if starts_numeric(cell) {
        format!("{header}={cell}")
    } else {
        format!("{header}: {cell}")
    }
}

fn join_line(label: &str, tokens: &[String], comma: bool) -> Option<String> {
    let label = label.trim();
    match (label.is_empty(), tokens.is_empty()) {
        (true, true) => None,
        (true, false) => Some(tokens.join(", ")),
        (false, true) => Some(label.to_string()),
        (false, false) => {
            let sep = if comma || label.contains(": ") {
                ", "
            } else {
                ": "
            };
            Some(format!("{}{}{}", label, sep, tokens.join(", ")))
        }
    }
}

fn line(
    text: String,
    table: &CharTable,
    strategy: CollapseStrategy,
    row: Option<usize>,
    col: Option<usize>,
) -> CollapsedLine {
    CollapsedLine {
        text,
        table_index: table.index,
        strategy,
        row,
        col,
    }
}

fn row_wise(
    table: &CharTable,
    lay: &Layout,
    rows: core::ops::Range<usize>,
    comma: bool,
    out: &mut Vec<CollapsedLine>,
) {
    let cols = body_columns(lay, table.n_cols());
    let headers: Vec<String> = (0..table.n_cols())
        .map(|j| header_label(table, j))
        .collect();
    for i in rows {
        let label = if lay.labels { table.text(i, 0) } else { "" };
        let tokens: Vec<String> = cols
            .clone()
            .filter(|&j| !table.text(i, j).trim().is_empty())
            .map(|j| token(&headers[j], table.text(i, j).trim()))
            .collect();
        if let Some(text) = join_line(label, &tokens, comma) {
            out.push(line(text, table, CollapseStrategy::Row, Some(i), None));
        }
    }
}

/// One line per column: `Header: Row A=1, Row B=2`.
pub fn column_wise(table: &CharTable, lay: &Layout) -> Vec<CollapsedLine> {
    let mut out = Vec::new();
    for j in body_columns(lay, table.n_cols()) {
        let head = header_label(table, j);
        let tokens: Vec<String> = (lay.header_rows..table.n_rows())
            .filter(|&i| !table.text(i, j).trim().is_empty())
            .map(|i| {
                let label = if lay.labels { table.text(i, 0) } else { "" };
                token(label, table.text(i, j).trim())
            })
            .collect();
        if let Some(text) = join_line(&head, &tokens, false) {
            out.push(line(text, table, CollapseStrategy::Column, None, Some(j)));
        }
    }
    out
}

fn rotated(table: &CharTable, lay: &Layout) -> CharTable {
    let cols: Vec<usize> = body_columns(lay, table.n_cols()).collect();
    let body: Vec<usize> = (lay.header_rows..table.n_rows()).collect();
    let mut rows: Vec<Vec<String>> = Vec::with_capacity(cols.len() + 1);
    let mut head = vec![String::new()];
    for &i in &body {
        head.push(if lay.labels {
            table.text(i, 0).to_string()
        } else {
            String::new()
        });
    }
    rows.push(head);
    for &j in &cols {
        let mut r = vec![header_label(table, j)];
        for &i in &body {
            r.push(table.text(i, j).to_string());
        }
        rows.push(r);
    }
    let mut t = CharTable::from_rows(&rows, 1);
    t.index = table.index;
    t
}

fn matrix_wise(table: &CharTable, lay: &Layout, start: usize, out: &mut Vec<CollapsedLine>) {
    let correlation = lay.class == TableClass::Correlation;
    let diagonal = parse_legend_codings(
        table.caption.as_deref().unwrap_or(""),
        table.footnote.as_deref().unwrap_or(""),
    )
    .diagonal_meaning
    .unwrap_or(DiagonalMeaning::Alpha);
    for i in start..table.n_rows() {
        let row = table.text(i, 0).trim();
        for j in 1..table.n_cols() {
            let cell = table.text(i, j).trim();
            if cell.is_empty() {
                continue;
            }
            let col = header_label(table, j);
            let pair = format!("{row}{MATRIX_JOIN}{col}");
            let numeric = starts_numeric(cell);
            let text = if correlation {
                let diag = is_diagonal(table, i, j, lay);
                let value = leading_number(cell).map(|t| t.value);
                if diag && numeric && value.is_some_and(|v| v.abs() != 1.0) {
                    format!("{pair}: {}={cell}", diagonal.label())
                } else if cell.starts_with("r(") || cell.starts_with("r=") || !numeric {
                    format!("{pair}: {cell}")
                } else {
                    format!("{pair}: r={cell}")
                }
            } else if numeric {
                format!("{pair}, VALUE={cell}")
            } else {
                format!("{pair}: {cell}")
            };
            out.push(line(
                text,
                table,
                CollapseStrategy::Matrix,
                Some(i),
                Some(j),
            ));
        }
    }
}

fn model_lower(table: &CharTable, lay: &Layout, lower: usize, out: &mut Vec<CollapsedLine>) {
    let mut segments = Vec::new();
    for j in body_columns(lay, table.n_cols()) {
        let parts: Vec<String> = (lower..table.n_rows())
            .filter(|&i| !table.text(i, j).trim().is_empty())
            .map(|i| token(core_label(table.text(i, 0)), table.text(i, j).trim()))
            .collect();
        if parts.is_empty() {
            continue;
        }
        let head = header_label(table, j);
        let seg = parts.join(", ");
        segments.push(if head.is_empty() {
            seg
        } else {
            format!("{head}: {seg}")
        });
    }
    if !segments.is_empty() {
        out.push(line(
            segments.join(", "),
            table,
            CollapseStrategy::Model,
            None,
            None,
        ));
    }
}

/// Collapses a (preprocessed) table into text lines using the strategy of
/// its effective class.
pub fn collapse(table: &CharTable, opts: &RunOptions) -> Vec<CollapsedLine> {
    let class = effective_class(table, opts);
    let lay = layout(table, class);
    let n = table.n_rows();
    let h = lay.header_rows;
    let mut out = Vec::new();
    if class == TableClass::Vector {
        let parts: Vec<&str> = table
            .cells
            .iter()
            .flatten()
            .map(|c| c.text.trim())
            .filter(|t| !t.is_empty())
            .collect();
        if !parts.is_empty() {
            out.push(line(
                parts.join(", "),
                table,
                CollapseStrategy::Row,
                None,
                None,
            ));
        }
    } else if opts.rotate {
        let r = rotated(table, &lay);
        let rl = Layout {
            class: TableClass::TabledResult,
            header_rows: 1,
            labels: true,
            lower: None,
            anova: false,
            block: None,
        };
        let mut lines = Vec::new();
        row_wise(&r, &rl, 1..r.n_rows(), false, &mut lines);
        let cols: Vec<usize> = body_columns(&lay, table.n_cols()).collect();
        for mut l in lines {
            l.col = l.row.and_then(|k| cols.get(k - 1).copied());
            l.row = None;
            l.strategy = CollapseStrategy::Column;
            out.push(l);
        }
    } else {
        match class {
            TableClass::Matrix if lay.labels => matrix_wise(table, &lay, h, &mut out),
            TableClass::Correlation if lay.labels => {
                let start = lay.block.unwrap_or(h);
                row_wise(table, &lay, h..start, true, &mut out);
                matrix_wise(table, &lay, start, &mut out);
            }
            c if c.is_model() && lay.lower.is_some() => {
                let lower = lay.lower.unwrap_or(n);
                row_wise(table, &lay, h..lower, false, &mut out);
                model_lower(table, &lay, lower, &mut out);
            }
            _ => row_wise(table, &lay, h..n, false, &mut out),
        }
    }
    if opts.unify_stats {
        for l in out.iter_mut() {
            l.text = unify_stats(&l.text);
        }
    }
    out
}

const STAT_NAMES: &[&str] = &[
    "t", "Z", "z", "F", "chi2", "beta", "b", "r", "R2", "U", "H", "Q", "G2", "d", "eta2", "omega2",
    "OR", "RR", "BF", "BF10", "BF01", "SE", "p", "df", "df1", "df2",
];

fn add_leading_zeros(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::with_capacity(s.len() + 4);
    for (k, &c) in chars.iter().enumerate() {
        if c == '.' {
            let prev = if k == 0 { None } else { Some(chars[k - 1]) };
            let next = chars.get(k + 1);
            let prev_ok =
                prev.is_none_or(|p| matches!(p, ' ' | '=' | '<' | '>' | '(' | '[' | '-' | ','));
            if prev_ok && next.is_some_and(|n| n.is_ascii_digit()) {
                out.push('0');
            }
        }
        out.push(c);
    }
    out
}

/// Normalizes statistic spellings in a collapsed line so that results can
/// be parsed: bracket statistics behind `;;` become regular assignments,
/// `P(>F)` becomes `p`, `R^2` becomes `R2`, `deltaF` becomes `delta F`,
/// leading zeros are added, `A*B` is spaced and coefficients followed by a
/// standard error are named `b`.
pub fn unify_stats(line: &str) -> String {
    let mut s = String::from(line);
    // ";; SD=" -> ", SD=" for everything but p
    let mut out = String::new();
    let mut rest = s.as_str();
    while let Some(pos) = rest.find(";; ") {
        out.push_str(&rest[..pos]);
        let after = &rest[pos + 3..];
        let name_len = after
            .char_indices()
            .take_while(|(_, c)| c.is_alphanumeric() || *c == '_')
            .map(|(k, c)| k + c.len_utf8())
            .last()
            .unwrap_or(0);
        let name = &after[..name_len];
        let next = after[name_len..].chars().next();
        if !name.is_empty() && name != "p" && next == Some('=') {
            out.push_str(", ");
        } else {
            out.push_str(";; ");
        }
        rest = after;
    }
    out.push_str(rest);
    s = out;

    for pat in [
        "Pr(>|t|)", "P(>|t|)", "Pr(>|z|)", "Pr(>F)", "P(>F)", "Pr(>Chi)", "p-value", "p value",
        "P-value", "P value",
    ] {
        s = replace_header_p(&s, pat);
    }
    s = add_leading_zeros(&s);

    // letter^2 -> letter2
    let chars: Vec<char> = s.chars().collect();
    let mut t = String::with_capacity(s.len());
    let mut k = 0;
    while k < chars.len() {
        if chars[k] == '^'
            && chars.get(k + 1) == Some(&'2')
            && k > 0
            && chars[k - 1].is_alphabetic()
            && chars.get(k + 2).is_none_or(|c| !c.is_ascii_digit())
        {
            t.push('2');
            k += 2;
            continue;
        }
        t.push(chars[k]);
        k += 1;
    }
    s = t;

    // deltaF -> delta F
    let mut t = String::with_capacity(s.len() + 4);
    let mut idx = 0;
    while let Some(pos) = s[idx..].find("delta") {
        let at = idx + pos;
        t.push_str(&s[idx..at]);
        t.push_str("delta");
        let before = s[..at].chars().next_back();
        let after = s[at + 5..].chars().next();
        if before.is_none_or(|c| !c.is_alphabetic()) && after.is_some_and(|c| c.is_alphanumeric()) {
            t.push(' ');
        }
        idx = at + 5;
    }
    t.push_str(&s[idx..]);
    s = t;

    // A*B -> A * B
    let chars: Vec<char> = s.chars().collect();
    let mut t = String::with_capacity(s.len() + 4);
    for (k, &c) in chars.iter().enumerate() {
        if c == '*'
            && k > 0
            && chars[k - 1].is_alphanumeric()
            && chars.get(k + 1).is_some_and(|n| n.is_alphanumeric())
            && chars[..k]
                .iter()
                .rev()
                .take_while(|c| c.is_alphanumeric())
                .any(|c| c.is_alphabetic())
        {
            t.push_str(" * ");
        } else {
            t.push(c);
        }
    }
    s = t;

    apply_b_rule(&s)
}

fn replace_header_p(s: &str, pat: &str) -> String {
    let mut out = String::new();
    let mut idx = 0;
    while let Some(pos) = s[idx..].find(pat) {
        let at = idx + pos;
        let after = s[at + pat.len()..].chars().next();
        out.push_str(&s[idx..at]);
        if matches!(after, Some('=' | '<' | '>')) {
            out.push('p');
        } else {
            out.push_str(pat);
        }
        idx = at + pat.len();
    }
    out.push_str(&s[idx..]);
    out
}

fn apply_b_rule(s: &str) -> String {
    let tokens = split_top_level(s);
    let mut out: Vec<String> = Vec::with_capacity(tokens.len());
    for (k, tok) in tokens.iter().enumerate() {
        let next_is_se = tokens.get(k + 1).is_some_and(|n| {
            n.trim_start().starts_with("SE=") || n.trim_start().starts_with("SE =")
        });
        if next_is_se {
            if let Some(new) = name_coefficient(tok) {
                out.push(new);
                continue;
            }
        }
        out.push(tok.to_string());
    }
    out.join(", ")
}

fn name_coefficient(tok: &str) -> Option<String> {
    let (prefix, value) = match tok.find('=') {
        Some(eq) => (&tok[..eq], &tok[eq + 1..]),
        None => {
            let c = tok.find(": ")?;
            (&tok[..c], &tok[c + 2..])
        }
    };
    leading_number(value)?;
    let prefix = prefix.trim_end();
    let last = prefix.rsplit(' ').next().unwrap_or("");
    let last_name = last.split('(').next().unwrap_or("");
    if STAT_NAMES.contains(&last_name) || prefix.contains(['<', '>', ';']) {
        return None;
    }
    if prefix.is_empty() {
        return Some(format!("b={}", value.trim_start()));
    }
    Some(format!("{} b={}", prefix, value.trim_start()))
}

/// Collapses one matrix: classification, legend decoding, preprocessing and
/// collapsing. Warnings are appended to `warnings`.
pub fn table_lines(
    table: &CharTable,
    opts: &RunOptions,
    warnings: &mut Vec<Warning>,
) -> (Vec<CollapsedLine>, LegendCodes) {
    let mut t = table.clone();
    if t.table_class.is_none() {
        t.table_class = Some(classify_table(&t));
    }
    let mut legend = parse_legend_codings(
        t.caption.as_deref().unwrap_or(""),
        t.footnote.as_deref().unwrap_or(""),
    );
    if opts.standard_pcoding {
        legend.apply_standard_coding();
    }
    warnings.extend(t.warnings.iter().cloned());
    let prepared = preprocess(&t, &legend, opts, warnings);
    (collapse(&prepared, opts), legend)
}

/// Runs matrix building, classification, legend decoding, preprocessing and
/// collapsing for every table. Tables that fail are reported in `errors`
/// and skipped.
pub fn table_to_text(tables: &[RawTable], opts: &RunOptions) -> TextReport {
    let mut report = TextReport::default();
    for raw in tables {
        match table_to_matrix(raw, opts) {
            Ok(m) => {
                let (lines, _) = table_lines(&m, opts, &mut report.warnings);
                report.lines.extend(lines);
            }
            Err(e) => report.errors.push(e),
        }
    }
    report
}
