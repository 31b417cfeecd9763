//! Rule cascade assigning every table one class.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::Serialize;

use crate::matrix::CharTable;
use crate::scan::{is_numeric_content, leading_number, starts_with_letter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableClass {
    Vector,
    Text,
    TabledResult,
    Matrix,
    Correlation,
    ModelWithStatistic,
    MultiModelWithStatistic,
}

impl TableClass {
    pub const ALL: [TableClass; 7] = [
        TableClass::Vector,
        TableClass::Text,
        TableClass::TabledResult,
        TableClass::Matrix,
        TableClass::Correlation,
        TableClass::ModelWithStatistic,
        TableClass::MultiModelWithStatistic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TableClass::Vector => "vector",
            TableClass::Text => "text",
            TableClass::TabledResult => "tabled_result",
            TableClass::Matrix => "matrix",
            TableClass::Correlation => "correlation",
            TableClass::ModelWithStatistic => "model_with_statistic",
            TableClass::MultiModelWithStatistic => "multi_model_with_statistic",
        }
    }

    /// Parses a class name; spaces, dashes and underscores are interchangeable.
    pub fn parse(name: &str) -> Option<TableClass> {
        let key: String = name
            .trim()
            .chars()
            .filter(|c| !matches!(c, ' ' | '-' | '_'))
            .collect::<String>()
            .to_lowercase();
        Some(match key.as_str() {
            "vector" => TableClass::Vector,
            "text" => TableClass::Text,
            "tabledresult" | "tabled" | "result" => TableClass::TabledResult,
            "matrix" => TableClass::Matrix,
            "correlation" => TableClass::Correlation,
            "model" | "modelwithstatistic" | "modelwithmodelstatistic" => {
                TableClass::ModelWithStatistic
            }
            "multimodel" | "multimodelwithstatistic" | "multimodelwithmodelstatistic" => {
                TableClass::MultiModelWithStatistic
            }
            _ => return None,
        })
    }

    pub fn is_model(self) -> bool {
        matches!(
            self,
            TableClass::ModelWithStatistic | TableClass::MultiModelWithStatistic
        )
    }
}

impl fmt::Display for TableClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Row or column label without a `Descriptor: ` prefix and leading
/// numbering: `"3. Extr."` gives `"Extr."`, `"1."` gives `""`.
pub fn core_label(label: &str) -> &str {
    let t = label.trim();
    let t = match t.rfind(": ") {
        Some(i) => &t[i + 2..],
        None => t,
    };
    match leading_ordinal(t) {
        Some((_, rest)) => rest,
        None => t,
    }
}

/// Leading enumeration of a label (`"2. Income"`, `"3)"`, `"1"`), returned
/// with the remaining text.
pub fn leading_ordinal(label: &str) -> Option<(u32, &str)> {
    let t = label.trim_start();
    let digits = t.bytes().take_while(|b| b.is_ascii_digit()).count();
    if digits == 0 || digits > 4 {
        return None;
    }
    let n: u32 = t[..digits].parse().ok()?;
    let rest = &t[digits..];
    let rest = if let Some(r) = rest.strip_prefix(['.', ')']) {
        r
    } else if rest.is_empty() || rest.starts_with(' ') {
        rest
    } else {
        return None;
    };
    Some((n, rest.trim()))
}

/// True for labels of model fit rows: R2 variants, AIC, BIC, log-likelihood,
/// deviance. With `with_changes`, change rows such as `delta F` count too.
pub fn is_model_stat_label(label: &str, with_changes: bool) -> bool {
    let key: String = core_label(label)
        .chars()
        .filter(|c| !matches!(c, ' ' | '^' | '_' | '-' | '.' | '²' | '(' | ')'))
        .collect::<String>()
        .to_lowercase();
    let (stripped, change) = match key.strip_prefix("delta").or_else(|| key.strip_prefix('δ')) {
        Some(s) => (s, true),
        None => (key.as_str(), false),
    };
    let fit = matches!(
        stripped,
        "r2" | "adjr2"
            | "adjustedr2"
            | "r2adj"
            | "r2adjusted"
            | "pseudor2"
            | "nagelkerker2"
            | "coxsnellr2"
            | "mcfaddenr2"
            | "aic"
            | "bic"
            | "loglikelihood"
            | "2loglikelihood"
            | "ll"
            | "2ll"
            | "deviance"
            | "r"
    ) && !(stripped == "r" && !change);
    fit || (with_changes && change && matches!(stripped, "f" | "chi2" | "r2" | "ll" | "2ll"))
}

fn leading_run_increasing(labels: &[&str]) -> bool {
    let nums: Vec<u32> = labels
        .iter()
        .filter_map(|l| leading_ordinal(l).map(|(n, _)| n))
        .collect();
    let mut run = 1;
    for w in nums.windows(2) {
        if w[1] == w[0] + 1 {
            run += 1;
            if run >= 3 {
                return true;
            }
        } else {
            run = 1;
        }
    }
    false
}

fn matching_labels(row: &[&str], col: &[&str]) -> usize {
    let norm = |s: &str| core_label(s).to_lowercase();
    let col_keys: Vec<String> = col
        .iter()
        .map(|s| norm(s))
        .filter(|s| !s.is_empty())
        .collect();
    let mut seen: Vec<String> = Vec::new();
    for r in row {
        let k = norm(r);
        if !k.is_empty() && col_keys.contains(&k) && !seen.contains(&k) {
            seen.push(k);
        }
    }
    seen.len()
}

fn caption_has(table: &CharTable, terms: &[&str]) -> bool {
    table.caption.as_deref().is_some_and(|c| {
        let lower = c.to_lowercase();
        terms.iter().any(|t| lower.contains(t))
    })
}

/// Assigns a [`TableClass`]; the first matching rule wins.
pub fn classify_table(table: &CharTable) -> TableClass {
    let (n, m) = (table.n_rows(), table.n_cols());
    if n <= 1 || m <= 1 {
        return TableClass::Vector;
    }

    let non_empty: Vec<&str> = table
        .cells
        .iter()
        .flatten()
        .map(|c| c.text.trim())
        .filter(|t| !t.is_empty())
        .collect();
    if !non_empty.is_empty() {
        let letters = non_empty.iter().filter(|t| starts_with_letter(t)).count();
        if letters * 10 > non_empty.len() * 8 {
            return TableClass::Text;
        }
    }

    let first_row: Vec<&str> = (1..m).map(|j| table.text(0, j)).collect();
    let first_col: Vec<&str> = (1..n).map(|i| table.text(i, 0)).collect();
    let numbered = leading_run_increasing(&first_row) && leading_run_increasing(&first_col);
    if numbered || matching_labels(&first_row, &first_col) >= 3 {
        if caption_has(table, &["correlat", "associat", "reliab"]) {
            return TableClass::Correlation;
        }
        if numbered && numbered_block_in_unit_range(table) {
            return TableClass::Correlation;
        }
        return TableClass::Matrix;
    }

    if caption_has(table, &["regression", "model"]) {
        let counts: Vec<usize> = (table.n_header_rows..n)
            .filter(|&i| is_model_stat_label(table.text(i, 0), false))
            .map(|i| {
                (1..m)
                    .filter(|&j| is_numeric_content(table.text(i, j)))
                    .count()
            })
            .collect();
        if !counts.is_empty() {
            return if counts.iter().any(|&c| c > 1) {
                TableClass::MultiModelWithStatistic
            } else {
                TableClass::ModelWithStatistic
            };
        }
    }

    TableClass::TabledResult
}

/// All cells of the rows labelled with an enumeration are numbers in [-1, 1].
fn numbered_block_in_unit_range(table: &CharTable) -> bool {
    let mut seen = 0;
    for i in table.n_header_rows.max(1)..table.n_rows() {
        if leading_ordinal(table.text(i, 0)).is_none() {
            continue;
        }
        for j in 1..table.n_cols() {
            let t = table.text(i, j).trim();
            if t.is_empty() {
                continue;
            }
            match leading_number(t) {
                Some(tok) if (-1.0..=1.0).contains(&tok.value) => seen += 1,
                _ => return false,
            }
        }
    }
    seen > 0
}

/// Share of non-empty inner cells that are numeric, used by the
/// tabled-result rule and exposed for diagnostics.
pub fn numeric_share(table: &CharTable) -> f64 {
    let mut total = 0usize;
    let mut numeric = 0usize;
    for i in table.n_header_rows..table.n_rows() {
        for j in 1..table.n_cols() {
            let t = table.text(i, j);
            if t.trim().is_empty() {
                continue;
            }
            total += 1;
            if is_numeric_content(t) {
                numeric += 1;
            }
        }
    }
    if total == 0 {
        0.0
    } else {
        numeric as f64 / total as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[&[&str]], caption: Option<&str>) -> CharTable {
        let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
        let mut t = CharTable::from_rows(&rows, 1);
        t.caption = caption.map(String::from);
        t
    }

    #[test]
    fn vector() {
        assert_eq!(
            classify_table(&table(&[&["1", "2", "3", "4", "5"]], None)),
            TableClass::Vector
        );
        assert_eq!(
            classify_table(&table(&[&["a"], &["1"], &["2"]], None)),
            TableClass::Vector
        );
    }

    #[test]
    fn text() {
        let t = table(
            &[&["Name", "Role"], &["Ann", "Chair"], &["Bob", "Member"]],
            None,
        );
        assert_eq!(classify_table(&t), TableClass::Text);
    }

    #[test]
    fn correlation_without_caption() {
        let t = table(
            &[
                &["", "1.", "2.", "3."],
                &["Mean", "45 (11.2)", "5200 (21123)", "26.8 (5.2)"],
                &["Median", "40", "3200", "25"],
                &["1. Age", "1", ".38**", ".04"],
                &["2. Income", "", "1", ".21*"],
                &["3. Extr.", "", "", ".87"],
            ],
            None,
        );
        assert_eq!(classify_table(&t), TableClass::Correlation);
    }

    #[test]
    fn matrix_by_matching_labels() {
        let t = table(
            &[
                &["", "A", "B", "C"],
                &["A", "0", "3", "5"],
                &["B", "3", "0", "4"],
                &["C", "5", "4", "0"],
            ],
            None,
        );
        assert_eq!(classify_table(&t), TableClass::Matrix);
        let mut c = t.clone();
        c.caption = Some("Correlations between scales".into());
        assert_eq!(classify_table(&c), TableClass::Correlation);
    }

    #[test]
    fn model_tables() {
        let rows: &[&[&str]] = &[
            &["Variables", "Model 1", "Model 2"],
            &["Income", "-0.26 (.16)", "-0.39 (.21)"],
            &["R^2", "0.07", "0.22"],
        ];
        let t = table(rows, Some("Regression models"));
        assert_eq!(classify_table(&t), TableClass::MultiModelWithStatistic);
        let rows: &[&[&str]] = &[
            &["Variables", "b"],
            &["Income", "-0.26"],
            &["Age", "0.1"],
            &["AIC", "120.5"],
        ];
        let t = table(rows, Some("A regression model"));
        assert_eq!(classify_table(&t), TableClass::ModelWithStatistic);
        let t = table(rows, None);
        assert_eq!(classify_table(&t), TableClass::TabledResult);
    }

    #[test]
    fn tabled_result() {
        let t = table(
            &[
                &["", "Column A", "Column B"],
                &["Row A", "1", "A"],
                &["Row B", "2", "NA"],
            ],
            None,
        );
        assert_eq!(classify_table(&t), TableClass::TabledResult);
    }

    #[test]
    fn labels() {
        assert_eq!(core_label("3. Extr."), "Extr.");
        assert_eq!(core_label("Variables: Income"), "Income");
        assert_eq!(core_label("1."), "");
        assert!(is_model_stat_label("R^2", false));
        assert!(is_model_stat_label("deltaR^2", false));
        assert!(!is_model_stat_label("deltaF", false));
        assert!(is_model_stat_label("deltaF", true));
        assert!(!is_model_stat_label("Income", true));
        assert_eq!(
            TableClass::parse("tabled result"),
            Some(TableClass::TabledResult)
        );
        assert_eq!(TableClass::parse("nope"), None);
    }
}
