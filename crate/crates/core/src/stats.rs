//! Extraction of statistical standard results from collapsed lines, p-value
//! recomputation and consistency checks.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::Serialize;

use crate::collapse::{table_lines, CollapsedLine, MATRIX_JOIN};
use crate::dist;
use crate::error::{Error, Warning};
use crate::ingest::RawTable;
use crate::legend::LegendCodes;
use crate::matrix::table_to_matrix;
use crate::options::RunOptions;
use crate::scan::{parse_number, parse_operator, split_top_level, Operator};

/// Absolute difference between a reported and a recomputed p-value that is
/// still accepted as rounding noise.
pub const TOLERANCE: f64 = 0.02;

/// Names of the statistics recognized in collapsed text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StatName {
    #[serde(rename = "t")]
    T,
    Z,
    F,
    #[serde(rename = "chi2")]
    Chi2,
    #[serde(rename = "beta")]
    Beta,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "r")]
    R,
    R2,
    U,
    H,
    Q,
    G2,
    #[serde(rename = "d")]
    D,
    #[serde(rename = "eta2")]
    Eta2,
    #[serde(rename = "omega2")]
    Omega2,
    OR,
    RR,
    BF,
}

impl StatName {
    pub fn as_str(self) -> &'static str {
        match self {
            StatName::T => "t",
            StatName::Z => "Z",
            StatName::F => "F",
            StatName::Chi2 => "chi2",
            StatName::Beta => "beta",
            StatName::B => "b",
            StatName::R => "r",
            StatName::R2 => "R2",
            StatName::U => "U",
            StatName::H => "H",
            StatName::Q => "Q",
            StatName::G2 => "G2",
            StatName::D => "d",
            StatName::Eta2 => "eta2",
            StatName::Omega2 => "omega2",
            StatName::OR => "OR",
            StatName::RR => "RR",
            StatName::BF => "BF",
        }
    }

    fn parse(name: &str) -> Option<StatName> {
        Some(match name {
            "t" => StatName::T,
            "Z" | "z" => StatName::Z,
            "F" => StatName::F,
            "chi2" | "Chi2" | "X2" => StatName::Chi2,
            "beta" | "Beta" => StatName::Beta,
            "b" => StatName::B,
            "r" => StatName::R,
            "R2" | "r2" => StatName::R2,
            "U" => StatName::U,
            "H" => StatName::H,
            "Q" => StatName::Q,
            "G2" => StatName::G2,
            "d" => StatName::D,
            "eta2" => StatName::Eta2,
            "omega2" => StatName::Omega2,
            "OR" => StatName::OR,
            "RR" => StatName::RR,
            "BF" | "BF10" | "BF01" => StatName::BF,
            _ => return None,
        })
    }

    /// Test statistics take precedence over effect measures.
    pub fn is_test_statistic(self) -> bool {
        matches!(
            self,
            StatName::T
                | StatName::Z
                | StatName::F
                | StatName::Chi2
                | StatName::R
                | StatName::U
                | StatName::H
                | StatName::Q
                | StatName::G2
        )
    }
}

impl fmt::Display for StatName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorType {
    FalsePositiveP,
    FalseNegativeP,
    FalsePositivePCoding,
    FalseNegativePCoding,
    NumericInconsistencyP,
    NumericInconsistencyPCoding,
}

impl fmt::Display for ErrorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorType::FalsePositiveP => "false positive p",
            ErrorType::FalseNegativeP => "false negative p",
            ErrorType::FalsePositivePCoding => "false positive p coding",
            ErrorType::FalseNegativePCoding => "false negative p coding",
            ErrorType::NumericInconsistencyP => "numeric inconsistency in p",
            ErrorType::NumericInconsistencyPCoding => "numeric inconsistency in p coding",
        })
    }
}

/// One extracted standard result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatRecord {
    pub table_index: usize,
    pub result: String,
    pub stat_name: StatName,
    pub stat_op: Operator,
    pub stat_value: f64,
    pub df1: Option<f64>,
    pub df2: Option<f64>,
    #[serde(rename = "SE")]
    pub se: Option<f64>,
    pub p_op: Option<Operator>,
    pub p: Option<f64>,
    #[serde(rename = "codedP_op")]
    pub coded_p_op: Option<Operator>,
    #[serde(rename = "codedP")]
    pub coded_p: Option<f64>,
    #[serde(rename = "Zest")]
    pub z_est: Option<f64>,
    #[serde(rename = "recalculatedP")]
    pub recalculated_p: Option<f64>,
    #[serde(rename = "deltaP2tailed")]
    pub delta_p2tailed: Option<f64>,
    pub error: Option<bool>,
    #[serde(rename = "errorType")]
    pub error_type: Option<ErrorType>,
    pub alpha4check: f64,
    pub correction_method: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableStats {
    pub table_index: usize,
    pub records: Vec<StatRecord>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StatsReport {
    /// Tables with at least one record, in document order.
    pub tables: Vec<TableStats>,
    pub warnings: Vec<Warning>,
    #[serde(skip)]
    pub errors: Vec<Error>,
    /// Output is meant as one merged list rather than per table.
    pub merged: bool,
}

impl StatsReport {
    /// All records in document order.
    pub fn records(&self) -> Vec<&StatRecord> {
        self.tables.iter().flat_map(|t| t.records.iter()).collect()
    }
}

fn round4(v: f64) -> f64 {
    libm::round(v * 1e4) / 1e4
}

/// Outcome of comparing reported and coded p-values with a recomputed one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOutcome {
    pub error: bool,
    pub error_type: Option<ErrorType>,
}

fn compare(op: Operator, v: f64, recalc: f64, alpha: f64, coded: bool) -> Option<ErrorType> {
    let (fp, fneg, num) = if coded {
        (
            ErrorType::FalsePositivePCoding,
            ErrorType::FalseNegativePCoding,
            ErrorType::NumericInconsistencyPCoding,
        )
    } else {
        (
            ErrorType::FalsePositiveP,
            ErrorType::FalseNegativeP,
            ErrorType::NumericInconsistencyP,
        )
    };
    let sig_recalc = recalc < alpha;
    match op {
        Operator::Eq => {
            let sig = v < alpha;
            if sig && !sig_recalc {
                Some(fp)
            } else if !sig && sig_recalc {
                Some(fneg)
            } else if (recalc - v).abs() > TOLERANCE {
                Some(num)
            } else {
                None
            }
        }
        Operator::Lt | Operator::Le => {
            let ok = if op == Operator::Lt {
                recalc < v
            } else {
                recalc <= v
            };
            if ok {
                None
            } else if v <= alpha && !sig_recalc {
                Some(fp)
            } else if recalc - v > TOLERANCE {
                Some(num)
            } else {
                None
            }
        }
        Operator::Gt | Operator::Ge => {
            let ok = if op == Operator::Gt {
                recalc > v
            } else {
                recalc >= v
            };
            if ok {
                None
            } else if v >= alpha && sig_recalc {
                Some(fneg)
            } else if v - recalc > TOLERANCE {
                Some(num)
            } else {
                None
            }
        }
    }
}

/// Checks a reported p-value and then a coded one against `recalculated`.
/// Decisions are made with `p < alpha`.
pub fn check_p_values(
    reported: Option<(Operator, f64)>,
    coded: Option<(Operator, f64)>,
    recalculated: f64,
    alpha: f64,
) -> Option<CheckOutcome> {
    if reported.is_none() && coded.is_none() {
        return None;
    }
    let found = reported
        .and_then(|(op, v)| compare(op, v, recalculated, alpha, false))
        .or_else(|| coded.and_then(|(op, v)| compare(op, v, recalculated, alpha, true)));
    Some(CheckOutcome {
        error: found.is_some(),
        error_type: found,
    })
}

#[derive(Debug, Clone, PartialEq)]
struct Assignment<'a> {
    name: String,
    paren: Option<&'a str>,
    op: Operator,
    value: f64,
}

fn find_operator(s: &str) -> Option<usize> {
    let join = MATRIX_JOIN.trim();
    let skip = s.rfind(join).map_or(0, |k| k + join.len());
    let mut depth = 0i32;
    for (k, c) in s.char_indices().filter(|&(k, _)| k >= skip) {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            '=' | '<' | '>' | '≤' | '≥' if depth <= 0 => return Some(k),
            _ => {}
        }
    }
    None
}

enum Parsed<'a> {
    None,
    Assignment(Assignment<'a>),
    Malformed(String),
}

fn parse_assignment(piece: &str) -> Parsed<'_> {
    let piece = piece.trim();
    let Some(at) = find_operator(piece) else {
        return Parsed::None;
    };
    let Some((op, len)) = parse_operator(&piece[at..]) else {
        return Parsed::None;
    };
    let mut name_part = piece[..at].trim_end();
    let mut paren = None;
    if name_part.ends_with(')') {
        if let Some(open) = name_part.rfind('(') {
            paren = Some(&name_part[open + 1..name_part.len() - 1]);
            name_part = name_part[..open].trim_end();
        }
    }
    let mut words = name_part.rsplit(|c: char| c.is_whitespace());
    let last = words.next().unwrap_or("");
    let name = match words.next() {
        Some("delta") => format!("delta {last}"),
        Some(w) if last.chars().count() == 1 && is_label_noun(w) => format!("{w} {last}"),
        _ => last.to_string(),
    };
    let known = StatName::parse(&name).is_some()
        || matches!(name.as_str(), "p" | "SE" | "df" | "df1" | "df2");
    let value_str = piece[at + len..].trim_start();
    match parse_number(value_str) {
        Some(tok) => Parsed::Assignment(Assignment {
            name,
            paren,
            op,
            value: tok.value,
        }),
        None if known => Parsed::Malformed(piece.to_string()),
        None => Parsed::None,
    }
}

const LABEL_NOUNS: &[&str] = &[
    "column",
    "row",
    "factor",
    "group",
    "model",
    "condition",
    "study",
    "variable",
    "item",
    "type",
    "scale",
    "wave",
    "sample",
    "part",
    "section",
    "class",
    "level",
    "block",
    "step",
    "phase",
    "trial",
    "set",
    "version",
    "panel",
    "table",
    "figure",
];

fn is_label_noun(word: &str) -> bool {
    let w = word.trim_end_matches(':').to_lowercase();
    LABEL_NOUNS.contains(&w.as_str())
}

fn paren_numbers(s: &str) -> Vec<f64> {
    s.split(',')
        .filter_map(|p| {
            let p = p.trim();
            if p.contains('=') {
                None
            } else {
                parse_number(p).map(|t| t.value)
            }
        })
        .collect()
}

fn token_stat(token: &str) -> Option<StatName> {
    let main = token.split(";;").next()?;
    match parse_assignment(main) {
        Parsed::Assignment(a) => StatName::parse(&a.name).filter(|n| n.is_test_statistic()),
        _ => None,
    }
}

fn starts_group(token: &str) -> bool {
    let t = token.trim();
    if t.contains(MATRIX_JOIN.trim()) || t.starts_with("b=") || t.contains(" b=") {
        return true;
    }
    match (t.find(": "), t.find('=')) {
        (Some(c), Some(e)) => c < e && !t[c + 2..e].trim().is_empty(),
        _ => false,
    }
}

/// Splits a collapsed line into one fragment per result. Leading tokens
/// without an assignment are kept as context in front of every fragment.
pub fn split_sticked(line: &str) -> Vec<String> {
    let tokens = split_top_level(line);
    let ctx_len = tokens
        .iter()
        .take_while(|t| !t.contains(['=', '<', '>']))
        .count();
    let context = tokens[..ctx_len].join(", ");
    let mut groups: Vec<Vec<&str>> = Vec::new();
    let mut has_test: Vec<bool> = Vec::new();
    for tok in &tokens[ctx_len..] {
        let stat = token_stat(tok);
        let new = match groups.last() {
            None => true,
            Some(_) => {
                starts_group(tok) || (stat.is_some() && has_test.last().copied().unwrap_or(false))
            }
        };
        if new {
            groups.push(Vec::new());
            has_test.push(false);
        }
        if let Some(g) = groups.last_mut() {
            g.push(tok);
        }
        if stat.is_some() {
            if let Some(h) = has_test.last_mut() {
                *h = true;
            }
        }
    }
    if groups.is_empty() {
        return if context.is_empty() {
            Vec::new()
        } else {
            alloc::vec![context]
        };
    }
    groups
        .into_iter()
        .map(|g| {
            let body = g.join(", ");
            if context.is_empty() {
                body
            } else {
                format!("{context}, {body}")
            }
        })
        .collect()
}

/// Parses one fragment into a record. `Ok(None)` if the fragment holds no
/// standard result, `Err` with the offending text if a known statistic has
/// no readable number.
pub fn parse_standard_stats(
    fragment: &str,
    opts: &RunOptions,
    alpha: f64,
) -> Result<Option<StatRecord>, String> {
    let mut assignments: Vec<(Assignment<'_>, bool)> = Vec::new();
    for part in split_top_level(fragment) {
        for (k, piece) in part.split(";;").enumerate() {
            match parse_assignment(piece) {
                Parsed::Assignment(a) => assignments.push((a, k > 0)),
                Parsed::Malformed(s) => return Err(s),
                Parsed::None => {}
            }
        }
    }
    let named: Vec<(StatName, &Assignment<'_>)> = assignments
        .iter()
        .filter(|(_, coded)| !coded)
        .filter_map(|(a, _)| StatName::parse(&a.name).map(|n| (n, a)))
        .collect();
    let primary = named
        .iter()
        .find(|(n, _)| n.is_test_statistic())
        .or_else(|| named.first())
        .copied();
    let Some((name, stat)) = primary else {
        return Ok(None);
    };
    let find = |key: &str, coded: bool| {
        assignments
            .iter()
            .find(|(a, c)| a.name == key && *c == coded)
            .map(|(a, _)| a)
    };
    let mut rec = StatRecord {
        table_index: 0,
        result: fragment.to_string(),
        stat_name: name,
        stat_op: stat.op,
        stat_value: stat.value,
        df1: find("df1", false).map(|a| a.value),
        df2: find("df2", false).map(|a| a.value),
        se: find("SE", false).map(|a| a.value),
        p_op: None,
        p: None,
        coded_p_op: None,
        coded_p: None,
        z_est: None,
        recalculated_p: None,
        delta_p2tailed: None,
        error: None,
        error_type: None,
        alpha4check: alpha,
        correction_method: None,
    };
    if let Some(p) = find("p", false) {
        rec.p_op = Some(p.op);
        rec.p = Some(p.value);
    }
    if let Some(p) = find("p", true) {
        rec.coded_p_op = Some(p.op);
        rec.coded_p = Some(p.value);
    }
    let generic_df = find("df", false).map(|a| a.value);
    let nums = stat.paren.map(paren_numbers).unwrap_or_default();
    match name {
        StatName::T | StatName::R => {
            rec.df2 = nums.first().copied().or(rec.df2).or(generic_df);
        }
        StatName::Chi2 => {
            rec.df1 = nums.first().copied().or(rec.df1).or(generic_df);
        }
        StatName::F if nums.len() >= 2 => {
            rec.df1 = Some(nums[0]);
            rec.df2 = Some(nums[1]);
        }
        _ => {}
    }
    if opts.estimate_z && stat.op == Operator::Eq {
        match name {
            StatName::B | StatName::Beta | StatName::D if rec.se.is_some_and(|s| s > 0.0) => {
                rec.z_est = rec.se.map(|se| stat.value / se);
            }
            StatName::T if rec.df2.is_none() => rec.z_est = Some(stat.value),
            _ => {}
        }
    }
    rec.recalculated_p = recalculate(&rec, opts).map(round4);
    rec.z_est = rec.z_est.map(round4);
    if let Some(recalc) = rec.recalculated_p {
        let compared = rec.p.or(rec.coded_p);
        rec.delta_p2tailed = compared.map(|c| round4(recalc - c));
        if opts.check_p {
            let outcome = check_p_values(
                rec.p_op.zip(rec.p),
                rec.coded_p_op.zip(rec.coded_p),
                recalc,
                alpha,
            );
            if let Some(o) = outcome {
                rec.error = Some(o.error);
                rec.error_type = o.error_type;
            }
        }
    }
    Ok(Some(rec))
}

fn recalculate(rec: &StatRecord, opts: &RunOptions) -> Option<f64> {
    if rec.stat_op != Operator::Eq {
        return None;
    }
    let v = rec.stat_value;
    let alt = opts.alternative;
    let direct = match rec.stat_name {
        StatName::T => rec.df2.and_then(|df| dist::p_t(v, df, alt)),
        StatName::Z => dist::p_z(v, alt),
        StatName::F => match (rec.df1, rec.df2) {
            (Some(a), Some(b)) => dist::p_f(v, a, b),
            _ => None,
        },
        StatName::Chi2 => rec.df1.and_then(|df| dist::p_chi2(v, df)),
        StatName::R => rec.df2.and_then(|df| dist::p_r(v, df, alt)),
        _ => None,
    };
    direct.or_else(|| rec.z_est.and_then(|z| dist::p_z(z, alt)))
}

/// Extracts records from the collapsed lines of one table.
pub fn lines_to_stats(
    lines: &[CollapsedLine],
    legend: &LegendCodes,
    opts: &RunOptions,
    warnings: &mut Vec<Warning>,
) -> Vec<StatRecord> {
    let alpha = opts.alpha.unwrap_or(legend.alpha_level);
    let correction = if legend.correction_methods.is_empty() {
        None
    } else {
        Some(legend.correction_methods.join(", "))
    };
    let mut out = Vec::new();
    let mut corrected = None;
    for line in lines {
        for fragment in split_sticked(&line.text) {
            match parse_standard_stats(&fragment, opts, alpha) {
                Ok(Some(mut rec)) => {
                    rec.table_index = line.table_index;
                    if rec.error.is_some() {
                        rec.correction_method = correction.clone();
                        if correction.is_some() {
                            corrected = Some(line.table_index);
                        }
                    }
                    out.push(rec);
                }
                Ok(None) => {}
                Err(bad) => warnings.push(Warning::new(
                    line.table_index,
                    format!("unreadable number in result skipped: {bad}"),
                )),
            }
        }
    }
    if let (Some(idx), Some(c)) = (corrected, &correction) {
        warnings.push(Warning::new(
            idx,
            format!("correction for multiple testing ({c}) detected; p-values were checked against the uncorrected alpha level"),
        ));
    }
    out
}

/// Builds, collapses and scans every table for standard results.
pub fn table_to_stats(tables: &[RawTable], opts: &RunOptions) -> StatsReport {
    let mut report = StatsReport {
        merged: opts.collapse,
        ..StatsReport::default()
    };
    for raw in tables {
        match table_to_matrix(raw, opts) {
            Ok(m) => {
                let (lines, legend) = table_lines(&m, opts, &mut report.warnings);
                let records = lines_to_stats(&lines, &legend, opts, &mut report.warnings);
                if !records.is_empty() {
                    report.tables.push(TableStats {
                        table_index: m.index,
                        records,
                    });
                }
            }
            Err(e) => report.errors.push(e),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> RunOptions {
        RunOptions {
            check_p: true,
            estimate_z: true,
            ..RunOptions::stats_defaults()
        }
    }

    #[test]
    fn split_model_line() {
        let f = split_sticked("Variables: Income, M1 b=-0.26, SE=0.16, M2 b=-0.39, SE=0.21");
        assert_eq!(
            f,
            vec![
                "Variables: Income, M1 b=-0.26, SE=0.16",
                "Variables: Income, M2 b=-0.39, SE=0.21"
            ]
        );
        let f = split_sticked("M1: R2=0.07, delta F=2.16;; p>0.05, M2: R2=0.22");
        assert_eq!(f, vec!["M1: R2=0.07, delta F=2.16;; p>0.05", "M2: R2=0.22"]);
        let f = split_sticked("Study: A, t=2.1, p=0.04, t=3.2, p=0.001");
        assert_eq!(f.len(), 2);
        assert!(split_sticked("Row A: Column A=1").len() == 1);
    }

    #[test]
    fn anova_record() {
        let r = parse_standard_stats(
            "Variable: Factor A, SSq=12, df1=2, df2=30, MSq=6, F=9.09, p=0.00;; p<0.01",
            &opts(),
            0.05,
        )
        .unwrap()
        .unwrap();
        assert_eq!(r.stat_name, StatName::F);
        assert_eq!((r.df1, r.df2), (Some(2.0), Some(30.0)));
        assert_eq!(r.recalculated_p, Some(0.0008));
        assert_eq!(r.delta_p2tailed, Some(0.0008));
        assert_eq!(r.error, Some(false));
        assert_eq!(r.coded_p_op, Some(Operator::Lt));
    }

    #[test]
    fn correlation_record() {
        let r = parse_standard_stats("Age <<~>> Income: r(123)=0.38;; p<0.01", &opts(), 0.05)
            .unwrap()
            .unwrap();
        assert_eq!(r.df2, Some(123.0));
        assert_eq!(r.recalculated_p, Some(0.0));
        assert_eq!(r.delta_p2tailed, Some(-0.01));
        let one = parse_standard_stats("Age <<~>> Age: r(123)=1", &opts(), 0.05)
            .unwrap()
            .unwrap();
        assert_eq!(one.recalculated_p, None);
        assert_eq!(one.error, None);
    }

    #[test]
    fn z_estimate() {
        let r = parse_standard_stats("X, M2 b=0.12;; p=0.075, SE=0.6", &opts(), 0.05)
            .unwrap()
            .unwrap();
        assert_eq!(r.z_est, Some(0.2));
        assert_eq!(r.recalculated_p, Some(0.8415));
        assert_eq!(r.error_type, Some(ErrorType::NumericInconsistencyPCoding));
        assert_eq!(r.delta_p2tailed, Some(0.7665));
    }

    #[test]
    fn decisions() {
        let c = |op, v, recalc| {
            check_p_values(Some((op, v)), None, recalc, 0.05)
                .unwrap()
                .error_type
        };
        assert_eq!(
            c(Operator::Eq, 0.0501, 0.0499),
            Some(ErrorType::FalseNegativeP)
        );
        assert_eq!(c(Operator::Eq, 0.01, 0.06), Some(ErrorType::FalsePositiveP));
        assert_eq!(
            c(Operator::Eq, 0.01, 0.04),
            Some(ErrorType::NumericInconsistencyP)
        );
        assert_eq!(c(Operator::Eq, 0.01, 0.025), None);
        assert_eq!(c(Operator::Lt, 0.05, 0.03), None);
        assert_eq!(
            c(Operator::Lt, 0.01, 0.0719),
            Some(ErrorType::FalsePositiveP)
        );
        assert_eq!(c(Operator::Gt, 0.05, 0.2), None);
        assert_eq!(c(Operator::Gt, 0.05, 0.01), Some(ErrorType::FalseNegativeP));
    }

    #[test]
    fn malformed_number() {
        assert!(parse_standard_stats("x, t=abc", &opts(), 0.05).is_err());
        assert_eq!(
            parse_standard_stats("Mean Income=1345, SD=250", &opts(), 0.05),
            Ok(None)
        );
        assert_eq!(
            parse_standard_stats("M1: delta R2=0.07", &opts(), 0.05),
            Ok(None)
        );
    }
}
