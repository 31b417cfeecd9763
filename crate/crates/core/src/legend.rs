//! Mining captions and footnotes for p-value codings, abbreviations,
//! superscript labels, bracket meanings, sample sizes, alpha levels and
//! multiple-testing corrections.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::Serialize;

use crate::scan::{is_code_char, parse_number, parse_operator, Operator};

/// What a p-value code is attached to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeToken {
    /// A printed symbol run such as `*`, `**`, `+` or `a`.
    Sign(String),
    Bold,
    Italic,
}

/// The p-value range a code stands for.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PCode {
    pub op: Operator,
    pub threshold: f64,
    /// The threshold as printed, e.g. `.05`.
    pub literal: String,
}

impl PCode {
    pub fn new(op: Operator, literal: &str) -> Option<PCode> {
        let threshold = parse_number(literal)?.value;
        (threshold > 0.0 && threshold < 1.0).then(|| PCode {
            op,
            threshold,
            literal: literal.to_string(),
        })
    }
}

/// Meaning of numbers printed in brackets next to a value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketMeaning {
    SD,
    SE,
    AlphaCoefficient,
    CI,
    SqrtAve,
    Percent,
    HeaderNamed(String),
}

impl BracketMeaning {
    /// Statistic name used when the bracket content is written out.
    pub fn label(&self) -> &str {
        match self {
            BracketMeaning::SD => "SD",
            BracketMeaning::SE => "SE",
            BracketMeaning::AlphaCoefficient => "alpha",
            BracketMeaning::CI => "CI",
            BracketMeaning::SqrtAve => "sqrtAVE",
            BracketMeaning::Percent => "%",
            BracketMeaning::HeaderNamed(n) => n,
        }
    }
}

/// What non-1 values on a correlation diagonal report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalMeaning {
    Alpha,
    SqrtAve,
}

impl DiagonalMeaning {
    pub fn label(self) -> &'static str {
        match self {
            DiagonalMeaning::Alpha => "alpha",
            DiagonalMeaning::SqrtAve => "sqrtAVE",
        }
    }
}

/// Everything decoded from one table's caption and footnote.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegendCodes {
    pub p_codes: Vec<(CodeToken, PCode)>,
    pub abbreviations: Vec<(String, String)>,
    pub superscript_labels: Vec<(String, String)>,
    pub bracket_meaning: Option<BracketMeaning>,
    pub diagonal_meaning: Option<DiagonalMeaning>,
    pub sample_size: Option<u64>,
    pub alpha_level: f64,
    pub correction_methods: Vec<String>,
}

impl Default for LegendCodes {
    fn default() -> Self {
        LegendCodes {
            p_codes: Vec::new(),
            abbreviations: Vec::new(),
            superscript_labels: Vec::new(),
            bracket_meaning: None,
            diagonal_meaning: None,
            sample_size: None,
            alpha_level: 0.05,
            correction_methods: Vec::new(),
        }
    }
}

impl LegendCodes {
    pub fn p_code(&self, token: &CodeToken) -> Option<&PCode> {
        self.p_codes
            .iter()
            .find(|(t, _)| t == token)
            .map(|(_, c)| c)
    }

    /// Sign codes, longest first so that `**` wins over `*`.
    pub fn sign_codes(&self) -> Vec<(&str, &PCode)> {
        let mut v: Vec<(&str, &PCode)> = self
            .p_codes
            .iter()
            .filter_map(|(t, c)| match t {
                CodeToken::Sign(s) => Some((s.as_str(), c)),
                _ => None,
            })
            .collect();
        v.sort_by_key(|a| core::cmp::Reverse(a.0.chars().count()));
        v
    }

    pub fn has_style_codes(&self) -> bool {
        self.p_codes
            .iter()
            .any(|(t, _)| matches!(t, CodeToken::Bold | CodeToken::Italic))
    }

    /// Largest `<`/`<=` threshold, the level below which a coded result
    /// counts as significant.
    pub fn max_significance_threshold(&self) -> Option<f64> {
        self.p_codes
            .iter()
            .filter(|(_, c)| matches!(c.op, Operator::Lt | Operator::Le))
            .map(|(_, c)| c.threshold)
            .fold(None, |m, v| Some(m.map_or(v, |m: f64| m.max(v))))
    }

    /// Adds the conventional `*`/`**`/`***` scheme when no code was found.
    pub fn apply_standard_coding(&mut self) {
        if !self.p_codes.is_empty() {
            return;
        }
        for (sign, lit) in [("*", ".05"), ("**", ".01"), ("***", ".001")] {
            if let Some(c) = PCode::new(Operator::Lt, lit) {
                self.p_codes.push((CodeToken::Sign(sign.into()), c));
            }
        }
    }
}

/// Decodes caption and footnote into [`LegendCodes`].
pub fn parse_legend_codings(caption: &str, footnote: &str) -> LegendCodes {
    let text = if caption.is_empty() {
        String::from(footnote)
    } else if footnote.is_empty() {
        String::from(caption)
    } else {
        alloc::format!("{caption}\n{footnote}")
    };
    let mut codes = LegendCodes::default();
    if text.trim().is_empty() {
        return codes;
    }
    for (token, code) in sign_codes(&text) {
        if codes.p_code(&token).is_none() {
            codes.p_codes.push((token, code));
        }
    }
    for (token, code) in style_codes(&text) {
        if codes.p_code(&token).is_none() {
            codes.p_codes.push((token, code));
        }
    }
    codes.abbreviations = abbreviations(&text);
    codes.superscript_labels = superscript_labels(footnote, &codes);
    codes.bracket_meaning = bracket_meaning(&text);
    codes.diagonal_meaning = diagonal_meaning(&text);
    codes.sample_size = extract_sample_size(caption, footnote);
    codes.alpha_level = explicit_alpha(&text)
        .or_else(|| codes.max_significance_threshold())
        .unwrap_or(0.05);
    codes.correction_methods = detect_correction_method(&text);
    codes
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Reads `p <op> number` at the start of `s` (after optional spaces), giving
/// the code and the consumed length.
fn p_threshold(s: &str) -> Option<(PCode, usize)> {
    let rest = s.trim_start().strip_prefix(['p', 'P'])?;
    if rest.chars().next().is_some_and(is_word_char) {
        return None;
    }
    let after_p = rest.trim_start();
    let (op, n) = parse_operator(after_p)?;
    let num_src = after_p[n..].trim_start();
    let tok = parse_number(num_src)?;
    let code = PCode::new(op, tok.literal)?;
    Some((code, s.len() - num_src.len() + tok.end))
}

fn sign_codes(text: &str) -> Vec<(CodeToken, PCode)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];
        let c = rest.chars().next().unwrap_or(' ');
        let prev = text[..i].chars().next_back();
        let hat = c == '^';
        let body = if hat { &rest[1..] } else { rest };
        let first = body.chars().next();
        let token_len = match first {
            Some(f) if is_code_char(f) => body
                .char_indices()
                .take_while(|(_, ch)| *ch == f)
                .map(|(k, ch)| k + ch.len_utf8())
                .last()
                .unwrap_or(0),
            Some(f) if hat && f.is_ascii_alphanumeric() => body
                .char_indices()
                .take_while(|(_, ch)| ch.is_ascii_alphanumeric())
                .map(|(k, ch)| k + ch.len_utf8())
                .last()
                .unwrap_or(0),
            _ => 0,
        };
        let boundary =
            hat || prev.is_none_or(|p| !is_code_char(p) && (p.is_whitespace() || !is_word_char(p)));
        if token_len > 0 && boundary && token_len <= 4 {
            let token = &body[..token_len];
            let after = &body[token_len..];
            if let Some((code, used)) = p_threshold(after) {
                out.push((CodeToken::Sign(token.to_string()), code));
                i += (rest.len() - after.len()) + used;
                continue;
            }
        }
        i += c.len_utf8();
    }
    out
}

/// Splits legend text into clauses at line breaks, semicolons and sentence
/// ends.
fn clauses(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    for line in text.split(['\n', ';']) {
        let mut start = 0;
        let b = line.as_bytes();
        for k in 0..b.len() {
            if b[k] == b'.' && k + 1 < b.len() && b[k + 1] == b' ' {
                let next = line[k + 2..].chars().next();
                if next.is_some_and(|c| c.is_uppercase()) {
                    out.push(line[start..=k].trim());
                    start = k + 2;
                }
            }
        }
        out.push(line[start..].trim());
    }
    out.retain(|s| !s.is_empty());
    out
}

fn find_p_threshold(clause: &str) -> Option<PCode> {
    let mut idx = 0;
    while let Some(pos) = clause[idx..].find(['p', 'P']) {
        let at = idx + pos;
        let prev = clause[..at].chars().next_back();
        if prev.is_none_or(|c| !is_word_char(c)) {
            if let Some((code, _)) = p_threshold(&clause[at..]) {
                return Some(code);
            }
        }
        idx = at + 1;
    }
    None
}

fn style_codes(text: &str) -> Vec<(CodeToken, PCode)> {
    let mut out = Vec::new();
    for clause in clauses(text) {
        let lower = clause.to_lowercase();
        let bold = lower.contains("bold");
        let italic = lower.contains("italic");
        if !bold && !italic {
            continue;
        }
        let code = find_p_threshold(clause).or_else(|| {
            lower
                .contains("signific")
                .then(|| PCode::new(Operator::Lt, ".05"))
                .flatten()
        });
        if let Some(code) = code {
            if bold {
                out.push((CodeToken::Bold, code.clone()));
            }
            if italic {
                out.push((CodeToken::Italic, code));
            }
        }
    }
    out
}

const NOT_ABBREVIATIONS: &[&str] = &[
    "note",
    "notes",
    "source",
    "sources",
    "abbreviations",
    "abbreviation",
    "legend",
    "table",
];

fn valid_key(key: &str) -> bool {
    let k = key.trim();
    k.chars().count() >= 2
        && k.chars().count() <= 20
        && k.split_whitespace().count() <= 3
        && k.chars().any(|c| c.is_alphabetic())
        && !k.contains(['<', '>', '=', '*'])
        && !NOT_ABBREVIATIONS.contains(&k.trim_end_matches('.').to_lowercase().as_str())
}

fn valid_long(long: &str) -> bool {
    let l = long.trim();
    !l.is_empty() && !l.contains(['=', '<', '>']) && l.chars().any(|c| c.is_alphabetic())
}

fn push_abbreviation(out: &mut Vec<(String, String)>, key: &str, long: &str) {
    let key = key.trim();
    let long = long.trim().trim_end_matches(['.', ',']).trim();
    if valid_key(key) && valid_long(long) && key != long && !out.iter().any(|(k, _)| k == key) {
        out.push((key.to_string(), long.to_string()));
    }
}

fn abbreviations(text: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for line in text.split(['\n', ';']) {
        for seg in crate::scan::split_top_level(line) {
            let seg = seg.trim();
            if seg.is_empty() {
                continue;
            }
            // KEY: long / KEY = long
            let split = seg
                .find(": ")
                .map(|i| (i, 2))
                .or_else(|| seg.find(" = ").map(|i| (i, 3)))
                .or_else(|| {
                    seg.find('=')
                        .filter(|&i| i > 0 && !seg[..i].ends_with(['<', '>']))
                        .map(|i| (i, 1))
                });
            if let Some((i, w)) = split {
                let key = &seg[..i];
                let long = &seg[i + w..];
                if !long
                    .trim_start()
                    .starts_with(|c: char| c.is_ascii_digit() || c == '.')
                {
                    push_abbreviation(&mut out, key, long);
                }
                continue;
            }
            // Extr. Extraversion / Extr., Extraversion
            if let Some(dot) = seg.find('.') {
                let key = &seg[..=dot];
                let long = seg[dot + 1..].trim_start_matches([',', ' ']);
                let stem = key.trim_end_matches('.').to_lowercase();
                if !key.contains(' ')
                    && stem.chars().count() >= 2
                    && long.to_lowercase().starts_with(&stem)
                    && long.len() > stem.len()
                {
                    push_abbreviation(&mut out, key, long);
                }
            }
        }
        // Long Form (LF)
        let mut idx = 0;
        while let Some(open) = line[idx..].find('(') {
            let open = idx + open;
            let Some(close) = line[open..].find(')').map(|c| open + c) else {
                break;
            };
            let inner = &line[open + 1..close];
            let acronym = inner.chars().count() >= 2
                && inner.chars().count() <= 8
                && inner
                    .chars()
                    .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit())
                && inner.chars().any(|c| c.is_ascii_uppercase());
            if acronym {
                let letters: Vec<char> = inner.chars().filter(|c| c.is_ascii_uppercase()).collect();
                let words: Vec<&str> = line[..open].split_whitespace().collect();
                if words.len() >= letters.len() {
                    let cand = &words[words.len() - letters.len()..];
                    let matches = cand.iter().zip(&letters).all(|(w, l)| {
                        w.chars()
                            .next()
                            .is_some_and(|c| c.to_ascii_uppercase() == *l)
                    });
                    if matches {
                        push_abbreviation(&mut out, inner, &cand.join(" "));
                    }
                }
            }
            idx = close + 1;
        }
    }
    out
}

fn superscript_labels(footnote: &str, codes: &LegendCodes) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    for line in footnote.split(['\n', ';']) {
        let seg = line.trim();
        let (token, rest) = if let Some(r) = seg.strip_prefix('^') {
            let n = r
                .char_indices()
                .take_while(|(_, c)| c.is_alphanumeric() || is_code_char(*c))
                .map(|(k, c)| k + c.len_utf8())
                .last()
                .unwrap_or(0);
            (&r[..n], &r[n..])
        } else {
            let mut it = seg.chars();
            match (it.next(), it.next()) {
                (Some(c), Some(' ')) if c.is_ascii_lowercase() || c.is_ascii_digit() => {
                    (&seg[..1], &seg[1..])
                }
                _ => continue,
            }
        };
        if token.is_empty() {
            continue;
        }
        let label = rest.trim().trim_start_matches(['=', ':']).trim();
        let label = label.trim_end_matches('.').trim();
        let is_code = codes.p_code(&CodeToken::Sign(token.to_string())).is_some()
            || p_threshold(rest).is_some();
        if label.is_empty() || is_code || out.iter().any(|(k, _)| k == token) {
            continue;
        }
        out.push((token.to_string(), label.to_string()));
    }
    out
}

fn has_word(text: &str, word: &str) -> bool {
    let mut idx = 0;
    while let Some(pos) = text[idx..].find(word) {
        let at = idx + pos;
        let before = text[..at].chars().next_back();
        let after = text[at + word.len()..].chars().next();
        if before.is_none_or(|c| !c.is_alphanumeric()) && after.is_none_or(|c| !c.is_alphanumeric())
        {
            return true;
        }
        idx = at + word.len();
    }
    false
}

fn bracket_meaning(text: &str) -> Option<BracketMeaning> {
    for clause in clauses(text) {
        let lower = clause.to_lowercase();
        if !(lower.contains("bracket") || lower.contains("parenthes")) {
            continue;
        }
        let meaning = if lower.contains("standard deviation") || has_word(clause, "SD") {
            BracketMeaning::SD
        } else if lower.contains("standard error") || has_word(clause, "SE") {
            BracketMeaning::SE
        } else if lower.contains("confidence interval") || has_word(clause, "CI") {
            BracketMeaning::CI
        } else if lower.contains("average variance") || has_word(clause, "AVE") {
            BracketMeaning::SqrtAve
        } else if lower.contains("alpha") || lower.contains("reliab") || lower.contains("cronbach")
        {
            BracketMeaning::AlphaCoefficient
        } else if lower.contains("percent") || clause.contains('%') {
            BracketMeaning::Percent
        } else {
            continue;
        };
        return Some(meaning);
    }
    None
}

fn diagonal_meaning(text: &str) -> Option<DiagonalMeaning> {
    let lower = text.to_lowercase();
    if lower.contains("average variance") || has_word(text, "AVE") || lower.contains("sqrtave") {
        Some(DiagonalMeaning::SqrtAve)
    } else if lower.contains("alpha") || lower.contains("reliab") || lower.contains("cronbach") {
        Some(DiagonalMeaning::Alpha)
    } else {
        None
    }
}

/// Sample size stated as `N=125`, `N: 80` or `N 1,250`.
pub fn extract_sample_size(caption: &str, footnote: &str) -> Option<u64> {
    for text in [caption, footnote] {
        let b = text.as_bytes();
        for (i, &c) in b.iter().enumerate() {
            if c != b'N' {
                continue;
            }
            if i > 0 && (b[i - 1] as char).is_ascii_alphanumeric() {
                continue;
            }
            let mut j = i + 1;
            let mut sep = false;
            while j < b.len() && b[j] == b' ' {
                j += 1;
                sep = true;
            }
            if j < b.len() && (b[j] == b'=' || b[j] == b':') {
                j += 1;
                sep = true;
                while j < b.len() && b[j] == b' ' {
                    j += 1;
                }
            }
            if !sep || j >= b.len() || !b[j].is_ascii_digit() {
                continue;
            }
            let mut digits = String::new();
            while j < b.len() && (b[j].is_ascii_digit() || b[j] == b',') {
                if b[j] == b',' {
                    let grouped =
                        j + 3 < b.len() && b[j + 1..j + 4].iter().all(|d| d.is_ascii_digit());
                    if !grouped {
                        break;
                    }
                } else {
                    digits.push(b[j] as char);
                }
                j += 1;
            }
            if let Ok(n) = digits.parse() {
                return Some(n);
            }
        }
    }
    None
}

fn explicit_alpha(text: &str) -> Option<f64> {
    let lower = text.to_lowercase();
    let keys = [
        "alpha level",
        "alpha",
        "significance level",
        "level of significance",
        "α",
    ];
    for key in keys {
        let mut idx = 0;
        while let Some(pos) = lower[idx..].find(key) {
            let at = idx + pos;
            idx = at + key.len();
            let before = &lower[..at];
            if before.trim_end().ends_with("cronbach's") || before.trim_end().ends_with("cronbach")
            {
                continue;
            }
            let window: String = lower[idx..].chars().take(30).collect();
            let Some(start) = window.find(|c: char| c.is_ascii_digit() || c == '.') else {
                continue;
            };
            let Some(tok) = parse_number(&window[start..]) else {
                continue;
            };
            let percent = window[start + tok.end..].trim_start().starts_with('%');
            let v = if percent {
                tok.value / 100.0
            } else {
                tok.value
            };
            if v > 0.0 && v <= 0.2 {
                return Some(v);
            }
        }
    }
    None
}

/// The alpha level stated in `footnote`, else the largest coded
/// significance threshold, else 0.05.
pub fn detect_alpha_level(footnote: &str) -> f64 {
    if let Some(a) = explicit_alpha(footnote) {
        return a;
    }
    let codes = parse_legend_codings("", footnote);
    codes.max_significance_threshold().unwrap_or(0.05)
}

/// Names of multiple-testing corrections in order of first mention.
pub fn detect_correction_method(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    let patterns: &[(&str, &str)] = &[
        ("bonferroni", "Bonferroni"),
        ("holm", "Holm"),
        ("šidák", "Šidák"),
        ("sidák", "Šidák"),
        ("šidak", "Šidák"),
        ("sidak", "Šidák"),
        ("tukey", "Tukey"),
        ("scheffé", "Scheffé"),
        ("scheffe", "Scheffé"),
        ("benjamini", "Benjamini-Hochberg"),
        ("hochberg", "Benjamini-Hochberg"),
        ("false discovery rate", "FDR"),
        ("fdr", "FDR"),
    ];
    let mut hits: Vec<(usize, &str)> = Vec::new();
    for (pat, name) in patterns {
        let mut idx = 0;
        while let Some(pos) = lower[idx..].find(pat) {
            let at = idx + pos;
            idx = at + pat.len();
            let before = lower[..at].chars().next_back();
            let after = lower[idx..].chars().next();
            let bounded = before.is_none_or(|c| !c.is_alphabetic())
                && after.is_none_or(|c| !c.is_alphabetic());
            if bounded {
                hits.push((at, name));
                break;
            }
        }
    }
    hits.sort_by_key(|h| h.0);
    let mut out: Vec<String> = Vec::new();
    for (_, name) in hits {
        if !out.iter().any(|n| n == name) {
            out.push(name.to_string());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(c: &LegendCodes, t: &str) -> (Operator, f64) {
        let p = c.p_code(&CodeToken::Sign(t.into())).unwrap();
        (p.op, p.threshold)
    }

    #[test]
    fn asterisks_and_sample_size() {
        let c = parse_legend_codings("", "N=125, * p<.05, ** p<.01");
        assert_eq!(c.p_codes.len(), 2);
        assert_eq!(code(&c, "*"), (Operator::Lt, 0.05));
        assert_eq!(code(&c, "**"), (Operator::Lt, 0.01));
        assert_eq!(c.sample_size, Some(125));
        assert_eq!(c.alpha_level, 0.05);
    }

    #[test]
    fn equality_code() {
        let c = parse_legend_codings("", "+ p=.075; * p<.05; ** p<.01; *** p<.001");
        assert_eq!(c.p_codes.len(), 4);
        assert_eq!(code(&c, "+"), (Operator::Eq, 0.075));
        assert_eq!(code(&c, "***"), (Operator::Lt, 0.001));
        assert_eq!(c.alpha_level, 0.05);
        let hat = parse_legend_codings("", "^+ p=.075; ^* p<.05");
        assert_eq!(code(&hat, "+"), (Operator::Eq, 0.075));
        assert_eq!(code(&hat, "*"), (Operator::Lt, 0.05));
    }

    #[test]
    fn style_codes_detected() {
        let c = parse_legend_codings(
            "",
            "Italic values are p<.05.\nBold valus indicate significance with p<.01.",
        );
        let bold = c.p_code(&CodeToken::Bold).unwrap();
        let italic = c.p_code(&CodeToken::Italic).unwrap();
        assert_eq!((bold.op, bold.threshold), (Operator::Lt, 0.01));
        assert_eq!((italic.op, italic.threshold), (Operator::Lt, 0.05));
        assert!(c.sign_codes().is_empty());
    }

    #[test]
    fn abbreviation_forms() {
        let c = parse_legend_codings("", "Extr.: Extraversion");
        assert_eq!(
            c.abbreviations,
            vec![("Extr.".into(), "Extraversion".into())]
        );
        let c = parse_legend_codings("", "Inc. Income; SES = socioeconomic status");
        assert!(c.abbreviations.contains(&("Inc.".into(), "Income".into())));
        assert!(c
            .abbreviations
            .contains(&("SES".into(), "socioeconomic status".into())));
        let c = parse_legend_codings("", "We used the Big Five Inventory (BFI).");
        assert_eq!(
            c.abbreviations,
            vec![("BFI".into(), "Big Five Inventory".into())]
        );
        let c = parse_legend_codings("", "Note: values rounded. N=12, M = 3");
        assert!(c.abbreviations.is_empty());
    }

    #[test]
    fn bracket_meanings() {
        let m = |s: &str| parse_legend_codings("", s).bracket_meaning;
        assert_eq!(
            m("Numbers in brackets represent standard deviations."),
            Some(BracketMeaning::SD)
        );
        assert_eq!(
            m("Numbers in brackets represent standard errors."),
            Some(BracketMeaning::SE)
        );
        assert_eq!(m("95% CI in parentheses"), Some(BracketMeaning::CI));
        assert_eq!(
            m("Cronbach's alpha in brackets"),
            Some(BracketMeaning::AlphaCoefficient)
        );
        assert_eq!(m("no hint"), None);
    }

    #[test]
    fn superscript_label_definitions() {
        let c = parse_legend_codings("", "a subsample A\n* p<.05");
        assert_eq!(
            c.superscript_labels,
            vec![("a".into(), "subsample A".into())]
        );
        let c = parse_legend_codings("", "^b adjusted for age");
        assert_eq!(
            c.superscript_labels,
            vec![("b".into(), "adjusted for age".into())]
        );
        let c = parse_legend_codings("", "^a p<.05");
        assert!(c.superscript_labels.is_empty());
        assert_eq!(code(&c, "a"), (Operator::Lt, 0.05));
    }

    #[test]
    fn alpha_levels() {
        assert_eq!(detect_alpha_level("significance level of 1%"), 0.01);
        assert_eq!(detect_alpha_level(""), 0.05);
        assert_eq!(detect_alpha_level("* p<.05, ** p<.01"), 0.05);
        assert_eq!(detect_alpha_level("** p<.01, *** p<.001"), 0.01);
        assert_eq!(detect_alpha_level("alpha = .10"), 0.1);
        assert_eq!(
            detect_alpha_level("Cronbach's alpha .87 on the diagonal"),
            0.05
        );
    }

    #[test]
    fn corrections() {
        assert_eq!(
            detect_correction_method("p-values corrected with the Bonferroni-Holm procedure"),
            vec!["Bonferroni", "Holm"]
        );
        assert!(detect_correction_method("").is_empty());
        assert_eq!(
            detect_correction_method("Tukey HSD post-hoc tests"),
            vec!["Tukey"]
        );
    }

    #[test]
    fn sample_sizes() {
        assert_eq!(extract_sample_size("", "N = 1,250"), Some(1250));
        assert_eq!(extract_sample_size("no size given", ""), None);
        assert_eq!(extract_sample_size("Sample (N: 80)", ""), Some(80));
        assert_eq!(extract_sample_size("", "NN=3"), None);
    }

    #[test]
    fn empty_legend() {
        let c = parse_legend_codings("", "");
        assert_eq!(c, LegendCodes::default());
        assert_eq!(c.alpha_level, 0.05);
    }

    #[test]
    fn standard_coding() {
        let mut c = LegendCodes::default();
        c.apply_standard_coding();
        assert_eq!(c.sign_codes()[0].0, "***");
        let mut d = parse_legend_codings("", "+ p<.10");
        d.apply_standard_coding();
        assert_eq!(d.p_codes.len(), 1);
    }
}
