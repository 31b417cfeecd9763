//! Small hand-written scanners for numbers, comparison operators and p-value
//! codes. These replace the regular expressions a std build would use.

use alloc::string::String;
use core::fmt;

use serde::Serialize;

/// Comparison operator attached to a reported or coded value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Operator {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Operator {
    pub fn as_str(self) -> &'static str {
        match self {
            Operator::Lt => "<",
            Operator::Le => "<=",
            Operator::Eq => "=",
            Operator::Ge => ">=",
            Operator::Gt => ">",
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Reads an operator at the start of `s`, returning it and its byte length.
pub fn parse_operator(s: &str) -> Option<(Operator, usize)> {
    let two = [
        ("<=", Operator::Le),
        (">=", Operator::Ge),
        ("=<", Operator::Le),
        ("=>", Operator::Ge),
        ("==", Operator::Eq),
    ];
    for (tok, op) in two {
        if s.starts_with(tok) {
            return Some((op, 2));
        }
    }
    let c = s.chars().next()?;
    let op = match c {
        '<' => Operator::Lt,
        '>' => Operator::Gt,
        '=' => Operator::Eq,
        '≤' => Operator::Le,
        '≥' => Operator::Ge,
        _ => return None,
    };
    Some((op, c.len_utf8()))
}

/// A number read from text together with its literal spelling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumberToken<'a> {
    pub value: f64,
    pub literal: &'a str,
    /// Byte offset just past the literal.
    pub end: usize,
}

/// Parses an optionally signed decimal number at the very start of `s`.
///
/// Accepts `12`, `-0.26`, `.38`, `1e-4`, `3e-04`. A trailing `.` without
/// digits is not consumed. Returns `None` if `s` does not start with a number.
pub fn parse_number(s: &str) -> Option<NumberToken<'_>> {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'-' || b[i] == b'+') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let int_digits = i - int_start;
    let mut frac_digits = 0;
    if i < b.len() && b[i] == b'.' {
        let mut j = i + 1;
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        frac_digits = j - i - 1;
        if frac_digits > 0 {
            i = j;
        }
    }
    if int_digits == 0 && frac_digits == 0 {
        return None;
    }
    // Exponent only when followed by digits, so `2e` in words is left alone.
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'-' || b[j] == b'+') {
            j += 1;
        }
        let exp_start = j;
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        let letter_follows = j < b.len() && b[j].is_ascii_alphabetic();
        if j > exp_start && !letter_follows {
            i = j;
        }
    }
    let literal = &s[..i];
    let value: f64 = literal.parse().ok()?;
    Some(NumberToken {
        value,
        literal,
        end: i,
    })
}

/// Characters used as p-value codes in tables and legends.
pub fn is_code_char(c: char) -> bool {
    matches!(c, '*' | '+' | '†' | '‡' | '§' | '#' | '¶' | '°')
}

/// Cell starts with a number, optionally behind a comparison operator.
pub fn starts_numeric(s: &str) -> bool {
    leading_number(s).is_some()
}

/// The number a cell starts with (after an optional operator and spaces).
pub fn leading_number(s: &str) -> Option<NumberToken<'_>> {
    let t = s.trim_start();
    let offset = s.len() - t.len();
    let (skip, rest) = match parse_operator(t) {
        Some((_, n)) => {
            let r = t[n..].trim_start();
            (t.len() - r.len(), r)
        }
        None => (0, t),
    };
    let tok = parse_number(rest)?;
    let shift = offset + skip;
    Some(NumberToken {
        value: tok.value,
        literal: tok.literal,
        end: tok.end + shift,
    })
}

/// Byte offset just past a leading number including attached code
/// characters (`.38**`, `0.12^+`), or `None` for non-numeric text.
pub fn leading_value_end(s: &str) -> Option<usize> {
    let tok = leading_number(s)?;
    let mut end = tok.end;
    let rest = &s[end..];
    let mut consumed = 0;
    for c in rest.chars() {
        if is_code_char(c) || c == '^' {
            consumed += c.len_utf8();
        } else {
            break;
        }
    }
    end += consumed;
    Some(end)
}

/// True when the whole cell reads as a numeric result: a number with
/// optional operator, codes, bracketed companions or percent signs, or a
/// `name=number` assignment.
pub fn is_numeric_content(s: &str) -> bool {
    let t = s.trim();
    if t.is_empty() {
        return false;
    }
    if let Some(end) = leading_value_end(t) {
        let rest = &t[end..];
        return rest
            .chars()
            .all(|c| !c.is_alphabetic() || c == 'e' || c == 'E');
    }
    // statistic=number, e.g. `t=2.1` or `r(123)=.38`
    if let Some(eq) = t.find(['=', '<', '>']) {
        let (name, value) = t.split_at(eq);
        let name_ok = !name.trim().is_empty()
            && name
                .trim()
                .chars()
                .next()
                .is_some_and(|c| c.is_alphabetic());
        return name_ok && leading_number(value).is_some();
    }
    false
}

/// Formats a number the way thresholds are printed in collapsed text:
/// shortest round-trip form with a leading zero (`0.05`, `0.001`, `30`).
pub fn format_number(v: f64) -> String {
    alloc::format!("{v}")
}

/// Starts with an alphabetic character (Greek included).
pub fn starts_with_letter(s: &str) -> bool {
    s.trim_start()
        .chars()
        .next()
        .is_some_and(|c| c.is_alphabetic())
}

/// Splits `s` at top-level `", "` separators, ignoring those inside brackets.
pub fn split_top_level(s: &str) -> alloc::vec::Vec<&str> {
    let mut parts = alloc::vec::Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' | b'[' => depth += 1,
            b')' | b']' => depth -= 1,
            b',' if depth <= 0 && bytes.get(i + 1) == Some(&b' ') => {
                parts.push(&s[start..i]);
                start = i + 2;
                i += 2;
                continue;
            }
            _ => {}
        }
        i += 1;
    }
    parts.push(&s[start..]);
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(parse_number(".38**").unwrap().value, 0.38);
        assert_eq!(parse_number(".38**").unwrap().literal, ".38");
        assert_eq!(parse_number("-0.26 (.16)").unwrap().value, -0.26);
        assert_eq!(parse_number("3e-04").unwrap().value, 3e-4);
        assert_eq!(parse_number("2eggs").unwrap().literal, "2");
        assert_eq!(parse_number("12.").unwrap().literal, "12");
        assert!(parse_number("abc").is_none());
        assert!(parse_number(".").is_none());
        assert!(parse_number("-").is_none());
    }

    #[test]
    fn leading_values() {
        assert_eq!(leading_number("< .001").unwrap().value, 0.001);
        assert_eq!(leading_value_end("0.12^+ (.6)"), Some(6));
        assert_eq!(leading_value_end(".38**"), Some(5));
        assert!(leading_value_end("Men").is_none());
    }

    #[test]
    fn numeric_content() {
        assert!(is_numeric_content("12.3"));
        assert!(is_numeric_content("t=2.1"));
        assert!(is_numeric_content("1345 (250)"));
        assert!(is_numeric_content(".38**"));
        assert!(is_numeric_content("78, 39.79%"));
        assert!(!is_numeric_content("32 and older"));
        assert!(!is_numeric_content("Job performance"));
        assert!(!is_numeric_content(""));
    }

    #[test]
    fn top_level_split() {
        assert_eq!(
            split_top_level("a=1, CI=[1, 2], b=3"),
            alloc::vec!["a=1", "CI=[1, 2]", "b=3"]
        );
    }

    #[test]
    fn formatting() {
        assert_eq!(format_number(0.05), "0.05");
        assert_eq!(format_number(30.0), "30");
        assert_eq!(format_number(0.001), "0.001");
    }
}
