//! Character-level normalization of cell, caption and footnote text.

use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizationOptions {
    /// Unify look-alike characters (spaces, quotes, comparison signs,
    /// superscript digits) to their ASCII forms.
    pub letter_convert: bool,
    /// Spell out Greek letters (`β` -> `beta`, `χ²` -> `chi2`).
    pub greek2text: bool,
    /// Strip markup, keeping `^` for opening `<sup>` and `_` for `<sub>`.
    pub rm_html: bool,
}

impl Default for NormalizationOptions {
    fn default() -> Self {
        NormalizationOptions {
            letter_convert: true,
            greek2text: true,
            rm_html: true,
        }
    }
}

/// Normalizes `text`. Entity escapes are always decoded, dash variants become
/// `-` and digit-grouping commas are removed; the remaining steps follow
/// `opts`. The result is a fixpoint: normalizing it again changes nothing.
pub fn normalize_characters(text: &str, opts: &NormalizationOptions) -> String {
    // Steps can expose work for earlier ones (`&l<i>t;`, `<β>`, `<χ≥`), so
    // the chain is repeated until nothing changes.
    let mut s = normalize_once(text, opts);
    for _ in 0..8 {
        let next = normalize_once(&s, opts);
        if next == s {
            break;
        }
        s = next;
    }
    s
}

fn normalize_once(text: &str, opts: &NormalizationOptions) -> String {
    let mut s = decode_entities_fully(text);
    if opts.rm_html {
        s = decode_entities_fully(&strip_tags(&s));
    }
    if opts.greek2text {
        s = greek_to_text(&s);
    }
    s = unify_dashes(&s);
    if opts.letter_convert {
        s = convert_letters(&s);
    }
    remove_grouping_commas(&s)
}

fn decode_entities_fully(text: &str) -> String {
    let mut current = String::from(text);
    // Bounded: each round strictly shortens the string or stops.
    for _ in 0..8 {
        let next = decode_entities(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

/// Decodes one level of `&name;`, `&#NNN;` and `&#xHH;` escapes.
pub fn decode_entities(text: &str) -> String {
    if !text.contains('&') {
        return String::from(text);
    }
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let tail = &rest[amp..];
        let semi = tail[1..].find(';').map(|i| i + 1);
        let decoded = semi
            .filter(|&i| i <= 12)
            .and_then(|i| decode_one(&tail[1..i]).map(|c| (c, i)));
        match decoded {
            Some((c, i)) => {
                out.push(c);
                rest = &tail[i + 1..];
            }
            None => {
                out.push('&');
                rest = &tail[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn decode_one(entity: &str) -> Option<char> {
    if let Some(num) = entity.strip_prefix('#') {
        let code = if let Some(hex) = num.strip_prefix(['x', 'X']) {
            u32::from_str_radix(hex, 16).ok()?
        } else {
            num.parse::<u32>().ok()?
        };
        return char::from_u32(code);
    }
    let c = match entity {
        "amp" => '&',
        "lt" => '<',
        "gt" => '>',
        "quot" => '"',
        "apos" => '\'',
        "nbsp" => '\u{a0}',
        "thinsp" => '\u{2009}',
        "ensp" => '\u{2002}',
        "emsp" => '\u{2003}',
        "ndash" => '–',
        "mdash" => '—',
        "minus" => '−',
        "plusmn" => '±',
        "times" => '×',
        "le" => '≤',
        "ge" => '≥',
        "deg" => '°',
        "hellip" => '…',
        "lsquo" => '‘',
        "rsquo" => '’',
        "ldquo" => '“',
        "rdquo" => '”',
        "dagger" => '†',
        "Dagger" => '‡',
        "sect" => '§',
        "para" => '¶',
        "middot" => '·',
        "sup1" => '¹',
        "sup2" => '²',
        "sup3" => '³',
        "Alpha" => 'Α',
        "Beta" => 'Β',
        "Gamma" => 'Γ',
        "Delta" => 'Δ',
        "Epsilon" => 'Ε',
        "Eta" => 'Η',
        "Theta" => 'Θ',
        "Lambda" => 'Λ',
        "Pi" => 'Π',
        "Sigma" => 'Σ',
        "Phi" => 'Φ',
        "Chi" => 'Χ',
        "Psi" => 'Ψ',
        "Omega" => 'Ω',
        _ => {
            return GREEK
                .iter()
                .find(|(_, name)| *name == entity)
                .map(|(c, _)| *c)
        }
    };
    Some(c)
}

/// Lower-case Greek letters and their spelled-out names.
const GREEK: &[(char, &str)] = &[
    ('α', "alpha"),
    ('β', "beta"),
    ('γ', "gamma"),
    ('δ', "delta"),
    ('ε', "epsilon"),
    ('ϵ', "epsilon"),
    ('ζ', "zeta"),
    ('η', "eta"),
    ('θ', "theta"),
    ('ι', "iota"),
    ('κ', "kappa"),
    ('λ', "lambda"),
    ('μ', "mu"),
    ('ν', "nu"),
    ('ξ', "xi"),
    ('π', "pi"),
    ('ρ', "rho"),
    ('σ', "sigma"),
    ('ς', "sigma"),
    ('τ', "tau"),
    ('υ', "upsilon"),
    ('φ', "phi"),
    ('ϕ', "phi"),
    ('χ', "chi"),
    ('ψ', "psi"),
    ('ω', "omega"),
];

const GREEK_UPPER: &[(char, &str)] = &[
    ('Γ', "gamma"),
    ('Δ', "delta"),
    ('Θ', "theta"),
    ('Λ', "lambda"),
    ('Ξ', "xi"),
    ('Π', "pi"),
    ('Σ', "sigma"),
    ('Φ', "phi"),
    ('Ψ', "psi"),
    ('Ω', "omega"),
    // Capitals that look like Latin letters keep their Latin reading.
    ('Α', "A"),
    ('Β', "B"),
    ('Ε', "E"),
    ('Ζ', "Z"),
    ('Η', "H"),
    ('Ι', "I"),
    ('Κ', "K"),
    ('Μ', "M"),
    ('Ν', "N"),
    ('Ο', "O"),
    ('Ρ', "P"),
    ('Τ', "T"),
    ('Υ', "Y"),
    ('Χ', "X"),
];

fn greek_name(c: char) -> Option<&'static str> {
    GREEK
        .iter()
        .chain(GREEK_UPPER.iter())
        .find(|(g, _)| *g == c)
        .map(|(_, n)| *n)
}

fn greek_to_text(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if let Some(name) = greek_name(c) {
            out.push_str(name);
            // χ², η², ω² and their caret forms become chi2, eta2, omega2.
            if chars.get(i + 1) == Some(&'²') {
                out.push('2');
                i += 2;
                continue;
            }
            if chars.get(i + 1) == Some(&'^') && chars.get(i + 2) == Some(&'2') {
                out.push('2');
                i += 3;
                continue;
            }
        } else {
            out.push(c);
        }
        i += 1;
    }
    out
}

fn unify_dashes(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            '\u{2010}' | '\u{2011}' | '\u{2012}' | '\u{2013}' | '\u{2014}' | '\u{2212}'
            | '\u{fe63}' | '\u{ff0d}' => '-',
            c => c,
        })
        .collect()
}

fn convert_letters(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut last_space = false;
    for c in s.chars() {
        let mapped: &str = match c {
            '\u{a0}' | '\u{2002}' | '\u{2003}' | '\u{2009}' | '\u{200a}' | '\u{202f}' | '\t' => " ",
            '\u{200b}' | '\u{feff}' => "",
            '‘' | '’' | '‚' | '′' | '`' => "'",
            '“' | '”' | '„' | '″' => "\"",
            '≤' => "<=",
            '≥' => ">=",
            '∗' | '⁎' => "*",
            '…' => "...",
            '¹' => "^1",
            '²' => "^2",
            '³' => "^3",
            _ => {
                if c == ' ' {
                    if !last_space {
                        out.push(' ');
                    }
                    last_space = true;
                } else {
                    out.push(c);
                    last_space = false;
                }
                continue;
            }
        };
        for m in mapped.chars() {
            if m == ' ' {
                if !last_space {
                    out.push(' ');
                }
                last_space = true;
            } else {
                out.push(m);
                last_space = false;
            }
        }
    }
    out
}

/// Removes markup, mapping an opening `<sup>` to `^` and `<sub>` to `_`.
/// `<br>` becomes a space so that words on separate lines stay separate.
pub fn strip_tags(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(lt) = rest.find('<') {
        out.push_str(&rest[..lt]);
        let tail = &rest[lt..];
        let next = tail[1..].chars().next();
        let is_tag = match next {
            Some('/') => tail[2..]
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic()),
            Some(c) => c.is_ascii_alphabetic() || c == '!',
            None => false,
        };
        let end = if is_tag { tail.find('>') } else { None };
        match end {
            Some(gt) => {
                let body = &tail[1..gt];
                let closing = body.starts_with('/');
                let name: String = body
                    .trim_start_matches('/')
                    .chars()
                    .take_while(|c| c.is_ascii_alphanumeric())
                    .collect::<String>()
                    .to_ascii_lowercase();
                match (name.as_str(), closing) {
                    ("sup", false) => out.push('^'),
                    ("sub", false) => out.push('_'),
                    ("br", _) => out.push(' '),
                    _ => {}
                }
                rest = &tail[gt + 1..];
            }
            None => {
                out.push('<');
                rest = &tail[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

/// Drops commas inside `1,345` / `21,123` / `1,234,567` style integers.
///
/// The leading group must be 1..=3 digits, not `0`, and not directly part of a
/// statistic's df bracket like `F(1,250)`.
fn remove_grouping_commas(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let boundary = i == 0 || {
            let p = chars[i - 1];
            !(p.is_ascii_digit() || p == '.' || p == ',')
        };
        if c.is_ascii_digit() && boundary {
            if let Some(end) = grouped_integer_end(&chars, i) {
                let df_bracket = i >= 2 && chars[i - 1] == '(' && chars[i - 2].is_alphabetic();
                if !df_bracket {
                    out.extend(chars[i..end].iter().filter(|&&c| c != ','));
                    i = end;
                    continue;
                }
            }
        }
        out.push(c);
        i += 1;
    }
    out
}

fn grouped_integer_end(chars: &[char], start: usize) -> Option<usize> {
    let mut i = start;
    while i < chars.len() && chars[i].is_ascii_digit() {
        i += 1;
    }
    let lead = i - start;
    if lead == 0 || lead > 3 || (lead == 1 && chars[start] == '0') {
        return None;
    }
    let mut groups = 0;
    while i < chars.len() && chars[i] == ',' {
        if i + 3 >= chars.len() || !chars[i + 1..=i + 3].iter().all(|c| c.is_ascii_digit()) {
            break;
        }
        if chars.get(i + 4).is_some_and(|c| c.is_ascii_digit()) {
            break;
        }
        groups += 1;
        i += 4;
    }
    (groups > 0).then_some(i)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all() -> NormalizationOptions {
        NormalizationOptions::default()
    }

    #[test]
    fn entity_with_greek2text() {
        let opts = NormalizationOptions {
            letter_convert: false,
            greek2text: true,
            rm_html: false,
        };
        assert_eq!(
            normalize_characters("&#x03B2; = 0.12", &opts),
            "beta = 0.12"
        );
    }

    #[test]
    fn superscript_tag_becomes_hat() {
        let opts = NormalizationOptions {
            letter_convert: false,
            greek2text: false,
            rm_html: true,
        };
        assert_eq!(normalize_characters("0.12<sup>+</sup>", &opts), "0.12^+");
        assert_eq!(normalize_characters("H<sub>2</sub>O", &opts), "H_2O");
        assert_eq!(
            normalize_characters("<b>bold</b> p < .05", &opts),
            "bold p < .05"
        );
    }

    #[test]
    fn grouping_commas() {
        let none = NormalizationOptions {
            letter_convert: false,
            greek2text: false,
            rm_html: false,
        };
        assert_eq!(normalize_characters("1,345", &none), "1345");
        assert_eq!(
            normalize_characters("5,200 (21,123)", &none),
            "5200 (21123)"
        );
        assert_eq!(normalize_characters("1,234,567", &none), "1234567");
        assert_eq!(normalize_characters("N = 1,250", &none), "N = 1250");
        // enumerations and df brackets are left alone
        assert_eq!(normalize_characters("1, 2, 3", &none), "1, 2, 3");
        assert_eq!(normalize_characters("F(1,250)=3.1", &none), "F(1,250)=3.1");
        assert_eq!(normalize_characters("0,123", &none), "0,123");
        assert_eq!(normalize_characters("12,3456", &none), "12,3456");
        assert_eq!(normalize_characters("1,23", &none), "1,23");
    }

    #[test]
    fn greek_and_squares() {
        assert_eq!(normalize_characters("χ²(2) = 4.1", &all()), "chi2(2) = 4.1");
        assert_eq!(normalize_characters("η<sup>2</sup>", &all()), "eta2");
        assert_eq!(normalize_characters("ω²", &all()), "omega2");
        assert_eq!(normalize_characters("ΔR²", &all()), "deltaR^2");
        assert_eq!(normalize_characters("α = .05", &all()), "alpha = .05");
    }

    #[test]
    fn dashes_and_spaces() {
        assert_eq!(normalize_characters("20–25", &all()), "20-25");
        assert_eq!(normalize_characters("−0.26", &all()), "-0.26");
        assert_eq!(normalize_characters("a\u{a0}\u{a0} b", &all()), "a b");
        assert_eq!(normalize_characters("p ≤ .05", &all()), "p <= .05");
    }

    #[test]
    fn double_escaped_entities() {
        assert_eq!(normalize_characters("p &amp;lt; .05", &all()), "p < .05");
        assert_eq!(normalize_characters("AT&T & co", &all()), "AT&T & co");
    }

    #[test]
    fn idempotent_on_samples() {
        for s in [
            "&amp;lt;b&amp;gt;x",
            "0.12<sup>+</sup> (.06)",
            "χ^2 and 1,345,678",
            "&#x3C7;&#xB2;",
            "a < b > c",
            "(1,234)",
        ] {
            let once = normalize_characters(s, &all());
            assert_eq!(normalize_characters(&once, &all()), once, "input {s}");
        }
    }
}
