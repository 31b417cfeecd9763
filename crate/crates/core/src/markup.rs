//! Lenient tag soup parser shared by the HTML, JATS and WordprocessingML paths.
//!
//! The parser never fails. Unknown or unbalanced end tags are dropped, open
//! elements are closed implicitly by their ancestors' end tags, and the usual
//! HTML auto-closing rules for `p`, `tr`, `td` and `th` are applied. Every
//! element remembers the byte range it covers in the source so that callers
//! can slice the original markup back out.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Element(Element),
    /// Raw text, entities not yet decoded.
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    /// Lower-cased qualified name, e.g. `table-wrap` or `w:tbl`.
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<Node>,
    /// Source range from the `<` of the start tag to the end of the end tag.
    pub span: Range<usize>,
    /// Source range of the element content.
    pub inner: Range<usize>,
}

const VOID: &[&str] = &[
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "source", "track",
    "wbr",
];
const RAW_TEXT: &[&str] = &["script", "style"];

impl Element {
    fn new(name: String, attrs: Vec<(String, String)>, start: usize) -> Self {
        Element {
            name,
            attrs,
            children: Vec::new(),
            span: start..start,
            inner: start..start,
        }
    }

    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn is(&self, name: &str) -> bool {
        self.name == name
    }

    pub fn child_elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|n| match n {
            Node::Element(e) => Some(e),
            Node::Text(_) => None,
        })
    }

    pub fn first_child(&self, name: &str) -> Option<&Element> {
        self.child_elements().find(|e| e.is(name))
    }

    /// Pre-order search for the first descendant with the given name.
    pub fn find(&self, name: &str) -> Option<&Element> {
        for child in self.child_elements() {
            if child.is(name) {
                return Some(child);
            }
            if let Some(found) = child.find(name) {
                return Some(found);
            }
        }
        None
    }

    /// All descendants named `name`, in document order, without descending
    /// into a match or into any element named in `barrier`.
    pub fn find_all<'a>(&'a self, name: &str, barrier: &[&str]) -> Vec<&'a Element> {
        let mut out = Vec::new();
        self.collect_into(name, barrier, &mut out);
        out
    }

    fn collect_into<'a>(&'a self, name: &str, barrier: &[&str], out: &mut Vec<&'a Element>) {
        for child in self.child_elements() {
            if child.is(name) {
                out.push(child);
            } else if !barrier.contains(&child.name.as_str()) {
                child.collect_into(name, barrier, out);
            }
        }
    }

    /// Concatenated raw text of the subtree.
    pub fn raw_text(&self) -> String {
        let mut s = String::new();
        self.push_raw_text(&mut s);
        s
    }

    fn push_raw_text(&self, out: &mut String) {
        for child in &self.children {
            match child {
                Node::Text(t) => out.push_str(t),
                Node::Element(e) => e.push_raw_text(out),
            }
        }
    }
}

/// Parses `src` into a synthetic root element named `#document`.
pub fn parse(src: &str) -> Element {
    let mut stack: Vec<Element> = Vec::new();
    stack.push(Element::new("#document".to_string(), Vec::new(), 0));
    let bytes = src.as_bytes();
    let mut pos = 0;
    let mut text_start = 0;

    while pos < bytes.len() {
        if bytes[pos] != b'<' {
            pos += 1;
            continue;
        }
        let rest = &src[pos..];
        // Comments, CDATA, doctype and processing instructions.
        if rest.starts_with("<!--") {
            flush_text(&mut stack, &src[text_start..pos]);
            let end = rest.find("-->").map(|i| pos + i + 3).unwrap_or(bytes.len());
            pos = end;
            text_start = pos;
            continue;
        }
        if rest.starts_with("<![CDATA[") {
            flush_text(&mut stack, &src[text_start..pos]);
            let body_start = pos + 9;
            let end = src[body_start..]
                .find("]]>")
                .map(|i| body_start + i)
                .unwrap_or(bytes.len());
            push_text(&mut stack, escape_text(&src[body_start..end]));
            pos = (end + 3).min(bytes.len());
            text_start = pos;
            continue;
        }
        if rest.starts_with("<!") || rest.starts_with("<?") {
            flush_text(&mut stack, &src[text_start..pos]);
            let end = rest.find('>').map(|i| pos + i + 1).unwrap_or(bytes.len());
            pos = end;
            text_start = pos;
            continue;
        }
        let closing = rest.starts_with("</");
        let name_start = if closing { pos + 2 } else { pos + 1 };
        let starts_name = src[name_start..]
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic());
        if !starts_name {
            pos += 1;
            continue;
        }
        let Some(tag_end) = find_tag_end(src, name_start) else {
            // Unterminated tag: treat the rest as text.
            break;
        };
        flush_text(&mut stack, &src[text_start..pos]);
        let tag_body = &src[name_start..tag_end];
        let after = tag_end + 1;
        if closing {
            let name = tag_body
                .split(|c: char| c.is_whitespace())
                .next()
                .unwrap_or("")
                .to_ascii_lowercase();
            close_element(&mut stack, &name, pos, after);
        } else {
            let self_closing = tag_body.ends_with('/');
            let body = tag_body.trim_end_matches('/');
            let (name, attrs) = parse_tag(body);
            auto_close(&mut stack, &name, pos);
            let mut el = Element::new(name.clone(), attrs, pos);
            el.inner = after..after;
            if self_closing || VOID.contains(&name.as_str()) {
                el.span = pos..after;
                attach(&mut stack, el);
            } else if RAW_TEXT.contains(&name.as_str()) {
                let close = alloc::format!("</{name}");
                let end = find_ci(&src[after..], &close)
                    .map(|i| after + i)
                    .unwrap_or(bytes.len());
                let close_end = src[end..]
                    .find('>')
                    .map(|i| end + i + 1)
                    .unwrap_or(bytes.len());
                el.inner = after..end;
                el.span = pos..close_end;
                attach(&mut stack, el);
                pos = close_end;
                text_start = pos;
                continue;
            } else {
                stack.push(el);
            }
        }
        pos = after;
        text_start = pos;
    }
    if text_start < bytes.len() {
        flush_text(&mut stack, &src[text_start..]);
    }
    while stack.len() > 1 {
        let mut el = stack.pop().unwrap();
        el.span.end = bytes.len();
        el.inner.end = bytes.len();
        attach(&mut stack, el);
    }
    let mut root = stack.pop().unwrap();
    root.span = 0..bytes.len();
    root.inner = 0..bytes.len();
    root
}

fn find_ci(haystack: &str, needle: &str) -> Option<usize> {
    let h = haystack.as_bytes();
    let n = needle.as_bytes();
    if n.len() > h.len() {
        return None;
    }
    (0..=h.len() - n.len()).find(|&i| h[i..i + n.len()].eq_ignore_ascii_case(n))
}

/// Position of the `>` closing a tag, honouring quoted attribute values.
fn find_tag_end(src: &str, from: usize) -> Option<usize> {
    let mut quote: Option<u8> = None;
    for (i, &b) in src.as_bytes()[from..].iter().enumerate() {
        match quote {
            Some(q) if b == q => quote = None,
            Some(_) => {}
            None if b == b'"' || b == b'\'' => quote = Some(b),
            None if b == b'>' => return Some(from + i),
            None => {}
        }
    }
    None
}

fn parse_tag(body: &str) -> (String, Vec<(String, String)>) {
    let body = body.trim();
    let name_end = body.find(|c: char| c.is_whitespace()).unwrap_or(body.len());
    let name = body[..name_end].to_ascii_lowercase();
    let mut attrs = Vec::new();
    let rest = &body.as_bytes()[name_end..];
    let mut i = 0;
    while i < rest.len() {
        while i < rest.len() && rest[i].is_ascii_whitespace() {
            i += 1;
        }
        let key_start = i;
        while i < rest.len() && !rest[i].is_ascii_whitespace() && rest[i] != b'=' {
            i += 1;
        }
        if key_start == i {
            i += 1;
            continue;
        }
        let key = String::from_utf8_lossy(&rest[key_start..i]).to_ascii_lowercase();
        while i < rest.len() && rest[i].is_ascii_whitespace() {
            i += 1;
        }
        let mut value = String::new();
        if i < rest.len() && rest[i] == b'=' {
            i += 1;
            while i < rest.len() && rest[i].is_ascii_whitespace() {
                i += 1;
            }
            if i < rest.len() && (rest[i] == b'"' || rest[i] == b'\'') {
                let q = rest[i];
                i += 1;
                let v_start = i;
                while i < rest.len() && rest[i] != q {
                    i += 1;
                }
                value = String::from_utf8_lossy(&rest[v_start..i]).into_owned();
                i += 1;
            } else {
                let v_start = i;
                while i < rest.len() && !rest[i].is_ascii_whitespace() {
                    i += 1;
                }
                value = String::from_utf8_lossy(&rest[v_start..i]).into_owned();
            }
        }
        attrs.push((key, value));
    }
    (name, attrs)
}

fn escape_text(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;")
}

fn flush_text(stack: &mut [Element], text: &str) {
    if !text.is_empty() {
        push_text(stack, text.to_string());
    }
}

fn push_text(stack: &mut [Element], text: String) {
    if let Some(top) = stack.last_mut() {
        top.children.push(Node::Text(text));
    }
}

fn attach(stack: &mut [Element], el: Element) {
    if let Some(top) = stack.last_mut() {
        top.children.push(Node::Element(el));
    }
}

fn close_element(stack: &mut Vec<Element>, name: &str, tag_start: usize, tag_end: usize) {
    let Some(idx) = stack.iter().rposition(|e| e.name == name) else {
        return;
    };
    if idx == 0 {
        return;
    }
    while stack.len() > idx + 1 {
        let mut el = stack.pop().unwrap();
        el.span.end = tag_start;
        el.inner.end = tag_start;
        attach(stack, el);
    }
    let mut el = stack.pop().unwrap();
    el.span.end = tag_end;
    el.inner.end = tag_start;
    attach(stack, el);
}

/// HTML optional end tags relevant to tables and paragraphs.
fn auto_close(stack: &mut Vec<Element>, opening: &str, at: usize) {
    let (targets, scope): (&[&str], &[&str]) = match opening {
        "tr" => (&["tr"], &["table", "thead", "tbody", "tfoot"]),
        "td" | "th" => (&["td", "th"], &["tr", "table"]),
        "thead" | "tbody" | "tfoot" => (&["thead", "tbody", "tfoot"], &["table"]),
        "p" => (
            &["p"],
            &["div", "td", "th", "table", "body", "li", "caption"],
        ),
        _ => return,
    };
    // Find the nearest open target below the nearest scope boundary.
    let mut close_from = None;
    for (i, el) in stack.iter().enumerate().rev() {
        if targets.contains(&el.name.as_str()) {
            close_from = Some(i);
            break;
        }
        if scope.contains(&el.name.as_str()) {
            break;
        }
    }
    // A new row also closes an open cell of the previous row.
    if close_from.is_none() && opening == "tr" {
        for (i, el) in stack.iter().enumerate().rev() {
            if el.name == "tr" {
                close_from = Some(i);
                break;
            }
            if el.name == "table" {
                break;
            }
        }
    }
    if let Some(idx) = close_from {
        while stack.len() > idx {
            let mut el = stack.pop().unwrap();
            el.span.end = at;
            el.inner.end = at;
            attach(stack, el);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_structure_and_spans() {
        let src = "<div><table><tr><td a=\"1\">x</td></tr></table></div>";
        let root = parse(src);
        let td = root.find("td").unwrap();
        assert_eq!(td.attr("a"), Some("1"));
        assert_eq!(&src[td.span.clone()], "<td a=\"1\">x</td>");
        assert_eq!(&src[td.inner.clone()], "x");
        let table = root.find("table").unwrap();
        assert_eq!(
            &src[table.span.clone()],
            "<table><tr><td a=\"1\">x</td></tr></table>"
        );
    }

    #[test]
    fn implicit_cell_and_row_closing() {
        let root = parse("<table><tr><td>1<td>2<tr><td>3</table>");
        let rows = root.find_all("tr", &[]);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].find_all("td", &[]).len(), 2);
        assert_eq!(rows[1].raw_text(), "3");
    }

    #[test]
    fn comments_pis_and_cdata() {
        let root = parse("<?xml version=\"1.0\"?><!-- c --><a><![CDATA[x<y]]></a>");
        let a = root.find("a").unwrap();
        assert_eq!(a.raw_text(), "x&lt;y");
    }

    #[test]
    fn namespaced_self_closing_and_stray_lt() {
        let root = parse("<w:p><w:r><w:b/><w:t>p < .05</w:t></w:r></w:p>");
        let t = root.find("w:t").unwrap();
        assert_eq!(t.raw_text(), "p < .05");
        assert!(root.find("w:b").is_some());
    }

    #[test]
    fn stray_end_tags_are_ignored() {
        let root = parse("<p>a</span>b</p>");
        assert_eq!(root.find("p").unwrap().raw_text(), "ab");
    }
}
