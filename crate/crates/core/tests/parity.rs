use tableparser_core::{
    extract_table_nodes, table_to_stats, table_to_text, RunOptions, SourceFormat,
};

const DOCX: &str = include_str!("fixtures/document.xml");
const HTML: &str = include_str!("fixtures/example.html");
const JATS: &str = include_str!("fixtures/example_jats.xml");

fn opts() -> RunOptions {
    RunOptions {
        check_p: true,
        estimate_z: true,
        no_sign2p: true,
        collapse: false,
        ..RunOptions::stats_defaults()
    }
}

fn text(doc: &str, f: SourceFormat) -> Vec<(usize, String)> {
    table_to_text(&extract_table_nodes(doc, f), &opts())
        .lines
        .into_iter()
        .map(|l| (l.table_index, l.text))
        .collect()
}

#[test]
fn lines_agree_across_formats() {
    let docx = text(DOCX, SourceFormat::Docx);
    assert_eq!(docx.len(), 26);
    assert_eq!(text(HTML, SourceFormat::Html), docx);
    assert_eq!(text(JATS, SourceFormat::Jats), docx);
}

#[test]
fn records_agree_across_formats() {
    let docx = table_to_stats(&extract_table_nodes(DOCX, SourceFormat::Docx), &opts());
    for (doc, f) in [(HTML, SourceFormat::Html), (JATS, SourceFormat::Jats)] {
        let other = table_to_stats(&extract_table_nodes(doc, f), &opts());
        assert_eq!(other.tables, docx.tables, "{f:?}");
    }
}

#[test]
fn captions_and_footnotes_per_format() {
    let html = extract_table_nodes(HTML, SourceFormat::Html);
    let jats = extract_table_nodes(JATS, SourceFormat::Jats);
    assert_eq!(
        html[5].caption.as_deref(),
        Some("Table 6. ANOVA result with style coded p-values.")
    );
    assert_eq!(
        jats[5].caption.as_deref(),
        Some("ANOVA result with style coded p-values.")
    );
    assert_eq!(
        jats[5].footnote.as_deref(),
        Some("Italic values are p<.05.\nBold valus indicate significance with p<.01.")
    );
    assert_eq!(html[5].footnote, jats[5].footnote);
}
