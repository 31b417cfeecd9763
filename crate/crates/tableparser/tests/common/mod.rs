#![allow(dead_code)]

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures");

pub fn fixture(name: &str) -> PathBuf {
    Path::new(FIXTURES).join(name)
}

/// Packs the fixture body into a DOCX archive inside `dir`.
pub fn write_docx(dir: &Path) -> PathBuf {
    let path = dir.join("example.docx");
    let body = std::fs::read(fixture("document.xml")).unwrap();
    let mut zip = zip::ZipWriter::new(std::fs::File::create(&path).unwrap());
    let opts = zip::write::SimpleFileOptions::default();
    zip.start_file("[Content_Types].xml", opts).unwrap();
    zip.write_all(br#"<?xml version="1.0"?><Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types"/>"#)
        .unwrap();
    zip.start_file("word/document.xml", opts).unwrap();
    zip.write_all(&body).unwrap();
    zip.finish().unwrap();
    path
}

pub fn run<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_tableparser"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "invalid JSON ({e}): {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

/// Collapsed lines of table `index` from a `text` JSON document.
pub fn table_lines(doc: &serde_json::Value, index: u64) -> Vec<String> {
    doc.as_array()
        .unwrap()
        .iter()
        .filter(|l| l["table_index"] == index)
        .map(|l| l["text"].as_str().unwrap().trim_end().to_string())
        .collect()
}
