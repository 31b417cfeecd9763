mod common;

use common::{fixture, json, run, table_lines, write_docx};

#[test]
fn text_defaults_on_docx() {
    let dir = tempfile::tempdir().unwrap();
    let docx = write_docx(dir.path());
    let out = run([std::ffi::OsStr::new("text"), docx.as_os_str()]);
    assert_eq!(out.status.code(), Some(0));
    let lines = table_lines(&json(&out), 3);
    assert_eq!(
        lines[0],
        "Variable: Age, Category=20-25, Frequency=78, 39.79%, Mean Income=1345, SD=250"
    );
    assert_eq!(lines.len(), 5);
}

#[test]
fn stats_per_table_and_merged() {
    let dir = tempfile::tempdir().unwrap();
    let docx = write_docx(dir.path());
    let d = docx.to_str().unwrap();
    let nested = json(&run([
        "stats",
        d,
        "--checkP",
        "--estimateZ",
        "--noSign2p",
        "--no-collapse",
    ]));
    let tables = nested.as_array().unwrap();
    assert_eq!(tables.len(), 3);
    assert!(tables.iter().all(|t| t.is_array()));
    let merged = json(&run(["stats", d, "--checkP", "--estimateZ", "--noSign2p"]));
    let flat = merged.as_array().unwrap();
    let total: usize = tables.iter().map(|t| t.as_array().unwrap().len()).sum();
    assert_eq!(flat.len(), total);
    assert!(flat.iter().all(|r| r.is_object() && r["file"] == d));
}

#[test]
fn matrix_output_carries_class_and_notes() {
    let out = run(["matrix", fixture("example_jats.xml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let t = &doc.as_array().unwrap()[3];
    assert_eq!(t["class"], "correlation");
    assert_eq!(
        t["caption"],
        "Descriptive measures and empirical correlations."
    );
    assert_eq!(t["cells"][3][2], ".38**");
}

#[test]
fn table_free_file_gives_empty_array() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("empty.html");
    std::fs::write(&p, "<html><body><p>No tables here.</p></body></html>").unwrap();
    let out = run(["matrix", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out), serde_json::json!([]));
}

#[test]
fn per_file_errors_keep_going() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("notes.pdf");
    std::fs::write(&bad, "x").unwrap();
    let broken = dir.path().join("broken.docx");
    std::fs::write(&broken, "not a zip").unwrap();
    let html = fixture("example.html");
    let out = run([
        "text",
        bad.to_str().unwrap(),
        broken.to_str().unwrap(),
        html.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("notes.pdf: unsupported file extension"));
    assert!(err.contains("broken.docx: not a readable DOCX archive"));
    assert_eq!(table_lines(&json(&out), 1).len(), 2);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["text"],
        vec!["bogus", "x.html"],
        vec!["stats", "--alpha", "1.5", "x.html"],
        vec!["text", "--forceClass", "nope", "x.html"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn csv_stats_columns_and_quoting() {
    let dir = tempfile::tempdir().unwrap();
    let docx = write_docx(dir.path());
    let target = dir.path().join("out.csv");
    let out = run([
        "stats",
        docx.to_str().unwrap(),
        "--checkP",
        "--format",
        "csv",
        "-o",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let mut reader = csv::Reader::from_path(&target).unwrap();
    let headers: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(headers, tableparser::output::STATS_COLUMNS);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let anova = rows.iter().find(|r| r[5] == *"9.09").unwrap();
    assert_eq!(
        &anova[2],
        "Variable: Factor A, SSq=12, df1=2, df2=30, MSq=6, F=9.09, p=0.00;; p<0.01"
    );
    assert_eq!(&anova[14], "0.0008");
}

#[test]
fn flag_pairs_last_one_wins() {
    let req = tableparser::cli::parse_args([
        "tableparser",
        "text",
        "--dfHandling",
        "--no-dfHandling",
        "a.html",
    ])
    .unwrap();
    assert!(!req.options.df_handling);
    let req = tableparser::cli::parse_args([
        "tableparser",
        "text",
        "--no-decodeP",
        "--decodeP",
        "a.html",
    ])
    .unwrap();
    assert!(req.options.decode_p);
    let req = tableparser::cli::parse_args(["tableparser", "stats", "a.html"]).unwrap();
    assert!(req.options.df_handling && req.options.unify_stats && !req.options.no_sign2p);
}

#[test]
fn csv_and_tsv_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("m.csv");
    std::fs::write(
        &csv_path,
        ",Column A,Column B\nRow A,1,\"A, B\"\nRow B,2,NA\n",
    )
    .unwrap();
    let tsv_path = dir.path().join("m.tsv");
    std::fs::write(
        &tsv_path,
        "\tColumn A\tColumn B\nRow A\t1\tA, B\nRow B\t2\tNA\n",
    )
    .unwrap();
    let a = json(&run(["text", csv_path.to_str().unwrap()]));
    let b = json(&run(["text", tsv_path.to_str().unwrap()]));
    assert_eq!(
        table_lines(&a, 1),
        [
            "Row A: Column A=1, Column B: A, B",
            "Row B: Column A=2, Column B: NA"
        ]
    );
    assert_eq!(table_lines(&a, 1), table_lines(&b, 1));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let docx = write_docx(dir.path());
    let html = fixture("example.html");
    let args = [
        "stats",
        docx.to_str().unwrap(),
        html.to_str().unwrap(),
        "--checkP",
        "--estimateZ",
    ];
    let a = run(args).stdout;
    let b = run(args).stdout;
    assert_eq!(a, b);
}
