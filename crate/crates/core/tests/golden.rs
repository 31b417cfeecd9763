use tableparser_core::{extract_table_nodes, table_to_text, RawTable, RunOptions, SourceFormat};

const DOCX: &str = include_str!("fixtures/document.xml");

fn tables() -> Vec<RawTable> {
    extract_table_nodes(DOCX, SourceFormat::Docx)
}

fn lines(table: usize, opts: &RunOptions) -> Vec<String> {
    let t = tables();
    table_to_text(&t[table..=table], opts)
        .lines
        .into_iter()
        .map(|l| l.text.trim_end().to_string())
        .collect()
}

#[test]
fn fixture_holds_six_tables_with_captions() {
    let t = tables();
    assert_eq!(t.len(), 6);
    assert_eq!(
        t[3].caption.as_deref(),
        Some("Table 4. Descriptive measures and empirical correlations.")
    );
    assert!(t[3].footnote.as_deref().unwrap_or("").contains("N=125"));
    assert!(t[4]
        .footnote
        .as_deref()
        .unwrap_or("")
        .contains("standard errors"));
}

#[test]
fn simple_tables() {
    let o = RunOptions::default();
    assert_eq!(
        lines(0, &o),
        [
            "Column A=1, Column B=3, Column C: A",
            "Column A=2, Column B=4, Column C: -"
        ]
    );
    assert_eq!(
        lines(1, &o),
        [
            "Row A: Column A=1, Column B: A",
            "Row B: Column A=2, Column B: NA"
        ]
    );
}

#[test]
fn categorized_descriptives() {
    assert_eq!(
        lines(2, &RunOptions::default()),
        [
            "Variable: Age, Category=20-25, Frequency=78, 39.79%, Mean Income=1345, SD=250",
            "Variable: Age, Category=26-31, Frequency=65, 33.16%, Mean Income=1825, SD=535",
            "Variable: Age, Category=32 and older, Frequency=53, 27.05%, Mean Income=2315, SD=930",
            "Variable: Gender, Category: Men, Frequency=97, 49.49%, Mean Income=1965, SD=550",
            "Variable: Gender, Category: Women, Frequency=99, 50.51%, Mean Income=1685, SD=350",
        ]
    );
}

fn decoding() -> RunOptions {
    RunOptions {
        no_sign2p: true,
        df_handling: true,
        ..RunOptions::default()
    }
}

#[test]
fn correlations_with_descriptives() {
    assert_eq!(
        lines(3, &decoding()),
        [
            "Mean, Age=45;; SD=11.2, Income=5200;; SD=21123, Extraversion=26.8;; SD=5.2",
            "Median, Age=40, Income=3200, Extraversion=25",
            "Age <<~>> Age: r(123)=1",
            "Age <<~>> Income: r(123)=.38;; p<.01",
            "Age <<~>> Extraversion: r(123)=.04;; p>0.05",
            "Income <<~>> Income: r(123)=1",
            "Income <<~>> Extraversion: r(123)=.21;; p<.05",
            "Extraversion <<~>> Extraversion: alpha=.87",
        ]
    );
}

fn unified() -> RunOptions {
    RunOptions {
        unify_stats: true,
        ..decoding()
    }
}

#[test]
fn regression_models() {
    assert_eq!(
        lines(4, &unified()),
        [
            "Variables: Income, Job performance Model 1 b=-0.26, SE=0.16, Job performance Model 2 b=-0.39, SE=0.21, Job performance Model 3 b=-0.36;; p>0.05, SE=0.18",
            "Variables: Extraversion, Job performance Model 2 b=0.12;; p=0.075, SE=0.6, Job performance Model 3 b=0.16;; p<0.001, SE=0.03",
            "Variables: Income * Extraversion, Job performance Model 3 b=-0.18;; p<0.01, SE=0.1",
            "Job performance Model 1: R2=0.07, delta R2=0.07, delta F=2.16;; p>0.05, Job performance Model 2: R2=0.22, delta R2=0.15, delta F=21.76;; p<0.01, Job performance Model 3: R2=0.31, delta R2=0.09, delta F=14.37;; p<0.05",
        ]
    );
}

#[test]
fn anova_with_style_codes() {
    assert_eq!(
        lines(5, &unified()),
        [
            "Variable: Factor A, SSq=12, df1=2, df2=30, MSq=6, F=9.09, p=0.00;; p<0.01",
            "Variable: Factor B, SSq=4.5, df1=1, df2=30, MSq=4.5, F=6.82, p=0.01;; p<0.05",
            "Variable: Factor A * B, SSq=3, df1=2, df2=30, MSq=1.5, F=2.27, p=0.12;; p>0.05",
            "Variable: Residuals, SSq=20, df2=30, MSq=0.66",
            "Variable: Total, SSq=39.5, df=35, MSq=1.13",
        ]
    );
}

#[test]
fn flags_off_keep_cells_verbatim() {
    let l = lines(3, &RunOptions::all_off());
    assert!(l.iter().all(|x| !x.contains(";;")));
    assert!(l.iter().any(|x| x.contains(".38**")));
}
