//! Command line front end: `matrix`, `text` and `stats` over a list of files.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{value_parser, Arg, ArgAction, ArgMatches, Command as ClapCommand};
use rayon::prelude::*;
use tableparser_core::{
    classify_table, table_to_matrix, table_to_stats, table_to_text, Alternative, RunOptions,
    TableClass,
};

use crate::load::{load_tables, LoadError};
use crate::output::{write_csv, write_json, Command, FileOutput, Format, Payload};

/// Boolean options, each available as `--name` and `--no-name`.
pub const FLAGS: [&str; 18] = [
    "decodeP",
    "noSign2p",
    "standardPcoding",
    "expandAbbreviations",
    "superscript2bracket",
    "bracketHandling",
    "dfHandling",
    "unifyStats",
    "estimateZ",
    "checkP",
    "rotate",
    "collapse",
    "replicate",
    "repNums",
    "collapseHeader",
    "letterConvert",
    "greek2text",
    "rmHtml",
];

/// A parsed invocation.
#[derive(Debug, Clone)]
pub struct CliRequest {
    pub inputs: Vec<PathBuf>,
    pub command: Command,
    pub options: RunOptions,
    pub output_format: Format,
    pub output_path: Option<PathBuf>,
}

fn flag_mut<'a>(o: &'a mut RunOptions, name: &str) -> &'a mut bool {
    match name {
        "decodeP" => &mut o.decode_p,
        "noSign2p" => &mut o.no_sign2p,
        "standardPcoding" => &mut o.standard_pcoding,
        "expandAbbreviations" => &mut o.expand_abbreviations,
        "superscript2bracket" => &mut o.superscript2bracket,
        "bracketHandling" => &mut o.bracket_handling,
        "dfHandling" => &mut o.df_handling,
        "unifyStats" => &mut o.unify_stats,
        "estimateZ" => &mut o.estimate_z,
        "checkP" => &mut o.check_p,
        "rotate" => &mut o.rotate,
        "collapse" => &mut o.collapse,
        "replicate" => &mut o.replicate,
        "repNums" => &mut o.rep_nums,
        "collapseHeader" => &mut o.collapse_header,
        "letterConvert" => &mut o.letter_convert,
        "greek2text" => &mut o.greek2text,
        _ => &mut o.rm_html,
    }
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("alpha must lie in (0, 1), got {v}"))
    }
}

fn parse_class(s: &str) -> Result<TableClass, String> {
    TableClass::parse(s).ok_or_else(|| {
        let names: Vec<&str> = TableClass::ALL.iter().map(|c| c.as_str()).collect();
        format!("unknown table class '{s}' (one of {})", names.join(", "))
    })
}

fn shared_args() -> Vec<Arg> {
    let mut args = vec![
        Arg::new("inputs")
            .num_args(1..)
            .required(true)
            .value_parser(value_parser!(PathBuf))
            .help("Input files (.xml, .html, .htm, .docx, .csv, .tsv)"),
        Arg::new("format")
            .long("format")
            .value_parser(["json", "csv"])
            .default_value("json")
            .help("Output format"),
        Arg::new("output")
            .long("output")
            .short('o')
            .value_parser(value_parser!(PathBuf))
            .help("Write output to this file instead of stdout"),
        Arg::new("alpha")
            .long("alpha")
            .value_parser(parse_alpha)
            .help("Significance level for checks (default: from the footnote, else .05)"),
        Arg::new("alternative")
            .long("alternative")
            .value_parser(["undirected", "directed"])
            .default_value("undirected")
            .help("Two-sided or one-sided p-values"),
        Arg::new("forceClass")
            .long("forceClass")
            .value_parser(parse_class)
            .help("Treat every table as this class"),
    ];
    for name in FLAGS {
        let no = format!("no-{name}");
        args.push(
            Arg::new(name)
                .long(name)
                .action(ArgAction::SetTrue)
                .overrides_with(no.clone())
                .help(format!("Enable {name}")),
        );
        args.push(
            Arg::new(no.clone())
                .long(no)
                .action(ArgAction::SetTrue)
                .overrides_with(name)
                .help(format!("Disable {name}")),
        );
    }
    args
}

/// The clap command tree.
pub fn command() -> ClapCommand {
    let sub = |name: &'static str, about: &'static str| {
        ClapCommand::new(name).about(about).args(shared_args())
    };
    ClapCommand::new("tableparser")
        .about("Extract, collapse and check tables in JATS, HTML, DOCX and CSV documents")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(sub(
            "matrix",
            "Emit tables as character matrices with caption, footnote and class",
        ))
        .subcommand(sub("text", "Emit collapsed table lines"))
        .subcommand(sub(
            "stats",
            "Emit extracted statistical results with recomputed p-values",
        ))
}

fn request_from(name: &str, m: &ArgMatches) -> CliRequest {
    let command = match name {
        "matrix" => Command::Matrix,
        "text" => Command::Text,
        _ => Command::Stats,
    };
    let mut options = if command == Command::Stats {
        RunOptions::stats_defaults()
    } else {
        RunOptions::default()
    };
    for flag in FLAGS {
        if m.get_flag(flag) {
            *flag_mut(&mut options, flag) = true;
        }
        if m.get_flag(&format!("no-{flag}")) {
            *flag_mut(&mut options, flag) = false;
        }
    }
    options.alpha = m.get_one::<f64>("alpha").copied();
    options.alternative = match m.get_one::<String>("alternative").map(String::as_str) {
        Some("directed") => Alternative::Directed,
        _ => Alternative::Undirected,
    };
    options.force_class = m.get_one::<TableClass>("forceClass").copied();
    CliRequest {
        inputs: m
            .get_many::<PathBuf>("inputs")
            .map(|v| v.cloned().collect())
            .unwrap_or_default(),
        command,
        options,
        output_format: match m.get_one::<String>("format").map(String::as_str) {
            Some("csv") => Format::Csv,
            _ => Format::Json,
        },
        output_path: m.get_one::<PathBuf>("output").cloned(),
    }
}

/// Parses command line arguments. `Err` carries clap's rendered message.
pub fn parse_args<I, T>(args: I) -> Result<CliRequest, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let m = command().try_get_matches_from(args)?;
    let (name, sub) = m.subcommand().expect("subcommand is required");
    Ok(request_from(name, sub))
}

/// Result of processing one file: its output plus diagnostics.
#[derive(Debug)]
pub struct Processed {
    pub output: FileOutput,
    pub warnings: Vec<String>,
    pub errors: Vec<String>,
}

/// Runs the requested pipeline depth on one file.
pub fn process_file(
    path: &Path,
    command: Command,
    opts: &RunOptions,
) -> Result<Processed, LoadError> {
    let raws = load_tables(path)?;
    let file = path.display().to_string();
    let mut warnings = Vec::new();
    let mut errors = Vec::new();
    let payload = match command {
        Command::Matrix => {
            let mut tables = Vec::new();
            for raw in &raws {
                match table_to_matrix(raw, opts) {
                    Ok(mut t) => {
                        t.table_class =
                            Some(opts.force_class.unwrap_or_else(|| classify_table(&t)));
                        warnings.extend(t.warnings.iter().map(|w| w.to_string()));
                        tables.push(t);
                    }
                    Err(e) => errors.push(e.to_string()),
                }
            }
            Payload::Matrix(tables)
        }
        Command::Text => {
            let r = table_to_text(&raws, opts);
            warnings.extend(r.warnings.iter().map(|w| w.to_string()));
            errors.extend(r.errors.iter().map(|e| e.to_string()));
            Payload::Text(r.lines)
        }
        Command::Stats => {
            let r = table_to_stats(&raws, opts);
            warnings.extend(r.warnings.iter().map(|w| w.to_string()));
            errors.extend(r.errors.iter().map(|e| e.to_string()));
            Payload::Stats(r)
        }
    };
    Ok(Processed {
        output: FileOutput { file, payload },
        warnings,
        errors,
    })
}

/// Processes all inputs (in parallel, output in input order) and writes
/// the serialized result. Returns the exit status.
pub fn run(req: &CliRequest, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let results: Vec<Result<Processed, LoadError>> = req
        .inputs
        .par_iter()
        .map(|p| process_file(p, req.command, &req.options))
        .collect();
    let mut failed = false;
    let mut outputs = Vec::with_capacity(results.len());
    for (path, result) in req.inputs.iter().zip(results) {
        match result {
            Ok(p) => {
                for w in &p.warnings {
                    let _ = writeln!(stderr, "warning: {}: {w}", path.display());
                }
                for e in &p.errors {
                    failed = true;
                    let _ = writeln!(stderr, "error: {}: {e}", path.display());
                }
                outputs.push(p.output);
            }
            Err(e) => {
                failed = true;
                let _ = writeln!(stderr, "error: {e}");
            }
        }
    }
    let mut buffer = Vec::new();
    let written = match req.output_format {
        Format::Json => write_json(req.command, &outputs, req.options.collapse, &mut buffer),
        Format::Csv => write_csv(req.command, &outputs, &mut buffer),
    };
    let emitted = written.and_then(|_| match &req.output_path {
        Some(path) => std::fs::write(path, &buffer),
        None => stdout.write_all(&buffer),
    });
    if let Err(e) = emitted {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return 1;
    }
    i32::from(failed)
}

/// Entry point: parses `args`, runs and returns the exit status
/// (0 success, 1 per-file error, 2 usage error).
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(args) {
        Ok(req) => run(&req, stdout, stderr),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            code
        }
    }
}
