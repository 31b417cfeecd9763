//! Three-part table extraction and decoding for scientific documents.
//!
//! The crate turns tables found in NISO-JATS XML, generic HTML and
//! WordprocessingML (`word/document.xml`) into rectangular character
//! matrices, decodes the codings declared in captions and footnotes,
//! collapses each table into screen-reader style text lines and extracts
//! statistical standard results with recomputed p-values.
//!
//! Everything here is a pure function of its inputs and works without
//! `std` (an allocator is required). File access, archive unpacking and the
//! command line live in the `tableparser` crate.
//!
//! ```
//! use tableparser_core::{extract_table_nodes, table_to_text, RunOptions, SourceFormat};
//!
//! let doc = "<table-wrap><caption><p>T1</p></caption>\
//!            <table><tr><td></td><td>Column A</td></tr>\
//!            <tr><td>Row A</td><td>1</td></tr><tr><td>Row B</td><td>2</td></tr></table>\
//!            </table-wrap>";
//! let tables = extract_table_nodes(doc, SourceFormat::Jats);
//! let report = table_to_text(&tables, &RunOptions::default());
//! assert_eq!(report.lines[0].text, "Row A: Column A=1");
//! ```

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod classify;
pub mod collapse;
pub mod dist;
mod error;
pub mod ingest;
pub mod legend;
pub mod markup;
pub mod matrix;
pub mod normalize;
mod options;
pub mod scan;
pub mod stats;

pub use classify::{classify_table, TableClass};
pub use collapse::{collapse, table_to_text, CollapseStrategy, CollapsedLine, TextReport};
pub use error::{Error, Warning};
pub use ingest::{extract_table_nodes, guess_caption_footer, RawTable, SourceFormat};
pub use legend::{parse_legend_codings, LegendCodes};
pub use matrix::{table_to_matrix, Cell, CharTable};
pub use normalize::{normalize_characters, NormalizationOptions};
pub use options::{Alternative, RunOptions};
pub use stats::{table_to_stats, ErrorType, StatName, StatRecord, StatsReport};
