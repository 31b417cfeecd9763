//! File handling and command line for `tableparser-core`.
//!
//! [`load`] turns `.xml` (JATS or a bare `document.xml`), `.html`, `.docx`,
//! `.csv` and `.tsv` files into raw tables, [`output`] serializes results
//! as JSON or CSV and [`cli`] ties both to the `matrix`, `text` and `stats`
//! commands.

pub mod cli;
pub mod load;
pub mod output;

pub use tableparser_core as core;
