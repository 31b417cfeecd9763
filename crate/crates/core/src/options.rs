use serde::Serialize;

use crate::classify::TableClass;
use crate::normalize::NormalizationOptions;

/// Sidedness used when recomputing p-values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    #[default]
    Undirected,
    Directed,
}

/// The complete option surface of the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOptions {
    pub decode_p: bool,
    pub no_sign2p: bool,
    pub standard_pcoding: bool,
    pub expand_abbreviations: bool,
    pub superscript2bracket: bool,
    pub bracket_handling: bool,
    pub df_handling: bool,
    pub unify_stats: bool,
    pub estimate_z: bool,
    pub check_p: bool,
    /// Fixed alpha level for every check; detected per table when `None`.
    pub alpha: Option<f64>,
    pub alternative: Alternative,
    pub force_class: Option<TableClass>,
    pub rotate: bool,
    /// Merge statistics of all tables into one list.
    pub collapse: bool,
    pub replicate: bool,
    pub rep_nums: bool,
    pub collapse_header: bool,
    pub letter_convert: bool,
    pub greek2text: bool,
    pub rm_html: bool,
}

impl Default for RunOptions {
    /// Defaults for matrix and text extraction.
    fn default() -> Self {
        RunOptions {
            decode_p: true,
            no_sign2p: false,
            standard_pcoding: false,
            expand_abbreviations: true,
            superscript2bracket: true,
            bracket_handling: true,
            df_handling: false,
            unify_stats: false,
            estimate_z: false,
            check_p: false,
            alpha: None,
            alternative: Alternative::Undirected,
            force_class: None,
            rotate: false,
            collapse: true,
            replicate: true,
            rep_nums: false,
            collapse_header: true,
            letter_convert: true,
            greek2text: true,
            rm_html: true,
        }
    }
}

impl RunOptions {
    /// Defaults for statistics extraction: every decoding step is active
    /// except the imputation of non-significant p-values.
    pub fn stats_defaults() -> Self {
        RunOptions {
            standard_pcoding: true,
            df_handling: true,
            unify_stats: true,
            ..RunOptions::default()
        }
    }

    /// Every boolean flag switched off.
    pub fn all_off() -> Self {
        RunOptions {
            decode_p: false,
            no_sign2p: false,
            standard_pcoding: false,
            expand_abbreviations: false,
            superscript2bracket: false,
            bracket_handling: false,
            df_handling: false,
            unify_stats: false,
            estimate_z: false,
            check_p: false,
            alpha: None,
            alternative: Alternative::Undirected,
            force_class: None,
            rotate: false,
            collapse: false,
            replicate: false,
            rep_nums: false,
            collapse_header: false,
            letter_convert: false,
            greek2text: false,
            rm_html: false,
        }
    }

    pub fn normalization(&self) -> NormalizationOptions {
        NormalizationOptions {
            letter_convert: self.letter_convert,
            greek2text: self.greek2text,
            rm_html: self.rm_html,
        }
    }
}
