use alloc::string::String;
use core::fmt;

use serde::Serialize;

/// Hard failures. Everything recoverable is reported as a [`Warning`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The table markup did not contain a single row.
    Structure { table_index: usize, reason: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Structure {
                table_index,
                reason,
            } => write!(f, "table {table_index}: {reason}"),
        }
    }
}

impl core::error::Error for Error {}

/// A non-fatal observation made while processing one table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Warning {
    pub table_index: usize,
    pub message: String,
}

impl Warning {
    pub fn new(table_index: usize, message: impl Into<String>) -> Self {
        Warning {
            table_index,
            message: message.into(),
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "table {}: {}", self.table_index, self.message)
    }
}
