//! Shared helpers for the CSV and key=value text formats.
//!
//! All numeric CSV fields are written as decimal floating point with 17
//! significant digits, which round-trips every f64 exactly and keeps
//! artifacts byte-stable across runs.

use crate::error::{Error, Result};

/// Formats with 17 significant digits (1 leading + 16 fractional).
pub(crate) fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("{what}: expected a number, got {s:?}")))
}

pub(crate) fn parse_usize(s: &str, what: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| Error::Parse(format!("{what}: expected a non-negative integer, got {s:?}")))
}

pub(crate) fn parse_u64(s: &str, what: &str) -> Result<u64> {
    s.trim()
        .parse::<u64>()
        .map_err(|_| Error::Parse(format!("{what}: expected a 64-bit unsigned integer, got {s:?}")))
}
