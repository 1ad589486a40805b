//! Shared helpers for the line-oriented formats.

use crate::error::{Error, Result};

/// Shortest decimal text that parses back to the same `f64`.
pub fn format_number(value: f64) -> String {
    if value == 0.0 {
        // normalizes -0
        return "0".to_string();
    }
    format!("{value}")
}

pub fn parse_number(text: &str, line: usize) -> Result<f64> {
    let value: f64 = text
        .parse()
        .map_err(|_| Error::parse(line, format!("`{text}` is not a number")))?;
    if !value.is_finite() {
        return Err(Error::parse(line, format!("`{text}` is not finite")));
    }
    Ok(value)
}

pub fn parse_index(text: &str, line: usize, what: &str) -> Result<usize> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(
            line,
            format!("{what} `{text}` is not a non-negative integer"),
        ));
    }
    text.parse()
        .map_err(|_| Error::parse(line, format!("{what} `{text}` is out of range")))
}

/// Tags, annotator ids and forms may not contain tab, newline or `|`.
pub fn check_field(text: &str, line: usize, what: &str) -> Result<()> {
    if text.is_empty() {
        return Err(Error::parse(line, format!("empty {what}")));
    }
    if text.contains(['\t', '\n', '\r', '|']) {
        return Err(Error::parse(
            line,
            format!("{what} `{text}` contains a reserved character"),
        ));
    }
    Ok(())
}

/// Iterates `(1-based line number, line)` over LF-separated text.
pub fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split_terminator('\n').enumerate().map(|(i, line)| (i + 1, line))
}

/// Splits `#key=value` into its parts.
pub fn directive(line: &str) -> Option<(&str, &str)> {
    line.strip_prefix('#')?.split_once('=')
}
