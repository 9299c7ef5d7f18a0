//! Line-oriented text formats shared by the series, grid and distribution
//! files: UTF-8, `#` comment lines, period decimal separator.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: expected `{expected}`, found `{found}`")]
    UnexpectedKey {
        line: usize,
        expected: &'static str,
        found: String,
    },
    #[error("line {line}: `{token}` is not a decimal number")]
    BadNumber { line: usize, token: String },
    #[error("line {line}: `{key}` expects {expected}")]
    WrongArity {
        line: usize,
        key: &'static str,
        expected: &'static str,
    },
    #[error("missing `{0}` line")]
    MissingLine(&'static str),
    #[error("line {line}: unexpected trailing content")]
    Trailing { line: usize },
}

/// Non-blank, non-comment lines with their 1-based line numbers.
pub(crate) fn content_lines(input: &str) -> impl Iterator<Item = (usize, &str)> {
    input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_number(line: usize, token: &str) -> Result<f64, ParseError> {
    // Rust's parser also accepts "inf"/"nan"; those are rejected downstream
    // by the finiteness checks of each type.
    token.parse::<f64>().map_err(|_| ParseError::BadNumber {
        line,
        token: token.to_string(),
    })
}

/// Reads a `key v1 v2 ...` line and returns its numeric values.
pub(crate) fn keyed_values<'a, I>(lines: &mut I, key: &'static str) -> Result<Vec<f64>, ParseError>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let (line, text) = lines.next().ok_or(ParseError::MissingLine(key))?;
    let mut tokens = text.split_whitespace();
    let found = tokens.next().unwrap_or_default();
    if found != key {
        return Err(ParseError::UnexpectedKey {
            line,
            expected: key,
            found: found.to_string(),
        });
    }
    tokens.map(|t| parse_number(line, t)).collect()
}

pub(crate) fn keyed_scalar<'a, I>(lines: &mut I, key: &'static str) -> Result<f64, ParseError>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let (line, text) = lines.next().ok_or(ParseError::MissingLine(key))?;
    let mut tokens = text.split_whitespace();
    let found = tokens.next().unwrap_or_default();
    if found != key {
        return Err(ParseError::UnexpectedKey {
            line,
            expected: key,
            found: found.to_string(),
        });
    }
    match (tokens.next(), tokens.next()) {
        (Some(t), None) => parse_number(line, t),
        _ => Err(ParseError::WrongArity {
            line,
            key,
            expected: "exactly one value",
        }),
    }
}

pub(crate) fn expect_end<'a, I>(lines: &mut I) -> Result<(), ParseError>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    match lines.next() {
        Some((line, _)) => Err(ParseError::Trailing { line }),
        None => Ok(()),
    }
}

/// Shortest round-trippable decimal form.
pub(crate) fn fmt_decimal(v: f64) -> String {
    format!("{v:?}")
}
