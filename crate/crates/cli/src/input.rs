//! Sequence files: one decimal height per line, or a JSON array of heights.

use std::fs;
use std::path::Path;

use serde_json::value::RawValue;
use thiserror::Error;

/// Most fractional digits a height may carry.
pub const MAX_FRACTION_DIGITS: usize = 12;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("element {index}: {msg}")]
    Element { index: usize, msg: String },
    #[error("invalid JSON array: {0}")]
    Json(#[from] serde_json::Error),
}

/// Parses a plain decimal such as `0.25` or `1`. Signs, exponents and more
/// than [`MAX_FRACTION_DIGITS`] fractional digits are refused.
pub fn parse_decimal(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let (int, frac) = match t.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (t, None),
    };
    if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("`{t}` is not a plain decimal"));
    }
    if let Some(f) = frac {
        if f.is_empty() || !f.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("`{t}` is not a plain decimal"));
        }
        if f.len() > MAX_FRACTION_DIGITS {
            return Err(format!(
                "`{t}` has {} fractional digits (at most {MAX_FRACTION_DIGITS})",
                f.len()
            ));
        }
    }
    t.parse::<f64>().map_err(|e| format!("`{t}`: {e}"))
}

/// Parses a JSON literal holding a height, either a number or a string.
pub fn parse_json_height(raw: &RawValue) -> Result<f64, String> {
    let text = raw.get().trim();
    if let Some(inner) = text.strip_prefix('"') {
        let s: String = serde_json::from_str(text).map_err(|e| e.to_string())?;
        debug_assert!(inner.ends_with('"'));
        return parse_decimal(&s);
    }
    parse_decimal(text)
}

pub fn parse_sequence(text: &str) -> Result<Vec<f64>, InputError> {
    if text.trim_start().starts_with('[') {
        let items: Vec<&RawValue> = serde_json::from_str(text)?;
        return items
            .iter()
            .enumerate()
            .map(|(index, raw)| {
                parse_json_height(raw).map_err(|msg| InputError::Element { index, msg })
            })
            .collect();
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        })
        .map(|(i, l)| parse_decimal(l).map_err(|msg| InputError::Line { line: i + 1, msg }))
        .collect()
}

pub fn read_sequence(path: &Path) -> Result<Vec<f64>, InputError> {
    let text = fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_sequence(&text)
}

/// Writes heights one per line in a form [`parse_sequence`] reads back exactly.
pub fn format_sequence(heights: &[f64]) -> String {
    heights.iter().map(|h| format!("{h}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals() {
        assert_eq!(parse_decimal("0.3"), Ok(0.3));
        assert_eq!(parse_decimal(" 1 "), Ok(1.0));
        assert_eq!(parse_decimal("2"), Ok(2.0));
        assert_eq!(parse_decimal("0.123456789012"), Ok(0.123456789012));
        for bad in ["1e-3", "-0.2", "+0.2", ".5", "5.", "0.1234567890123", "nan", "inf", ""] {
            assert!(parse_decimal(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn lines_and_json_agree() {
        let a = parse_sequence("0.6\n0.3\n\n# comment\n0.2\n").unwrap();
        let b = parse_sequence("[0.6, 0.3, \"0.2\"]").unwrap();
        assert_eq!(a, vec![0.6, 0.3, 0.2]);
        assert_eq!(a, b);
    }

    #[test]
    fn errors_point_at_the_input() {
        let e = parse_sequence("0.1\n1e-3\n").unwrap_err();
        assert!(matches!(e, InputError::Line { line: 2, .. }), "{e}");
        let e = parse_sequence("[0.1, 2.5e-1]").unwrap_err();
        assert!(matches!(e, InputError::Element { index: 1, .. }), "{e}");
        assert!(matches!(parse_sequence("[0.1,"), Err(InputError::Json(_))));
    }

    #[test]
    fn formatting_round_trips() {
        let hs = vec![0.000123456789, 0.25, 0.612372435695, 1.0];
        assert_eq!(parse_sequence(&format_sequence(&hs)).unwrap(), hs);
    }
}
