// SPDX-License-Identifier: MIT OR Apache-2.0

//! Single-column numeric CSV reader.

use std::fs;
use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};
use wildseg_core::TimeSeries;

/// Parses one value per line. Blank lines are ignored, `\r\n` is accepted,
/// and a non-numeric first line is treated as a header.
pub fn parse_series(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    let mut seen_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let first = !seen_content;
        seen_content = true;
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(_) => bail!("line {}: non-finite value '{line}'", idx + 1),
            Err(_) if first => continue,
            Err(_) => bail!("line {}: cannot parse '{line}' as a number", idx + 1),
        }
    }
    Ok(values)
}

/// Reads a series from `path`, or standard input when `path` is `-`.
pub fn read_series(path: &Path) -> Result<TimeSeries> {
    let text = if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .context("reading standard input")?;
        buf
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    let values = parse_series(&text).with_context(|| format!("in {}", path.display()))?;
    if values.is_empty() {
        bail!("{}: no numeric values", path.display());
    }
    Ok(TimeSeries::new(values)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_blank_lines_and_crlf() {
        let v = parse_series("value\r\n1.5\r\n\r\n-2\r\n3e-1\n").unwrap();
        assert_eq!(v, vec![1.5, -2.0, 0.3]);
    }

    #[test]
    fn bad_line_reports_its_number() {
        let err = parse_series("1\n2\n\nabc\n").unwrap_err();
        assert!(err.to_string().contains("line 4"), "{err}");
        let err = parse_series("x\ny\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn rejects_nan() {
        assert!(parse_series("1\nNaN\n").is_err());
        assert!(parse_series("inf\n").is_err());
    }
}
