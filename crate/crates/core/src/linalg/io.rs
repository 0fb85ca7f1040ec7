//! Plain-text matrix format.
//!
//! ```text
//! # optional comments
//! 2 2
//! 7.07106781186547573e-1,0.00000000000000000e0 7.07106781186547573e-1,0.00000000000000000e0
//! 7.07106781186547573e-1,0.00000000000000000e0 -7.07106781186547573e-1,0.00000000000000000e0
//! ```

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Serializes with 18 significant digits per component, which round-trips
/// every `f64` exactly.
pub fn format_matrix(m: &ComplexMatrix, comments: &[String]) -> String {
    let mut out = String::new();
    for line in comments {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(out, "{} {}", m.rows(), m.cols());
    for r in 0..m.rows() {
        let line: Vec<String> = m
            .row(r)
            .iter()
            .map(|z| format!("{:.17e},{:.17e}", z.re, z.im))
            .collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line_no, header) = lines
        .next()
        .ok_or_else(|| Error::parse(0, "missing `rows cols` header"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::parse(line_no, format!("bad header: {e}")))?;
    let [rows, cols] = dims[..] else {
        return Err(Error::parse(line_no, "header must be `rows cols`"));
    };

    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(0, format!("expected {rows} rows")))?;
        let before = data.len();
        for token in line.split_whitespace() {
            data.push(parse_entry(token).map_err(|m| Error::parse(line_no, m))?);
        }
        if data.len() - before != cols {
            return Err(Error::parse(
                line_no,
                format!("expected {cols} entries, found {}", data.len() - before),
            ));
        }
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(Error::parse(line_no, "trailing data after matrix rows"));
    }
    ComplexMatrix::from_vec(rows, cols, data)
}

fn parse_entry(token: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = token
        .split_once(',')
        .ok_or_else(|| format!("entry `{token}` is not a `re,im` pair"))?;
    let re: f64 = re.parse().map_err(|e| format!("`{re}`: {e}"))?;
    let im: f64 = im.parse().map_err(|e| format!("`{im}`: {e}"))?;
    Ok(Complex64::new(re, im))
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix(&text)
}

pub fn write_matrix(path: impl AsRef<Path>, m: &ComplexMatrix, comments: &[String]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_matrix(m, comments)).map_err(|e| Error::io(path, e))
}
