//! Dense Matrix Market reader and writer.
//!
//! Reads `array` and `coordinate` files with `real` or `complex` fields and
//! `general` symmetry. Coordinate entries are expanded to a dense matrix and
//! repeated coordinates are summed. Writes `array complex general` with every
//! component in `{:.16e}` form, which round-trips `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use blockkrylov::{c64, Matrix, Scalar};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MmError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported Matrix Market format: {0}")]
    UnsupportedFormat(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn parse_err(line: usize, message: impl Into<String>) -> MmError {
    MmError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
}

impl Field {
    fn width(self) -> usize {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
        }
    }
}

pub fn read_matrix_market(path: &Path) -> Result<Matrix, MmError> {
    let text = fs::read_to_string(path).map_err(|source| MmError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

/// Parses Matrix Market text. Line numbers in errors are 1-based.
pub fn parse(text: &str) -> Result<Matrix, MmError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let (layout, field) = parse_header(hline, header)?;

    // data lines: skip comments and blank lines
    let mut data = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (sline, size) = data
        .next()
        .ok_or_else(|| parse_err(hline + 1, "missing size line"))?;
    let dims = parse_usizes(sline, size)?;

    match layout {
        Layout::Array => {
            let [rows, cols] = dims[..] else {
                return Err(parse_err(sline, "array size line needs `rows cols`"));
            };
            let total = rows * cols;
            let mut entries = vec![c64(0.0, 0.0); total];
            let mut count = 0;
            for (line, text) in data {
                if count == total {
                    return Err(parse_err(line, "more entries than declared"));
                }
                let v = parse_value(line, text.split_whitespace(), field)?;
                // column-major on disk
                let (i, j) = (count % rows.max(1), count / rows.max(1));
                entries[i * cols + j] = v;
                count += 1;
            }
            if count != total {
                return Err(parse_err(
                    text.lines().count().max(1),
                    format!("expected {total} entries, found {count}"),
                ));
            }
            build(rows, cols, entries, sline)
        }
        Layout::Coordinate => {
            let [rows, cols, nnz] = dims[..] else {
                return Err(parse_err(
                    sline,
                    "coordinate size line needs `rows cols nnz`",
                ));
            };
            let mut entries = vec![c64(0.0, 0.0); rows * cols];
            let mut count = 0;
            for (line, text) in data {
                if count == nnz {
                    return Err(parse_err(line, "more entries than declared"));
                }
                let mut tokens = text.split_whitespace();
                let i = parse_index(line, tokens.next(), rows)?;
                let j = parse_index(line, tokens.next(), cols)?;
                let v = parse_value(line, tokens, field)?;
                entries[i * cols + j] += v;
                count += 1;
            }
            if count != nnz {
                return Err(parse_err(
                    text.lines().count().max(1),
                    format!("expected {nnz} entries, found {count}"),
                ));
            }
            build(rows, cols, entries, sline)
        }
    }
}

fn build(rows: usize, cols: usize, entries: Vec<Scalar>, line: usize) -> Result<Matrix, MmError> {
    Matrix::new(rows, cols, entries).map_err(|e| parse_err(line, e.to_string()))
}

fn parse_header(line: usize, header: &str) -> Result<(Layout, Field), MmError> {
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(parse_err(
            line,
            "header must be `%%MatrixMarket matrix <format> <field> <symmetry>`",
        ));
    }
    if tokens[1] != "matrix" {
        return Err(MmError::UnsupportedFormat(format!(
            "object `{}`",
            tokens[1]
        )));
    }
    let layout = match tokens[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(MmError::UnsupportedFormat(format!("format `{other}`"))),
    };
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "complex" => Field::Complex,
        other => return Err(MmError::UnsupportedFormat(format!("field `{other}`"))),
    };
    if tokens[4] != "general" {
        return Err(MmError::UnsupportedFormat(format!(
            "symmetry `{}`",
            tokens[4]
        )));
    }
    Ok((layout, field))
}

fn parse_usizes(line: usize, text: &str) -> Result<Vec<usize>, MmError> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| parse_err(line, format!("invalid integer `{t}`")))
        })
        .collect()
}

fn parse_index(line: usize, token: Option<&str>, limit: usize) -> Result<usize, MmError> {
    let t = token.ok_or_else(|| parse_err(line, "missing index"))?;
    let k: usize = t
        .parse()
        .map_err(|_| parse_err(line, format!("invalid index `{t}`")))?;
    if k == 0 || k > limit {
        return Err(parse_err(line, format!("index {k} outside 1..={limit}")));
    }
    Ok(k - 1)
}

fn parse_value<'a>(
    line: usize,
    tokens: impl Iterator<Item = &'a str>,
    field: Field,
) -> Result<Scalar, MmError> {
    let parts: Vec<&str> = tokens.collect();
    if parts.len() != field.width() {
        return Err(parse_err(
            line,
            format!("expected {} value(s), found {}", field.width(), parts.len()),
        ));
    }
    let mut vals = [0.0; 2];
    for (slot, t) in vals.iter_mut().zip(&parts) {
        *slot = t
            .parse::<f64>()
            .map_err(|_| parse_err(line, format!("invalid number `{t}`")))?;
        if !slot.is_finite() {
            return Err(parse_err(line, format!("non-finite value `{t}`")));
        }
    }
    Ok(c64(vals[0], vals[1]))
}

/// Canonical text for `m`.
pub fn format_matrix_market(m: &Matrix) -> String {
    let (rows, cols) = m.shape();
    let mut out = String::with_capacity(48 * rows * cols + 64);
    out.push_str("%%MatrixMarket matrix array complex general\n");
    let _ = writeln!(out, "{rows} {cols}");
    for j in 0..cols {
        for i in 0..rows {
            let z = m[(i, j)];
            let _ = writeln!(out, "{:.16e} {:.16e}", z.re, z.im);
        }
    }
    out
}

pub fn write_matrix_market(m: &Matrix, path: &Path) -> Result<(), MmError> {
    fs::write(path, format_matrix_market(m)).map_err(|source| MmError::Io {
        path: path.display().to_string(),
        source,
    })
}
