//! Matrix Market coordinate reader (pattern only).

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

use super::pattern::SparsePattern;

/// Symmetry recorded in the banner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    General,
    Symmetric,
    /// skew-symmetric or hermitian: values differ between triangles but the
    /// pattern is still symmetric and only one triangle is stored.
    PatternSymmetric,
}

/// Entries exactly as stored in the file, 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTriplets {
    pub n_rows: usize,
    pub n_cols: usize,
    pub entries: Vec<(usize, usize)>,
    pub symmetry: Symmetry,
}

#[derive(Debug, Error)]
pub enum MatrixMarketError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Banner { line: usize, msg: String },
    #[error("line {line}: malformed size line")]
    Size { line: usize },
    #[error("line {line}: malformed entry")]
    Entry { line: usize },
    #[error("line {line}: index ({row}, {col}) outside {n_rows}x{n_cols}")]
    IndexOutOfRange {
        line: usize,
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },
    #[error("line {line}: expected {expected} entries, found {found}")]
    Truncated { line: usize, expected: usize, found: usize },
}

/// Reads a Matrix Market file from disk.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<RawTriplets, MatrixMarketError> {
    let file = File::open(path)?;
    parse_matrix_market(BufReader::new(file))
}

/// Parses a coordinate-format Matrix Market stream, keeping only the pattern.
///
/// Comment lines (`%`) and blank lines are skipped. Numerical values after the
/// two indices are ignored.
pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<RawTriplets, MatrixMarketError> {
    let mut lines = reader.lines().enumerate();

    let (banner_line, banner) = match lines.next() {
        Some((i, line)) => (i + 1, line?),
        None => {
            return Err(MatrixMarketError::Banner {
                line: 1,
                msg: "empty input".into(),
            })
        }
    };
    let symmetry = parse_banner(&banner, banner_line)?;

    let mut size = None;
    let mut last_line = banner_line;
    for (i, line) in lines.by_ref() {
        let line = line?;
        last_line = i + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(MatrixMarketError::Size { line: i + 1 });
        }
        let parse = |s: &str| s.parse::<usize>().map_err(|_| MatrixMarketError::Size { line: i + 1 });
        size = Some((parse(fields[0])?, parse(fields[1])?, parse(fields[2])?));
        break;
    }
    let (n_rows, n_cols, nnz) = size.ok_or(MatrixMarketError::Size { line: last_line + 1 })?;

    let mut entries = Vec::with_capacity(nnz);
    for (i, line) in lines {
        let line = line?;
        last_line = i + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        if entries.len() == nnz {
            // trailing data beyond the declared count
            return Err(MatrixMarketError::Entry { line: i + 1 });
        }
        let mut it = t.split_whitespace();
        let mut index = || -> Result<usize, MatrixMarketError> {
            it.next()
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or(MatrixMarketError::Entry { line: i + 1 })
        };
        let row = index()?;
        let col = index()?;
        if row == 0 || col == 0 || row > n_rows || col > n_cols {
            return Err(MatrixMarketError::IndexOutOfRange {
                line: i + 1,
                row,
                col,
                n_rows,
                n_cols,
            });
        }
        entries.push((row, col));
    }
    if entries.len() < nnz {
        return Err(MatrixMarketError::Truncated {
            line: last_line + 1,
            expected: nnz,
            found: entries.len(),
        });
    }

    Ok(RawTriplets {
        n_rows,
        n_cols,
        entries,
        symmetry,
    })
}

/// Writes `p` as a `pattern symmetric` file, lower triangle only.
pub fn write_matrix_market<W: Write>(p: &SparsePattern, mut out: W) -> std::io::Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate pattern symmetric")?;
    writeln!(out, "{} {} {}", p.n(), p.n(), p.nnz_offdiag() / 2)?;
    for (u, v) in p.edges() {
        writeln!(out, "{} {}", v + 1, u + 1)?;
    }
    out.flush()
}

fn parse_banner(banner: &str, line: usize) -> Result<Symmetry, MatrixMarketError> {
    let err = |msg: &str| MatrixMarketError::Banner {
        line,
        msg: msg.to_string(),
    };
    let lower = banner.trim().to_ascii_lowercase();
    let fields: Vec<&str> = lower.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" {
        return Err(err("missing %%MatrixMarket banner"));
    }
    if fields[1] != "matrix" {
        return Err(err("only 'matrix' objects are supported"));
    }
    if fields[2] != "coordinate" {
        return Err(err("only coordinate format is supported"));
    }
    match fields[3] {
        "real" | "integer" | "complex" | "pattern" => {}
        other => return Err(err(&format!("unknown field '{other}'"))),
    }
    match fields[4] {
        "general" => Ok(Symmetry::General),
        "symmetric" => Ok(Symmetry::Symmetric),
        "skew-symmetric" | "hermitian" => Ok(Symmetry::PatternSymmetric),
        other => Err(err(&format!("unknown symmetry '{other}'"))),
    }
}
