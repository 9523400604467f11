//! Text formats for variance matrices.
//!
//! Two layouts are accepted, detected from the first non-blank line:
//!
//! * plain: a line holding `N` (or `M N` for a rectangular matrix) followed
//!   by one line of whitespace-separated values per row;
//! * CSV: a header `n=N` (or `m=M,n=N`) followed by comma-separated rows.
//!
//! Blank lines and lines starting with `#` are skipped.

use std::path::Path;

use thiserror::Error;

use crate::linalg::{Construction, LinalgError, VarianceMatrix};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error(transparent)]
    Matrix(#[from] LinalgError),
}

/// A dense row-major `rows x cols` matrix as read from disk.
#[derive(Clone, Debug, PartialEq)]
pub struct RectMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<f64>,
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_dim(token: &str, line: usize) -> Result<usize, ParseError> {
    token
        .trim()
        .parse::<usize>()
        .map_err(|_| syntax(line, format!("invalid dimension `{}`", token.trim())))
}

fn parse_header(header: &str, line: usize) -> Result<(usize, usize, bool), ParseError> {
    let h = header.trim();
    if h.starts_with("n=") || h.starts_with("m=") {
        let mut rows = None;
        let mut cols = None;
        for part in h.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| syntax(line, format!("malformed header field `{part}`")))?;
            match key.trim() {
                "m" => rows = Some(parse_dim(value, line)?),
                "n" => cols = Some(parse_dim(value, line)?),
                other => return Err(syntax(line, format!("unknown header field `{other}`"))),
            }
        }
        let cols = cols.ok_or_else(|| syntax(line, "header is missing `n=`"))?;
        Ok((rows.unwrap_or(cols), cols, true))
    } else {
        let dims: Vec<&str> = h.split_whitespace().collect();
        match dims.as_slice() {
            [n] => {
                let n = parse_dim(n, line)?;
                Ok((n, n, false))
            }
            [m, n] => Ok((parse_dim(m, line)?, parse_dim(n, line)?, false)),
            _ => Err(syntax(line, "first line must hold `N` or `M N`")),
        }
    }
}

pub fn parse_rect(text: &str) -> Result<RectMatrix, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| syntax(1, "empty matrix file"))?;
    let (rows, cols, csv) = parse_header(header, hline)?;
    if rows == 0 || cols == 0 {
        return Err(syntax(hline, "dimensions must be positive"));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (line, content) in lines {
        if seen == rows {
            return Err(syntax(line, format!("more than {rows} rows")));
        }
        let values: Vec<&str> = if csv {
            content.split(',').map(str::trim).collect()
        } else {
            content.split_whitespace().collect()
        };
        if values.len() != cols {
            return Err(syntax(
                line,
                format!("expected {cols} values, found {}", values.len()),
            ));
        }
        for v in values {
            let parsed = v
                .parse::<f64>()
                .map_err(|_| syntax(line, format!("invalid number `{v}`")))?;
            entries.push(parsed);
        }
        seen += 1;
    }
    if seen != rows {
        return Err(syntax(
            hline,
            format!("header announces {rows} rows but {seen} were found"),
        ));
    }
    Ok(RectMatrix {
        rows,
        cols,
        entries,
    })
}

pub fn parse_variance_matrix(text: &str, mode: Construction) -> Result<VarianceMatrix, ParseError> {
    let rect = parse_rect(text)?;
    if rect.rows != rect.cols {
        return Err(ParseError::NotSquare {
            rows: rect.rows,
            cols: rect.cols,
        });
    }
    Ok(VarianceMatrix::with_construction(rect.rows, rect.entries, mode)?)
}

fn read(path: &Path) -> Result<String, ParseError> {
    std::fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_variance_matrix(path: &Path, mode: Construction) -> Result<VarianceMatrix, ParseError> {
    parse_variance_matrix(&read(path)?, mode)
}

pub fn read_rect(path: &Path) -> Result<RectMatrix, ParseError> {
    parse_rect(&read(path)?)
}

/// Plain layout, values printed with round-trip precision.
pub fn to_plain(s: &VarianceMatrix) -> String {
    let mut out = format!("{}\n", s.n());
    for x in 0..s.n() {
        let row: Vec<String> = s.row(x).iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_and_csv_agree() {
        let plain = "2\n1 0.5\n0.5 2\n";
        let csv = "# comment\nn=2\n1,0.5\n0.5,2\n";
        let a = parse_variance_matrix(plain, Construction::Strict).unwrap();
        let b = parse_variance_matrix(csv, Construction::Strict).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.entries(), &[1.0, 0.5, 0.5, 2.0]);
    }

    #[test]
    fn rectangular_headers() {
        let r = parse_rect("2 3\n1 2 3\n4 5 6\n").unwrap();
        assert_eq!((r.rows, r.cols), (2, 3));
        let r = parse_rect("m=1,n=2\n1,2\n").unwrap();
        assert_eq!((r.rows, r.cols), (1, 2));
        assert!(matches!(
            parse_variance_matrix("2 3\n1 2 3\n4 5 6\n", Construction::Strict),
            Err(ParseError::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        match parse_rect("2\n1 2\n1 x\n") {
            Err(ParseError::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_rect("2\n1 2\n").is_err());
        assert!(parse_rect("2\n1 2\n1 2\n1 2\n").is_err());
        assert!(parse_rect("2\n1 2 3\n1 2 3\n").is_err());
        assert!(parse_rect("").is_err());
        assert!(parse_rect("0\n").is_err());
    }

    #[test]
    fn asymmetry_surfaces_indices() {
        let err = parse_variance_matrix("2\n0 1\n2 0\n", Construction::Strict).unwrap_err();
        assert!(err.to_string().contains("S[0][1]"), "{err}");
    }

    #[test]
    fn plain_writer_round_trips() {
        let s = VarianceMatrix::exp_profile(5).unwrap();
        let back = parse_variance_matrix(&to_plain(&s), Construction::Strict).unwrap();
        assert_eq!(s, back);
    }
}
