//! Plain-text file formats for matrices, update streams, and step reports.
//!
//! All three formats are line-oriented UTF-8. Outside the report CSV,
//! blank lines and lines whose first non-whitespace character is `#` are
//! ignored everywhere (before the header too), values are separated by
//! whitespace, and parse failures carry the 1-based raw line number —
//! counting every physical line, skipped or not.
//!
//! Floating-point values are written with the shortest decimal
//! representation that parses back to the identical bits, so every
//! write/read round trip is lossless, subnormals included. Non-finite
//! values are rejected on both sides.
//!
//! ```text
//! matrix file            update stream           report CSV
//! ───────────            ─────────────           ──────────
//! rows cols              n p                     step,kind,…,wall_time_ns
//! x11 … x1c              a1 … an b1 … bp         0,Generic,…,3120
//! …                      …                       …
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::streaming::StepReport;
use crate::update::{OutcomeKind, RankOneUpdate};

/// Column order of the report CSV, also its mandatory header line.
pub const REPORT_HEADER: &str = "step,kind,distance,ortho_drift,recon_residual,wall_time_ns";

// ─── shared scanning helpers ─────────────────────────────────────────────

/// Iterator over the content lines of a text file: skips blank and `#`
/// comment lines while tracking raw 1-based line numbers.
struct ContentLines<'a> {
    lines: std::str::Lines<'a>,
    consumed: usize,
}

impl<'a> ContentLines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines(),
            consumed: 0,
        }
    }

    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for line in self.lines.by_ref() {
            self.consumed += 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Some((self.consumed, trimmed));
        }
        None
    }

    /// Line number to report when the file ends before expected content:
    /// one past the last physical line.
    fn end_line(&self) -> usize {
        self.consumed + 1
    }
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: String) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_finite(path: &Path, line: usize, token: &str) -> Result<f64> {
    let value: f64 = token
        .parse()
        .map_err(|_| parse_error(path, line, format!("invalid number {token:?}")))?;
    if !value.is_finite() {
        return Err(parse_error(
            path,
            line,
            format!("non-finite value {token:?} is not allowed"),
        ));
    }
    Ok(value)
}

fn parse_count(path: &Path, line: usize, token: &str, what: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| parse_error(path, line, format!("invalid {what} {token:?}")))
}

/// Parses a `"rows cols"`-style two-integer header and rejects zeros.
fn parse_dims_header(
    path: &Path,
    lines: &mut ContentLines<'_>,
    names: (&str, &str),
) -> Result<(usize, usize)> {
    let (line_no, line) = lines
        .next_content()
        .ok_or_else(|| parse_error(path, lines.end_line(), "missing header line"))?;
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != 2 {
        return Err(parse_error(
            path,
            line_no,
            format!(
                "expected header \"{} {}\", found {} token(s)",
                names.0,
                names.1,
                tokens.len()
            ),
        ));
    }
    let first = parse_count(path, line_no, tokens[0], names.0)?;
    let second = parse_count(path, line_no, tokens[1], names.1)?;
    if first == 0 || second == 0 {
        return Err(Error::DimensionMismatch {
            context: "text header",
            expected: "positive dimensions".into(),
            got: format!("{first}x{second}"),
        });
    }
    Ok((first, second))
}

fn reject_trailing(path: &Path, lines: &mut ContentLines<'_>) -> Result<()> {
    if let Some((line_no, _)) = lines.next_content() {
        return Err(parse_error(path, line_no, "unexpected trailing content"));
    }
    Ok(())
}

fn require_finite(value: f64, what: &str) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::InvalidConfig {
            message: format!("cannot serialize non-finite {what} ({value})"),
        });
    }
    Ok(value)
}

// ─── matrices ────────────────────────────────────────────────────────────

/// Writes a matrix as a `"rows cols"` header followed by one line per row.
///
/// # Errors
/// [`Error::Io`] on filesystem failure; [`Error::InvalidConfig`] if an
/// entry is not finite.
pub fn write_matrix(path: &Path, m: &Matrix<f64>) -> Result<()> {
    let mut text = String::new();
    let _ = writeln!(text, "{} {}", m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = require_finite(m.at(i, j), "matrix entry")?;
            if j > 0 {
                text.push(' ');
            }
            let _ = write!(text, "{v}");
        }
        text.push('\n');
    }
    write_text(path, text)
}

/// Reads a matrix written by [`write_matrix`] (or by hand in the same
/// format).
///
/// # Example
/// ```
/// use orthup::io::{read_matrix, write_matrix};
/// use orthup::Matrix;
///
/// let dir = tempfile::tempdir().unwrap();
/// let path = dir.path().join("m.txt");
/// std::fs::write(&path, "# identity\n2 2\n1 0\n0 1\n").unwrap();
/// let m = read_matrix(&path).unwrap();
/// assert_eq!(m, Matrix::identity(2));
///
/// write_matrix(&path, &m).unwrap();
/// assert_eq!(read_matrix(&path).unwrap(), m);
/// ```
///
/// # Errors
/// [`Error::Io`] on filesystem failure; [`Error::Parse`] (with the raw
/// 1-based line number) for a malformed header, a row with the wrong
/// entry count, an unparsable or non-finite value, missing rows, or
/// trailing content; [`Error::DimensionMismatch`] for zero dimensions.
pub fn read_matrix(path: &Path) -> Result<Matrix<f64>> {
    let text = read_text(path)?;
    let mut lines = ContentLines::new(&text);
    let (rows, cols) = parse_dims_header(path, &mut lines, ("rows", "cols"))?;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (line_no, line) = lines.next_content().ok_or_else(|| {
            parse_error(
                path,
                lines.end_line(),
                format!("expected a row with {cols} entries"),
            )
        })?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != cols {
            return Err(parse_error(
                path,
                line_no,
                format!("expected {cols} entries, found {}", tokens.len()),
            ));
        }
        for token in tokens {
            data.push(parse_finite(path, line_no, token)?);
        }
    }
    reject_trailing(path, &mut lines)?;
    Ok(Matrix::from_fn(rows, cols, |i, j| data[i * cols + j]))
}

// ─── update streams ──────────────────────────────────────────────────────

/// Writes a stream of updates as an `"n p"` header followed by one record
/// per line, each holding the `n` entries of `a` then the `p` entries of
/// `b`.
///
/// # Errors
/// [`Error::DimensionMismatch`] when a record does not have `a` of length
/// `n` and `b` of length `p` (or when `n`/`p` is zero); [`Error::Io`] /
/// [`Error::InvalidConfig`] as for [`write_matrix`].
pub fn write_update_stream(
    path: &Path,
    n: usize,
    p: usize,
    updates: &[RankOneUpdate<f64>],
) -> Result<()> {
    if n == 0 || p == 0 {
        return Err(Error::DimensionMismatch {
            context: "write_update_stream",
            expected: "positive dimensions".into(),
            got: format!("{n}x{p}"),
        });
    }
    let mut text = String::new();
    let _ = writeln!(text, "{n} {p}");
    for (idx, up) in updates.iter().enumerate() {
        if up.a.len() != n || up.b.len() != p {
            return Err(Error::DimensionMismatch {
                context: "write_update_stream",
                expected: format!("record {idx} with a of length {n}, b of length {p}"),
                got: format!("a of length {}, b of length {}", up.a.len(), up.b.len()),
            });
        }
        for (k, v) in up.a.iter().chain(up.b.iter()).enumerate() {
            let v = require_finite(*v, "update entry")?;
            if k > 0 {
                text.push(' ');
            }
            let _ = write!(text, "{v}");
        }
        text.push('\n');
    }
    write_text(path, text)
}

/// Reads an update stream written by [`write_update_stream`], returning
/// the declared dimensions and the records in file order. A file with
/// only the header yields an empty list.
///
/// # Example
/// ```
/// use orthup::io::read_update_stream;
///
/// let dir = tempfile::tempdir().unwrap();
/// let path = dir.path().join("s.txt");
/// std::fs::write(&path, "2 1\n0 1 1\n").unwrap();
/// let (n, p, updates) = read_update_stream(&path).unwrap();
/// assert_eq!((n, p), (2, 1));
/// assert_eq!(updates.len(), 1);
/// assert_eq!(updates[0].a.as_slice(), &[0.0, 1.0]);
/// assert_eq!(updates[0].b.as_slice(), &[1.0]);
/// ```
///
/// # Errors
/// As [`read_matrix`]: I/O, malformed or zero-dimension header, records
/// with the wrong token count, unparsable or non-finite values.
pub fn read_update_stream(path: &Path) -> Result<(usize, usize, Vec<RankOneUpdate<f64>>)> {
    let text = read_text(path)?;
    let mut lines = ContentLines::new(&text);
    let (n, p) = parse_dims_header(path, &mut lines, ("n", "p"))?;
    let mut updates = Vec::new();
    while let Some((line_no, line)) = lines.next_content() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != n + p {
            return Err(parse_error(
                path,
                line_no,
                format!(
                    "expected {} entries ({n} for a, {p} for b), found {}",
                    n + p,
                    tokens.len()
                ),
            ));
        }
        let mut values = Vec::with_capacity(n + p);
        for token in tokens {
            values.push(parse_finite(path, line_no, token)?);
        }
        let b = values.split_off(n);
        updates.push(RankOneUpdate {
            a: Vector::from_vec(values).expect("n ≥ 1 entries, all validated finite"),
            b: Vector::from_vec(b).expect("p ≥ 1 entries, all validated finite"),
        });
    }
    Ok((n, p, updates))
}

// ─── step reports ────────────────────────────────────────────────────────

/// Writes step reports as CSV under the mandatory [`REPORT_HEADER`]. A
/// missing reconstruction residual serializes as an empty field.
///
/// # Errors
/// [`Error::Io`] on filesystem failure; [`Error::InvalidConfig`] if a
/// metric is not finite.
pub fn write_report(path: &Path, reports: &[StepReport]) -> Result<()> {
    let mut text = String::new();
    text.push_str(REPORT_HEADER);
    text.push('\n');
    for r in reports {
        let distance = require_finite(r.distance, "distance")?;
        let drift = require_finite(r.ortho_drift, "ortho_drift")?;
        let _ = write!(text, "{},{},{distance},{drift},", r.step_index, r.kind);
        if let Some(recon) = r.recon_residual {
            let recon = require_finite(recon, "recon_residual")?;
            let _ = write!(text, "{recon}");
        }
        let _ = writeln!(text, ",{}", r.wall_time_ns);
    }
    write_text(path, text)
}

/// Reads a report CSV written by [`write_report`].
///
/// # Example
/// ```
/// use orthup::io::{read_report, write_report};
/// use orthup::{OutcomeKind, StepReport};
///
/// let dir = tempfile::tempdir().unwrap();
/// let path = dir.path().join("r.csv");
/// let rows = vec![StepReport {
///     step_index: 0,
///     kind: OutcomeKind::Generic,
///     distance: 0.25,
///     ortho_drift: 1e-15,
///     recon_residual: None,
///     wall_time_ns: 310,
/// }];
/// write_report(&path, &rows).unwrap();
/// assert_eq!(read_report(&path).unwrap(), rows);
/// ```
///
/// # Errors
/// [`Error::Io`] on filesystem failure; [`Error::Parse`] for a missing or
/// wrong header, a row without exactly six fields, unparsable values,
/// non-finite or negative metrics, or an unknown outcome kind.
pub fn read_report(path: &Path) -> Result<Vec<StepReport>> {
    let text = read_text(path)?;
    let mut lines = ContentLines::new(&text);
    let (line_no, header) = lines
        .next_content()
        .ok_or_else(|| parse_error(path, lines.end_line(), "missing report header"))?;
    if header != REPORT_HEADER {
        return Err(parse_error(
            path,
            line_no,
            format!("expected header {REPORT_HEADER:?}, found {header:?}"),
        ));
    }
    let mut reports = Vec::new();
    while let Some((line_no, line)) = lines.next_content() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(parse_error(
                path,
                line_no,
                format!("expected 6 comma-separated fields, found {}", fields.len()),
            ));
        }
        let step_index = parse_count(path, line_no, fields[0], "step index")?;
        let kind: OutcomeKind = fields[1]
            .parse()
            .map_err(|_| parse_error(path, line_no, format!("unknown outcome kind {:?}", fields[1])))?;
        let metric = |token: &str, what: &str| -> Result<f64> {
            let v = parse_finite(path, line_no, token)?;
            if v < 0.0 {
                return Err(parse_error(path, line_no, format!("negative {what} {token:?}")));
            }
            Ok(v)
        };
        let distance = metric(fields[2], "distance")?;
        let ortho_drift = metric(fields[3], "ortho_drift")?;
        let recon_residual = if fields[4].is_empty() {
            None
        } else {
            Some(metric(fields[4], "recon_residual")?)
        };
        let wall_time_ns: u64 = fields[5]
            .parse()
            .map_err(|_| parse_error(path, line_no, format!("invalid wall time {:?}", fields[5])))?;
        reports.push(StepReport {
            step_index,
            kind,
            distance,
            ortho_drift,
            recon_residual,
            wall_time_ns,
        });
    }
    Ok(reports)
}

// ─── tests ───────────────────────────────────────────────────────────────
