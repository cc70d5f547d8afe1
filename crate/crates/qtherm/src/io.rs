//! Column files and numeric formatting.
//!
//! Input files hold one real per line, optionally preceded by a header.
//! Files with several comma-separated columns (such as the table written
//! by `qtherm maxent --format csv`) are accepted when a header names the
//! requested column. Lines starting with `#` are comments.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: u64, message: String },
}

/// Reads the column `name` from `path`; see [`parse_column`].
pub fn read_column(path: &Path, name: &str) -> Result<Vec<f64>, ReadError> {
    let display = path.display().to_string();
    let file = File::open(path).map_err(|source| ReadError::Io { path: display.clone(), source })?;
    parse_column(file, name, &display)
}

/// Parses a single-column file, or the column called `name` when the header
/// row has several fields. A lone non-numeric first row is a header and must
/// equal `name`.
pub fn parse_column(reader: impl Read, name: &str, source: &str) -> Result<Vec<f64>, ReadError> {
    let mut rows = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let parse_err = |line: u64, message: String| ReadError::Parse { path: source.to_string(), line, message };

    let mut column: Option<usize> = None;
    let mut single = false;
    let mut values = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        match rows.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                return Err(parse_err(line, e.to_string()));
            }
        }
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let idx = match column {
            Some(idx) => idx,
            None => {
                let is_header = record.iter().any(|f| f.parse::<f64>().is_err());
                if is_header {
                    let idx = record
                        .iter()
                        .position(|f| f == name)
                        .ok_or_else(|| parse_err(line, format!("header has no column `{name}`")))?;
                    column = Some(idx);
                    continue;
                }
                column = Some(0);
                single = true;
                0
            }
        };
        if single && record.len() != 1 {
            return Err(parse_err(line, format!("expected one value, found {}", record.len())));
        }
        let field = record.get(idx).ok_or_else(|| parse_err(line, format!("missing column {}", idx + 1)))?;
        let value: f64 = field.parse().map_err(|_| parse_err(line, format!("`{field}` is not a number")))?;
        if !value.is_finite() {
            return Err(parse_err(line, format!("`{field}` is not finite")));
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(parse_err(0, "no values".to_string()));
    }
    Ok(values)
}

/// Decimal with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Writes a header and rows of already formatted fields.
pub fn write_csv<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()
}
