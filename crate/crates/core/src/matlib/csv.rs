//! Plain CSV for matrices: one row per line, comma separated, 17 significant
//! digits, no header.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Formats a float with 17 significant digits; the text round-trips exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_matrix<W: Write>(mut w: W, m: &Matrix) -> Result<()> {
    let mut line = String::new();
    for i in 0..m.rows() {
        line.clear();
        for (j, x) in m.row(i).iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&fmt_f64(*x));
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn read_matrix<R: Read>(r: R) -> Result<Matrix> {
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (lineno, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let before = data.len();
        for field in line.split(',') {
            let x: f64 =
                field.trim().parse().map_err(|_| Error::Parse(format!("line {}: bad number {field:?}", lineno + 1)))?;
            if !x.is_finite() {
                return Err(Error::Parse(format!("line {}: non-finite entry {field:?}", lineno + 1)));
            }
            data.push(x);
        }
        let width = data.len() - before;
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => {
                return Err(Error::Parse(format!("line {}: expected {c} columns, found {width}", lineno + 1)))
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    Matrix::from_vec(rows, cols, data)
}

pub fn save_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_matrix(&mut w, m)?;
    w.flush()?;
    Ok(())
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let f = fs::File::open(path)?;
    read_matrix(f).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}
