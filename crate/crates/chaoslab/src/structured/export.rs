//! Dense materialization exchange format.
//!
//! Operators are exported column-major as CSV with header `col,row,re,im`,
//! one entry per line, `.` as the decimal separator and `\n` line endings.
//! Floats are printed with Rust's shortest-round-trip formatting, so a
//! read-back reproduces the matrix bit for bit.

use crate::{Error, Result};
use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex;
use std::io::{BufRead, Write};

/// Write a dense matrix (real or complex scalars) in the exchange format.
pub fn write_dense_csv<T, W>(a: &DMatrix<T>, out: &mut W) -> Result<()>
where
    T: ComplexField<RealField = f64>,
    W: Write,
{
    writeln!(out, "col,row,re,im")?;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let v = a[(i, j)].clone();
            writeln!(out, "{},{},{},{}", j, i, v.clone().real(), v.imaginary())?;
        }
    }
    Ok(())
}

/// Read a matrix in the exchange format. Dimensions are inferred from the
/// maximal indices; every entry must be present exactly once.
pub fn read_dense_csv<R: BufRead>(input: R) -> Result<DMatrix<Complex<f64>>> {
    let mut entries: Vec<(usize, usize, Complex<f64>)> = Vec::new();
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidParameter("dense csv: empty input".into()))??;
    if header.trim() != "col,row,re,im" {
        return Err(Error::InvalidParameter(format!(
            "dense csv: unexpected header `{header}`"
        )));
    }
    let mut max_row = 0usize;
    let mut max_col = 0usize;
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let mut next = |what: &str| {
            parts
                .next()
                .ok_or_else(|| Error::InvalidParameter(format!("dense csv: missing {what} in `{line}`")))
        };
        let col: usize = parse(next("col")?, "col")?;
        let row: usize = parse(next("row")?, "row")?;
        let re: f64 = parse(next("re")?, "re")?;
        let im: f64 = parse(next("im")?, "im")?;
        max_row = max_row.max(row);
        max_col = max_col.max(col);
        entries.push((row, col, Complex::new(re, im)));
    }
    if entries.is_empty() {
        return Err(Error::InvalidParameter("dense csv: no entries".into()));
    }
    let (nrows, ncols) = (max_row + 1, max_col + 1);
    if entries.len() != nrows * ncols {
        return Err(Error::InvalidParameter(format!(
            "dense csv: {} entries for a {nrows}×{ncols} matrix",
            entries.len()
        )));
    }
    let mut seen = vec![false; nrows * ncols];
    let mut a = DMatrix::zeros(nrows, ncols);
    for (i, j, v) in entries {
        let flat = j * nrows + i;
        if seen[flat] {
            return Err(Error::InvalidParameter(format!(
                "dense csv: duplicate entry ({i}, {j})"
            )));
        }
        seen[flat] = true;
        a[(i, j)] = v;
    }
    Ok(a)
}

fn parse<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse::<T>()
        .map_err(|_| Error::InvalidParameter(format!("dense csv: bad {what} field `{s}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let a = DMatrix::from_fn(3, 4, |i, j| {
            Complex::new((i as f64 + 0.1) / 3.0, (j as f64 - 1.7) / 7.0)
        });
        let mut buf = Vec::new();
        write_dense_csv(&a, &mut buf).unwrap();
        let b = read_dense_csv(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn real_matrices_round_trip_through_complex() {
        let a = DMatrix::from_fn(2, 2, |i, j| 1.0 / (1.0 + i as f64 + 2.0 * j as f64));
        let mut buf = Vec::new();
        write_dense_csv(&a, &mut buf).unwrap();
        let b = read_dense_csv(std::io::Cursor::new(buf)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(b[(i, j)], Complex::new(a[(i, j)], 0.0));
            }
        }
    }
}
