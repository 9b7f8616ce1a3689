//! Deterministic artifact emission: CSV tables, JSON documents, and
//! content-hashed run manifests.
//!
//! Every experiment artifact is produced through this module so that the
//! on-disk contract is uniform and bit-exact:
//!
//! - CSV: comma separator, `.` decimal point, a header row always, LF line
//!   endings, and a trailing LF. Fields containing separators or quotes are
//!   quoted with doubled inner quotes. Floats use Rust's shortest
//!   round-trip decimal form.
//! - JSON: `serde_json` pretty form plus a trailing LF.
//! - Manifest: every emitted file is listed with its byte length and
//!   SHA-256 content hash next to the seed and the fully resolved
//!   configuration, so a run can be reproduced (and verified) from the
//!   manifest alone.
//!
//! [`emit`] is all-or-nothing: if any write fails, files already written
//! for the run are removed before the error is returned.

use crate::chaos::TailCurve;
use crate::recovery::PhaseDiagram;
use crate::rip::ScalingScan;
use crate::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// One CSV field.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    UInt(u64),
    Float(f64),
    Text(String),
    /// Rendered as an empty field.
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::UInt(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::UInt(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<Option<usize>> for Cell {
    fn from(v: Option<usize>) -> Self {
        v.map_or(Cell::Empty, |u| Cell::UInt(u as u64))
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') || field.contains('\r') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_owned()
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::UInt(v) => v.to_string(),
            Cell::Float(v) => format!("{v}"),
            Cell::Text(s) => csv_escape(s),
            Cell::Empty => String::new(),
        }
    }
}

/// An in-memory rectangular table with a fixed header, rendered to the
/// crate's CSV dialect by [`Table::to_csv`].
#[derive(Clone, Debug)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidParameter(
                "Table::new: need at least one column".into(),
            ));
        }
        Ok(Table {
            header: columns.iter().map(|c| c.as_ref().to_owned()).collect(),
            rows: Vec::new(),
        })
    }

    pub fn n_columns(&self) -> usize {
        self.header.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Append a row; its arity must match the header.
    pub fn push_row(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::DimensionMismatch(format!(
                "Table::push_row: {} cells for {} columns",
                row.len(),
                self.header.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Render the table: header row, then data rows, each line LF-terminated.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.header.iter().map(|h| csv_escape(h)).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

/// Pretty JSON with a trailing LF, for any serializable document.
pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::ConsistencyCheck(format!("JSON serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Lower-case hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// `t, empirical, bound` rows of a tail curve.
pub fn tail_curve_table(curve: &TailCurve) -> Result<Table> {
    let mut table = Table::new(&["t", "empirical", "bound"])?;
    for i in 0..curve.t.len() {
        table.push_row(vec![
            curve.t[i].into(),
            curve.empirical[i].into(),
            curve.bound[i].into(),
        ])?;
    }
    Ok(table)
}

/// Phase-diagram cells, one row per `(m, s)` grid point in storage order.
pub fn phase_table(diagram: &PhaseDiagram) -> Result<Table> {
    let mut table = Table::new(&["m", "s", "successes", "trials", "p_hat", "ci_lo", "ci_hi"])?;
    for cell in &diagram.cells {
        table.push_row(vec![
            cell.m.into(),
            cell.s.into(),
            cell.successes.into(),
            cell.trials.into(),
            cell.p_hat.into(),
            cell.ci.0.into(),
            cell.ci.1.into(),
        ])?;
    }
    Ok(table)
}

/// Minimal-measurement scaling rows: `s, m_star, f1, ratio`.
pub fn scaling_table(scan: &ScalingScan) -> Result<Table> {
    let mut table = Table::new(&["s", "m_star", "f1", "ratio"])?;
    for row in &scan.rows {
        table.push_row(vec![
            row.s.into(),
            row.m_star.into(),
            row.f1.into(),
            row.ratio.into(),
        ])?;
    }
    Ok(table)
}

/// A single emitted file as recorded in the manifest.
#[derive(Clone, Debug, Serialize)]
pub struct OutputRecord {
    /// File name relative to the manifest's directory.
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Run manifest: enough to reproduce and verify every file beside it.
///
/// Deliberately excludes the thread count and output location: outputs are
/// bitwise independent of both, and keeping them out of the manifest makes
/// whole-directory byte comparison a valid determinism check.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub subcommand: String,
    pub seed: u64,
    /// Fully resolved configuration after flag/file/default precedence.
    pub config: serde_json::Value,
    pub outputs: Vec<OutputRecord>,
}

/// File name of the manifest emitted beside each run's outputs.
pub const MANIFEST_FILE: &str = "manifest.json";

fn validate_artifact_name(name: &str) -> Result<()> {
    if name.is_empty()
        || name == MANIFEST_FILE
        || name.contains('/')
        || name.contains('\\')
        || name == "."
        || name == ".."
    {
        return Err(Error::InvalidParameter(format!(
            "artifact name {name:?} must be a plain file name distinct from {MANIFEST_FILE:?}"
        )));
    }
    Ok(())
}

/// Write `files` into `dir` together with a [`Manifest`] describing them.
///
/// The directory is created if missing. Writing is all-or-nothing: on any
/// failure every file written so far (including the manifest) is removed
/// and the error is returned. Returns the manifest that was written.
pub fn emit<C: Serialize>(
    dir: &Path,
    subcommand: &str,
    seed: u64,
    config: &C,
    files: &[(String, String)],
) -> Result<Manifest> {
    for (name, _) in files {
        validate_artifact_name(name)?;
    }
    let config_value = serde_json::to_value(config)
        .map_err(|e| Error::ConsistencyCheck(format!("config echo failed: {e}")))?;
    let manifest = Manifest {
        subcommand: subcommand.to_owned(),
        seed,
        config: config_value,
        outputs: files
            .iter()
            .map(|(name, content)| OutputRecord {
                file: name.clone(),
                bytes: content.len() as u64,
                sha256: sha256_hex(content.as_bytes()),
            })
            .collect(),
    };
    let manifest_text = to_json_pretty(&manifest)?;

    std::fs::create_dir_all(dir)?;
    let mut written: Vec<PathBuf> = Vec::with_capacity(files.len() + 1);
    let write_one = |path: PathBuf, content: &str, written: &mut Vec<PathBuf>| -> Result<()> {
        std::fs::write(&path, content)?;
        written.push(path);
        Ok(())
    };
    let mut run = || -> Result<()> {
        for (name, content) in files {
            write_one(dir.join(name), content, &mut written)?;
        }
        write_one(dir.join(MANIFEST_FILE), &manifest_text, &mut written)?;
        Ok(())
    };
    match run() {
        Ok(()) => Ok(manifest),
        Err(e) => {
            for path in written {
                let _ = std::fs::remove_file(path);
            }
            Err(e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_dialect_is_frozen() {
        let mut t = Table::new(&["t", "empirical", "bound"]).unwrap();
        t.push_row(vec![0.5.into(), 1.0.into(), Cell::Empty]).unwrap();
        t.push_row(vec![1.0.into(), 0.125.into(), f64::NAN.into()])
            .unwrap();
        assert_eq!(t.to_csv(), "t,empirical,bound\n0.5,1,\n1,0.125,NaN\n");
        assert_eq!(t.n_rows(), 2);
        assert_eq!(t.n_columns(), 3);
    }

    #[test]
    fn csv_escaping_rules() {
        let mut t = Table::new(&["a,b", "plain"]).unwrap();
        t.push_row(vec!["x\"y".into(), "line\nbreak".into()])
            .unwrap();
        assert_eq!(
            t.to_csv(),
            "\"a,b\",plain\n\"x\"\"y\",\"line\nbreak\"\n"
        );
    }

    #[test]
    fn row_arity_is_enforced() {
        let mut t = Table::new(&["only"]).unwrap();
        assert!(t.push_row(vec![1.0.into(), 2.0.into()]).is_err());
        assert!(Table::new::<&str>(&[]).is_err());
    }

    #[test]
    fn sha256_known_vectors() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn artifact_names_are_validated() {
        assert!(validate_artifact_name("tails.csv").is_ok());
        for bad in ["", MANIFEST_FILE, "a/b.csv", "a\\b.csv", ".", ".."] {
            assert!(validate_artifact_name(bad).is_err(), "accepted {bad:?}");
        }
    }
}
