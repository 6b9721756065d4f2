//! CSV tables, atomic file writes and the run manifest.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem.
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("table `{0}` is empty")]
    EmptyTable(String),
    #[error("table `{name}` row {row} has {got} cells, header has {expected}")]
    Ragged {
        name: String,
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl Table {
    pub fn new(name: impl Into<String>, header: Vec<&'static str>) -> Self {
        Self {
            name: name.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    /// 17 significant digits, `.` separator, LF endings.
    pub fn to_csv(&self) -> Result<String, OutputError> {
        if self.rows.is_empty() {
            return Err(OutputError::EmptyTable(self.name.clone()));
        }
        let mut out = self.header.join(",");
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.header.len() {
                return Err(OutputError::Ragged {
                    name: self.name.clone(),
                    row: i,
                    got: row.len(),
                    expected: self.header.len(),
                });
            }
            for (k, cell) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Num(v) => write!(out, "{v:.16e}"),
                    Cell::Int(v) => write!(out, "{v}"),
                    Cell::Text(s) => write!(out, "{s}"),
                }
                .expect("string write");
            }
            out.push('\n');
        }
        Ok(out)
    }
}

/// Writes through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), OutputError> {
    let io = |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = path.parent().unwrap_or(Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp"));
    let mut f = std::fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub parse_ms: f64,
    pub compute_ms: f64,
    pub write_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config_sha256: String,
    pub versions: Versions,
    pub timings: Timings,
    pub warnings: Vec<String>,
    pub artifacts: Vec<String>,
    pub summary: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub whq: &'static str,
    pub wh_quant: &'static str,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        write!(s, "{b:02x}").expect("string write");
        s
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_seventeen_digits() {
        let mut t = Table::new("t", vec!["index", "value", "label"]);
        let vals = [std::f64::consts::PI, -1e-300, 0.1 + 0.2, 6.02214076e23];
        for (i, v) in vals.iter().enumerate() {
            t.push(vec![i.into(), (*v).into(), "x".into()]);
        }
        let csv = t.to_csv().unwrap();
        assert!(csv.starts_with("index,value,label\n"));
        assert!(!csv.contains('\r'));
        for (line, v) in csv.lines().skip(1).zip(vals) {
            let parsed: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert_eq!(parsed.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn empty_and_ragged_tables_are_errors() {
        let t = Table::new("e", vec!["a"]);
        assert!(matches!(t.to_csv(), Err(OutputError::EmptyTable(_))));
        let mut t = Table::new("r", vec!["a", "b"]);
        t.push(vec![1.0.into()]);
        assert!(matches!(t.to_csv(), Err(OutputError::Ragged { .. })));
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn sha_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
