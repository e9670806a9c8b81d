//! CSV loading for dense matrices, signals and edge lists.
//!
//! All readers accept an optional single header row and skip `#` comment
//! lines. Edge lists use 1-based node indices on disk.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::{Matrix, Vector};

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(r)
}

fn numeric_rows<R: Read>(r: R) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (idx, rec) in reader(r).records().enumerate() {
        let rec = rec?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) if idx == 0 => continue,
            Err(e) => {
                return Err(Error::Parse {
                    row: idx + 1,
                    msg: e.to_string(),
                })
            }
        }
    }
    Ok(rows)
}

/// Reads a row-major dense matrix.
pub fn read_matrix<R: Read>(r: R) -> Result<Matrix> {
    let rows = numeric_rows(r)?;
    let ncols = rows.first().map_or(0, Vec::len);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::Parse {
                row: i + 1,
                msg: format!("expected {ncols} columns, found {}", row.len()),
            });
        }
    }
    Ok(Matrix::from_row_iterator(rows.len(), ncols, rows.into_iter().flatten()))
}

/// Reads a signal stored either as one column or as one row.
pub fn read_vector<R: Read>(r: R) -> Result<Vector> {
    let m = read_matrix(r)?;
    match m.shape() {
        (_, 1) => Ok(m.column(0).into_owned()),
        (1, _) => Ok(m.row(0).transpose()),
        (r, c) => Err(Error::Parse {
            row: 0,
            msg: format!("expected a single row or column, found {r}x{c}"),
        }),
    }
}

/// An edge list with optional weights; indices are 0-based in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub edges: Vec<(usize, usize)>,
    pub weights: Option<Vec<f64>>,
}

/// Reads `i,j[,w]` rows with 1-based indices.
pub fn read_edges<R: Read>(r: R) -> Result<EdgeList> {
    let rows = numeric_rows(r)?;
    let mut edges = Vec::with_capacity(rows.len());
    let mut weights = Vec::with_capacity(rows.len());
    let weighted = rows.first().is_some_and(|r| r.len() == 3);
    for (idx, row) in rows.iter().enumerate() {
        let expected = if weighted { 3 } else { 2 };
        if row.len() != expected {
            return Err(Error::Parse {
                row: idx + 1,
                msg: format!("expected {expected} fields"),
            });
        }
        let index = |v: f64| -> Result<usize> {
            if v.fract() != 0.0 || v < 1.0 {
                return Err(Error::Parse {
                    row: idx + 1,
                    msg: format!("node index {v} is not a positive integer"),
                });
            }
            Ok(v as usize - 1)
        };
        edges.push((index(row[0])?, index(row[1])?));
        if weighted {
            weights.push(row[2]);
        }
    }
    Ok(EdgeList {
        edges,
        weights: weighted.then_some(weights),
    })
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    read_matrix(std::fs::File::open(path)?)
}

pub fn load_vector(path: impl AsRef<Path>) -> Result<Vector> {
    read_vector(std::fs::File::open(path)?)
}

pub fn load_edges(path: impl AsRef<Path>) -> Result<EdgeList> {
    read_edges(std::fs::File::open(path)?)
}
