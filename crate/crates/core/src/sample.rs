use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An immutable i.i.d. sample of fixed-width rows, stored column-major.
///
/// Every entry is finite and every column has the same length `n ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Sample {
    /// Builds a sample from columns with generated names `x0, x1, …`.
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let names = (0..columns.len()).map(|j| format!("x{j}")).collect();
        Self::named(names, columns)
    }

    pub fn named(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidOption("sample needs at least one column".into()));
        }
        if names.len() != columns.len() {
            return Err(Error::DimensionMismatch { expected: columns.len(), found: names.len() });
        }
        let n = columns[0].len();
        if n == 0 {
            return Err(Error::InsufficientSample { needed: 1, got: 0 });
        }
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::RaggedRows {
                    row: n.min(col.len()),
                    expected: n,
                    found: col.len(),
                });
            }
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row, column: j });
            }
        }
        Ok(Self { names, columns })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.is_empty() {
            return Err(Error::InsufficientSample { needed: 1, got: 0 });
        }
        let mut columns = vec![Vec::with_capacity(rows.len()); width];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::RaggedRows { row: i, expected: width, found: row.len() });
            }
            for (col, v) in columns.iter_mut().zip(row) {
                col.push(*v);
            }
        }
        Self::from_columns(columns)
    }

    pub fn univariate(values: Vec<f64>) -> Result<Self> {
        Self::named(vec!["x".into()], vec![values])
    }

    pub fn pairs(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Self::named(vec!["x".into(), "y".into()], vec![x, y])
    }

    pub fn n(&self) -> usize {
        self.columns[0].len()
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> Result<&[f64]> {
        self.columns
            .get(j)
            .map(Vec::as_slice)
            .ok_or(Error::ColumnOutOfRange { column: j, width: self.width() })
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// A new sample made of the given rows, in order, repeats allowed.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InsufficientSample { needed: 1, got: 0 });
        }
        let columns = self
            .columns
            .iter()
            .map(|c| indices.iter().map(|&i| c[i]).collect())
            .collect();
        Ok(Self { names: self.names.clone(), columns })
    }

    pub fn select_columns(&self, which: &[usize]) -> Result<Self> {
        let mut names = Vec::with_capacity(which.len());
        let mut columns = Vec::with_capacity(which.len());
        for &j in which {
            columns.push(self.column(j)?.to_vec());
            names.push(self.names[j].clone());
        }
        Self::named(names, columns)
    }

    pub(crate) fn require_width(&self, width: usize) -> Result<()> {
        if self.width() != width {
            return Err(Error::DimensionMismatch { expected: width, found: self.width() });
        }
        Ok(())
    }

    pub(crate) fn require_n(&self, needed: usize) -> Result<()> {
        if self.n() < needed {
            return Err(Error::InsufficientSample { needed, got: self.n() });
        }
        Ok(())
    }
}
