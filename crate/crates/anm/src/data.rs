//! Sample matrices with named columns.
//!
//! CSV exchange: header row of column names, one sample per row, decimal
//! point '.', no thousands separators. Parse failures abort with row and
//! column diagnostics rather than skipping records.

use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};

/// An n x p matrix of i.i.d. samples, column-major storage.
#[derive(Clone, Debug)]
pub struct Dataset {
    names: Vec<String>,
    /// columns[j] has length n for every j.
    columns: Vec<Vec<f64>>,
    n: usize,
}

impl Dataset {
    /// Build from columns; validates finiteness, name uniqueness, and
    /// equal column lengths (n >= 2).
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Dataset> {
        if names.len() != columns.len() {
            return Err(Error::RaggedColumns {
                col: names.len().min(columns.len()),
                got: columns.len(),
                expect: names.len(),
            });
        }
        if columns.is_empty() {
            return Err(Error::EmptyData);
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        let n = columns[0].len();
        if n < 2 {
            return Err(Error::TooFewRows { need: 2, got: n });
        }
        for (col, column) in columns.iter().enumerate() {
            if column.len() != n {
                return Err(Error::RaggedColumns { col, got: column.len(), expect: n });
            }
            for (row, &v) in column.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row, col });
                }
            }
        }
        Ok(Dataset { names, columns, n })
    }

    /// Build from columns with default names x0..x{p-1}.
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Dataset> {
        let names = (0..columns.len()).map(|j| format!("x{j}")).collect();
        Dataset::new(names, columns)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.columns[col][row]
    }

    /// Rows restricted to `keep`, preserving order. Used for seeded
    /// subsampling of oversized samples.
    pub fn select_rows(&self, keep: &[usize]) -> Result<Dataset> {
        let columns = self
            .columns
            .iter()
            .map(|c| keep.iter().map(|&r| c[r]).collect())
            .collect();
        Dataset::new(self.names.clone(), columns)
    }

    pub fn read_csv(path: &Path) -> Result<Dataset> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(csv_io)?;
        let names: Vec<String> =
            reader.headers().map_err(csv_io)?.iter().map(str::to_owned).collect();
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(csv_io)?;
            if record.len() != names.len() {
                return Err(Error::CsvParse {
                    row,
                    col: record.len(),
                    msg: format!("expected {} fields, got {}", names.len(), record.len()),
                });
            }
            for (col, field) in record.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| Error::CsvParse {
                    row,
                    col,
                    msg: format!("not a number: `{field}`"),
                })?;
                columns[col].push(v);
            }
        }
        Dataset::new(names, columns)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut writer = csv::Writer::from_path(path).map_err(csv_io)?;
        writer.write_record(&self.names).map_err(csv_io)?;
        let mut record = Vec::with_capacity(self.p());
        for row in 0..self.n {
            record.clear();
            for col in &self.columns {
                record.push(format!("{}", col[row]));
            }
            writer.write_record(&record).map_err(csv_io)?;
        }
        writer.flush()?;
        Ok(())
    }
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
