//! Dense expression matrix and its tab-separated text format.
//!
//! The first line holds a corner label followed by column labels; every other
//! line holds a row label followed by one value per column. Blank or `NaN`
//! cells are filled with the mean of the observed values in their column.

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionMatrix {
    values: Vec<f64>,
    /// Column-major copy of `values` for column scans.
    columns: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Tsv,
}

impl ExpressionMatrix {
    /// Builds a matrix from row-major values. Every value must be finite.
    pub fn new(
        values: Vec<f64>,
        n_rows: usize,
        n_cols: usize,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
    ) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::InvalidMatrix(format!(
                "dimensions must be positive, got {n_rows}x{n_cols}"
            )));
        }
        if values.len() != n_rows * n_cols {
            return Err(Error::InvalidMatrix(format!(
                "{} values for a {n_rows}x{n_cols} matrix",
                values.len()
            )));
        }
        if row_labels.len() != n_rows || col_labels.len() != n_cols {
            return Err(Error::InvalidMatrix(format!(
                "{} row labels and {} column labels for a {n_rows}x{n_cols} matrix",
                row_labels.len(),
                col_labels.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "non-finite value at ({}, {})",
                pos / n_cols,
                pos % n_cols
            )));
        }
        let mut columns = vec![0.0; values.len()];
        for (i, v) in values.iter().enumerate() {
            columns[(i % n_cols) * n_rows + i / n_cols] = *v;
        }
        Ok(Self {
            values,
            columns,
            n_rows,
            n_cols,
            row_labels,
            col_labels,
        })
    }

    /// Builds a matrix with generated labels (`r0..`, `c0..`).
    pub fn from_values(values: Vec<f64>, n_rows: usize, n_cols: usize) -> Result<Self> {
        Self::new(
            values,
            n_rows,
            n_cols,
            (0..n_rows).map(|i| format!("r{i}")).collect(),
            (0..n_cols).map(|j| format!("c{j}")).collect(),
        )
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != n_cols) {
            return Err(Error::InvalidMatrix(format!(
                "row {i} has {} values, expected {n_cols}",
                rows[i].len()
            )));
        }
        Self::from_values(rows.concat(), n_rows, n_cols)
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n_cols + col]
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        let start = row * self.n_cols;
        &self.values[start..start + self.n_cols]
    }

    #[inline]
    pub fn col(&self, col: usize) -> &[f64] {
        let start = col * self.n_rows;
        &self.columns[start..start + self.n_rows]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    /// Writes the matrix as TSV. Values use the shortest representation that
    /// parses back to the identical `f64`.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "id")?;
        for label in &self.col_labels {
            write!(out, "\t{label}")?;
        }
        writeln!(out)?;
        for (r, label) in self.row_labels.iter().enumerate() {
            write!(out, "{label}")?;
            for v in self.row(r) {
                write!(out, "\t{v}")?;
            }
            writeln!(out)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_tsv(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_tsv(std::io::BufWriter::new(file))
    }

    pub fn load_tsv(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        load_matrix(file, MatrixFormat::Tsv)
    }
}

/// Result of reading a matrix, with the number of missing cells that were
/// imputed by column mean.
#[derive(Debug, Clone)]
pub struct LoadedMatrix {
    pub matrix: ExpressionMatrix,
    pub imputed_cells: usize,
}

pub fn load_matrix<R: Read>(source: R, format: MatrixFormat) -> Result<ExpressionMatrix> {
    let loaded = load_matrix_with_report(source, format)?;
    if loaded.imputed_cells > 0 {
        log::warn!(
            "{} missing cells replaced by their column mean",
            loaded.imputed_cells
        );
    }
    Ok(loaded.matrix)
}

pub fn load_matrix_with_report<R: Read>(source: R, format: MatrixFormat) -> Result<LoadedMatrix> {
    match format {
        MatrixFormat::Tsv => read_tsv(source),
    }
}

fn read_tsv<R: Read>(source: R) -> Result<LoadedMatrix> {
    let reader = BufReader::new(source);
    let mut lines = reader.lines().enumerate();

    let header = loop {
        match lines.next() {
            Some((_, line)) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break line;
                }
            }
            None => return Err(Error::InvalidMatrix("empty input".into())),
        }
    };
    let col_labels: Vec<String> = header
        .trim_end_matches('\r')
        .split('\t')
        .skip(1)
        .map(str::to_owned)
        .collect();
    let n_cols = col_labels.len();
    if n_cols == 0 {
        return Err(Error::InvalidMatrix("header has no column labels".into()));
    }

    let mut row_labels = Vec::new();
    // NaN marks a missing cell until imputation.
    let mut values: Vec<f64> = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let label = fields.next().unwrap_or_default();
        let cells: Vec<&str> = fields.collect();
        if cells.len() != n_cols {
            return Err(Error::InconsistentColumns {
                line: idx + 1,
                expected: n_cols + 1,
                found: cells.len() + 1,
            });
        }
        let row = row_labels.len();
        for (col, cell) in cells.iter().enumerate() {
            values.push(parse_cell(cell).ok_or_else(|| Error::Parse {
                row,
                col,
                value: (*cell).to_owned(),
            })?);
        }
        row_labels.push(label.to_owned());
    }
    let n_rows = row_labels.len();
    if n_rows == 0 {
        return Err(Error::InvalidMatrix("no data rows".into()));
    }

    let imputed_cells = impute_column_means(&mut values, n_rows, n_cols)?;
    let matrix = ExpressionMatrix::new(values, n_rows, n_cols, row_labels, col_labels)?;
    Ok(LoadedMatrix {
        matrix,
        imputed_cells,
    })
}

/// `Some(NaN)` for a missing cell, `None` for an unparseable one.
fn parse_cell(cell: &str) -> Option<f64> {
    let cell = cell.trim();
    if cell.is_empty() || cell.eq_ignore_ascii_case("nan") || cell.eq_ignore_ascii_case("na") {
        return Some(f64::NAN);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Some(v),
        _ => None,
    }
}

fn impute_column_means(values: &mut [f64], n_rows: usize, n_cols: usize) -> Result<usize> {
    let mut sums = vec![0.0; n_cols];
    let mut seen = vec![0usize; n_cols];
    for (i, v) in values.iter().enumerate() {
        if !v.is_nan() {
            sums[i % n_cols] += v;
            seen[i % n_cols] += 1;
        }
    }
    let mut imputed = 0;
    for (i, v) in values.iter_mut().enumerate() {
        if v.is_nan() {
            let col = i % n_cols;
            if seen[col] == 0 {
                return Err(Error::InvalidMatrix(format!(
                    "column {col} has no observed values"
                )));
            }
            *v = sums[col] / seen[col] as f64;
            imputed += 1;
        }
    }
    debug_assert_eq!(values.len(), n_rows * n_cols);
    Ok(imputed)
}
