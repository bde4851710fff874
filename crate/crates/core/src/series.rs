use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered list of distinct column indices. A row matches the series when
/// its values strictly increase along it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct ColumnSeries(Vec<usize>);

impl ColumnSeries {
    pub fn new(cols: Vec<usize>) -> Result<Self> {
        if cols.len() < 2 {
            return Err(Error::InvalidSeries(format!(
                "length {} is below the minimum of 2",
                cols.len()
            )));
        }
        if has_duplicates(&cols) {
            return Err(Error::InvalidSeries(format!("duplicate columns in {cols:?}")));
        }
        Ok(Self(cols))
    }

    /// Like [`ColumnSeries::new`] but also checks every index is below `n_cols`.
    pub fn for_matrix(cols: Vec<usize>, n_cols: usize) -> Result<Self> {
        if let Some(&c) = cols.iter().find(|&&c| c >= n_cols) {
            return Err(Error::InvalidSeries(format!(
                "column {c} out of range for {n_cols} columns"
            )));
        }
        Self::new(cols)
    }

    pub(crate) fn from_vec_unchecked(cols: Vec<usize>) -> Self {
        debug_assert!(cols.len() >= 2 && !has_duplicates(&cols));
        Self(cols)
    }

    #[inline]
    pub fn cols(&self) -> &[usize] {
        &self.0
    }

    #[inline]
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, col: usize) -> bool {
        self.0.contains(&col)
    }

    pub fn reversed(&self) -> Self {
        let mut cols = self.0.clone();
        cols.reverse();
        Self(cols)
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

impl TryFrom<Vec<usize>> for ColumnSeries {
    type Error = Error;

    fn try_from(cols: Vec<usize>) -> Result<Self> {
        Self::new(cols)
    }
}

impl From<ColumnSeries> for Vec<usize> {
    fn from(s: ColumnSeries) -> Self {
        s.0
    }
}

impl AsRef<[usize]> for ColumnSeries {
    fn as_ref(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for ColumnSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn has_duplicates(cols: &[usize]) -> bool {
    if cols.len() <= 16 {
        return cols
            .iter()
            .enumerate()
            .any(|(i, c)| cols[i + 1..].contains(c));
    }
    let mut sorted = cols.to_vec();
    sorted.sort_unstable();
    sorted.windows(2).any(|w| w[0] == w[1])
}

/// True iff `values` taken in order satisfy `v[i] < v[i + 1] + epsilon` for
/// every adjacent pair. With `epsilon == 0` this is strict increase, so ties
/// break the run.
#[inline]
pub fn is_increasing(row: &[f64], cols: &[usize], epsilon: f64) -> bool {
    let mut prev = row[cols[0]];
    if epsilon == 0.0 {
        for &c in &cols[1..] {
            let v = row[c];
            if !(prev < v) {
                return false;
            }
            prev = v;
        }
    } else {
        for &c in &cols[1..] {
            let v = row[c];
            if !(prev < v + epsilon) {
                return false;
            }
            prev = v;
        }
    }
    true
}

/// Number of adjacent pairs along `cols` that are not strictly increasing.
pub fn count_violations(row: &[f64], cols: &[usize]) -> usize {
    cols.windows(2).filter(|w| !(row[w[0]] < row[w[1]])).count()
}
