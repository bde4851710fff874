//! Compressed Biclusters Format: a whole population packed into two flat
//! arrays, in the spirit of compressed row storage.
//!
//! `offsets` has one entry per individual plus a trailing sentinel, so
//! individual `p` occupies `col_indices[offsets[p]..offsets[p + 1]]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{has_duplicates, ColumnSeries};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CbfPopulation {
    offsets: Vec<usize>,
    col_indices: Vec<usize>,
}

impl CbfPopulation {
    /// Wraps raw arrays after checking they describe a valid population.
    pub fn from_parts(offsets: Vec<usize>, col_indices: Vec<usize>) -> Result<Self> {
        if offsets.len() < 2 {
            return Err(Error::CorruptCbf("fewer than two offsets".into()));
        }
        if offsets[0] != 0 {
            return Err(Error::CorruptCbf(format!(
                "first offset is {}, expected 0",
                offsets[0]
            )));
        }
        if let Some(w) = offsets.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::CorruptCbf(format!(
                "offsets not strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        let end = *offsets.last().unwrap();
        if end != col_indices.len() {
            return Err(Error::CorruptCbf(format!(
                "sentinel offset {end} but {} column indices",
                col_indices.len()
            )));
        }
        for w in offsets.windows(2) {
            let slice = &col_indices[w[0]..w[1]];
            if slice.len() < 2 || has_duplicates(slice) {
                return Err(Error::CorruptCbf(format!(
                    "slice {:?} at offset {} is not a valid series",
                    slice, w[0]
                )));
            }
        }
        Ok(Self {
            offsets,
            col_indices,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn get(&self, p: usize) -> &[usize] {
        &self.col_indices[self.offsets[p]..self.offsets[p + 1]]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.offsets
            .windows(2)
            .map(move |w| &self.col_indices[w[0]..w[1]])
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    /// Largest column index referenced, if any.
    pub fn max_col(&self) -> Option<usize> {
        self.col_indices.iter().copied().max()
    }
}

pub fn encode_population<'a, I>(individuals: I) -> Result<CbfPopulation>
where
    I: IntoIterator<Item = &'a ColumnSeries>,
{
    let mut offsets = vec![0];
    let mut col_indices = Vec::new();
    for s in individuals {
        // ColumnSeries is valid by construction; re-check cheaply in debug.
        debug_assert!(s.len() >= 2 && !has_duplicates(s.cols()));
        col_indices.extend_from_slice(s.cols());
        offsets.push(col_indices.len());
    }
    if offsets.len() == 1 {
        return Err(Error::EmptyPopulation);
    }
    Ok(CbfPopulation {
        offsets,
        col_indices,
    })
}

/// Encodes raw column lists, validating each as a series.
pub fn encode_raw(individuals: &[Vec<usize>]) -> Result<CbfPopulation> {
    let series = individuals
        .iter()
        .map(|cols| ColumnSeries::new(cols.clone()))
        .collect::<Result<Vec<_>>>()?;
    encode_population(&series)
}

pub fn decode_population(cbf: &CbfPopulation) -> Vec<ColumnSeries> {
    cbf.iter()
        .map(|s| ColumnSeries::from_vec_unchecked(s.to_vec()))
        .collect()
}
