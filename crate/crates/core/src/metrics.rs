//! Recovery and relevance of found biclusters against ground truth.
//!
//! Biclusters are compared as sets of matrix cells. Recovery averages, over
//! the expected biclusters, the best Jaccard index against any found one;
//! relevance does the same from the found side. Both are normalised by the
//! size of the set averaged over, so they lie in `[0, 1]`.

use serde::Serialize;

use crate::bicluster::IndexBicluster;
use crate::error::{Error, Result};

/// Row and column index sets, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellBlock {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl CellBlock {
    pub fn new(mut rows: Vec<usize>, mut cols: Vec<usize>) -> Self {
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        Self { rows, cols }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn cells(&self) -> usize {
        self.rows.len() * self.cols.len()
    }
}

impl From<&IndexBicluster> for CellBlock {
    fn from(b: &IndexBicluster) -> Self {
        Self::new(b.rows.clone(), b.columns.clone())
    }
}

fn sorted_intersection(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Cell-level Jaccard index. The cell set of a bicluster is the product of
/// its rows and columns, so the intersection is the product of the row and
/// column intersections.
pub fn jaccard(a: &CellBlock, b: &CellBlock) -> Result<f64> {
    let inter = sorted_intersection(&a.rows, &b.rows) * sorted_intersection(&a.cols, &b.cols);
    let union = a.cells() + b.cells() - inter;
    if union == 0 {
        return Err(Error::UndefinedJaccard);
    }
    Ok(inter as f64 / union as f64)
}

fn best_matches(from: &[CellBlock], against: &[CellBlock]) -> Result<Vec<f64>> {
    from.iter()
        .map(|x| {
            against
                .iter()
                .map(|y| jaccard(x, y))
                .try_fold(0.0f64, |best, j| j.map(|j| best.max(j)))
        })
        .collect()
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

pub fn recovery(expected: &[CellBlock], found: &[CellBlock]) -> Result<f64> {
    if expected.is_empty() {
        return Err(Error::EmptyExpected);
    }
    Ok(mean(&best_matches(expected, found)?))
}

pub fn relevance(expected: &[CellBlock], found: &[CellBlock]) -> Result<f64> {
    if expected.is_empty() {
        return Err(Error::EmptyExpected);
    }
    if found.is_empty() {
        log::warn!("no biclusters found; relevance reported as 0");
    }
    Ok(mean(&best_matches(found, expected)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    #[serde(serialize_with = "crate::bicluster::six_decimals")]
    pub recovery: f64,
    #[serde(serialize_with = "crate::bicluster::six_decimals")]
    pub relevance: f64,
    /// Best Jaccard of each expected bicluster against the found ones.
    pub per_expected: Vec<f64>,
    /// Best Jaccard of each found bicluster against the expected ones.
    pub per_found: Vec<f64>,
}

pub fn score(expected: &[IndexBicluster], found: &[IndexBicluster]) -> Result<ScoreReport> {
    let expected: Vec<CellBlock> = expected.iter().map(CellBlock::from).collect();
    let found: Vec<CellBlock> = found.iter().map(CellBlock::from).collect();
    if expected.is_empty() {
        return Err(Error::EmptyExpected);
    }
    if found.is_empty() {
        log::warn!("no biclusters found; recovery and relevance are 0");
    }
    let per_expected = best_matches(&expected, &found)?;
    let per_found = best_matches(&found, &expected)?;
    let round = |v: Vec<f64>| v.into_iter().map(|x| (x * 1e6).round() / 1e6).collect();
    Ok(ScoreReport {
        recovery: mean(&per_expected),
        relevance: mean(&per_found),
        per_expected: round(per_expected),
        per_found: round(per_found),
    })
}
