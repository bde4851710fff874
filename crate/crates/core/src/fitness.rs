//! Row counting and scoring of column series.
//!
//! Rows are split into contiguous chunks; each chunk counts, for every
//! individual of a population, how many of its rows increase along the
//! individual's series. Partial counts are summed, so the result does not
//! depend on how the rows were partitioned or how many workers ran.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cbf::CbfPopulation;
use crate::error::{Error, Result};
use crate::matrix::ExpressionMatrix;
use crate::series::{is_increasing, ColumnSeries};

/// A partition of `[0, n_rows)` into contiguous half-open ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkPlan {
    chunks: Vec<Range<usize>>,
    worker_count: usize,
}

impl ChunkPlan {
    /// `workers` equal chunks of `ceil(n_rows / workers)` rows (the last one
    /// may be shorter). `workers == 0` means one per available CPU.
    pub fn new(n_rows: usize, workers: usize) -> Self {
        let worker_count = resolve_workers(workers);
        let size = n_rows.div_ceil(worker_count).max(1);
        let chunks = (0..n_rows)
            .step_by(size)
            .map(|lo| lo..(lo + size).min(n_rows))
            .collect();
        Self {
            chunks,
            worker_count,
        }
    }

    /// Explicit partition; the ranges must tile `[0, n_rows)` in order.
    pub fn from_ranges(chunks: Vec<Range<usize>>, n_rows: usize, worker_count: usize) -> Result<Self> {
        if worker_count == 0 {
            return Err(Error::InvalidChunkPlan("worker count must be positive".into()));
        }
        let mut next = 0;
        for r in &chunks {
            if r.start != next || r.end <= r.start {
                return Err(Error::InvalidChunkPlan(format!(
                    "range {r:?} does not continue at row {next}"
                )));
            }
            next = r.end;
        }
        if next != n_rows {
            return Err(Error::InvalidChunkPlan(format!(
                "ranges cover {next} of {n_rows} rows"
            )));
        }
        Ok(Self {
            chunks,
            worker_count,
        })
    }

    pub fn chunks(&self) -> &[Range<usize>] {
        &self.chunks
    }

    pub fn worker_count(&self) -> usize {
        self.worker_count
    }
}

pub fn resolve_workers(requested: usize) -> usize {
    if requested > 0 {
        requested
    } else {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessParams {
    /// Minimum expected number of rows; fewer rows are penalised exponentially.
    pub sigma: usize,
    /// Tolerance of the increasing rule: a row passes when each value is
    /// below the next one plus `epsilon`. Zero means strict increase.
    pub epsilon: f64,
}

impl FitnessParams {
    pub fn new(sigma: usize) -> Result<Self> {
        let p = Self { sigma, epsilon: 0.0 };
        p.validate()?;
        Ok(p)
    }

    /// `max(ceil(0.02 * n_rows), 4)`.
    pub fn default_sigma(n_rows: usize) -> usize {
        (n_rows * 2).div_ceil(100).max(4)
    }

    pub fn for_rows(n_rows: usize) -> Self {
        Self {
            sigma: Self::default_sigma(n_rows),
            epsilon: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma < 2 {
            return Err(Error::InvalidConfig(format!("sigma must be >= 2, got {}", self.sigma)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be finite and non-negative, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Strict increase of `row` along `series`.
pub fn row_matches(matrix: &ExpressionMatrix, row: usize, series: &ColumnSeries) -> bool {
    is_increasing(matrix.row(row), series.cols(), 0.0)
}

/// Score of a series of length `series_len` matched by `match_count` rows:
///
/// `2^min(|I| - sigma, 0) * |J| * ln(|I| - 1)` for `|I| > 1`, else 0.
pub fn fitness(match_count: u64, series_len: usize, params: &FitnessParams) -> f64 {
    if match_count <= 1 {
        return 0.0;
    }
    let rows = match_count as f64;
    let exponent = (rows - params.sigma as f64).min(0.0);
    let score = exponent.exp2() * series_len as f64 * (rows - 1.0).ln();
    score.max(0.0)
}

/// Per-individual count of matching rows, reduced over the plan's chunks.
pub fn count_matches(
    matrix: &ExpressionMatrix,
    population: &CbfPopulation,
    plan: &ChunkPlan,
) -> Vec<u64> {
    count_matches_eps(matrix, population, plan, 0.0)
}

pub fn count_matches_eps(
    matrix: &ExpressionMatrix,
    population: &CbfPopulation,
    plan: &ChunkPlan,
    epsilon: f64,
) -> Vec<u64> {
    let p = population.len();
    if plan.worker_count() == 1 || plan.chunks().len() == 1 {
        let mut counts = vec![0u64; p];
        for chunk in plan.chunks() {
            count_chunk(matrix, population, chunk.clone(), epsilon, &mut counts);
        }
        return counts;
    }
    plan.chunks()
        .par_iter()
        .map(|chunk| {
            let mut counts = vec![0u64; p];
            count_chunk(matrix, population, chunk.clone(), epsilon, &mut counts);
            counts
        })
        .reduce(
            || vec![0u64; p],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

fn count_chunk(
    matrix: &ExpressionMatrix,
    population: &CbfPopulation,
    rows: Range<usize>,
    epsilon: f64,
    counts: &mut [u64],
) {
    let mut alive = vec![0u32; rows.len()];
    for (count, series) in counts.iter_mut().zip(population.iter()) {
        let n = if epsilon == 0.0 {
            count_series::<true>(matrix, series, rows.clone(), 0.0, &mut alive)
        } else {
            count_series::<false>(matrix, series, rows.clone(), epsilon, &mut alive)
        };
        *count += n as u64;
    }
}

#[inline(always)]
fn below<const STRICT: bool>(a: f64, b: f64, epsilon: f64) -> bool {
    if STRICT {
        a < b
    } else {
        a < b + epsilon
    }
}

/// Rows of `rows` increasing along `series`. The first pass tests up to two
/// adjacent pairs and records surviving rows in `alive`; each later pair
/// compacts that list in place.
fn count_series<const STRICT: bool>(
    matrix: &ExpressionMatrix,
    series: &[usize],
    rows: Range<usize>,
    epsilon: f64,
    alive: &mut [u32],
) -> usize {
    let col = |c: usize| &matrix.col(c)[rows.clone()];
    let a = col(series[0]);
    let b = col(series[1]);
    let mut n = 0;
    let rest = if series.len() >= 3 {
        let c = col(series[2]);
        for (i, ((x, y), z)) in a.iter().zip(b).zip(c).enumerate() {
            alive[n] = i as u32;
            n += (below::<STRICT>(*x, *y, epsilon) & below::<STRICT>(*y, *z, epsilon)) as usize;
        }
        &series[2..]
    } else {
        for (i, (x, y)) in a.iter().zip(b).enumerate() {
            alive[n] = i as u32;
            n += below::<STRICT>(*x, *y, epsilon) as usize;
        }
        &series[1..]
    };
    for w in rest.windows(2) {
        if n == 0 {
            break;
        }
        let a = col(w[0]);
        let b = col(w[1]);
        let mut kept = 0;
        for j in 0..n {
            let i = alive[j];
            alive[kept] = i;
            kept += below::<STRICT>(a[i as usize], b[i as usize], epsilon) as usize;
        }
        n = kept;
    }
    n
}

pub fn evaluate_population(
    matrix: &ExpressionMatrix,
    population: &CbfPopulation,
    plan: &ChunkPlan,
    params: &FitnessParams,
) -> Vec<f64> {
    count_matches_eps(matrix, population, plan, params.epsilon)
        .into_iter()
        .zip(population.iter())
        .map(|(n, s)| fitness(n, s.len(), params))
        .collect()
}

/// Owns the worker pool and chunk plan used for repeated evaluation of
/// populations against one matrix.
pub struct FitnessEngine<'m> {
    matrix: &'m ExpressionMatrix,
    plan: ChunkPlan,
    params: FitnessParams,
    pool: Option<rayon::ThreadPool>,
}

impl<'m> FitnessEngine<'m> {
    pub fn new(matrix: &'m ExpressionMatrix, params: FitnessParams, workers: usize) -> Result<Self> {
        params.validate()?;
        let plan = ChunkPlan::new(matrix.n_rows(), workers);
        let pool = if plan.worker_count() > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(plan.worker_count())
                    .build()
                    .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?,
            )
        } else {
            None
        };
        Ok(Self {
            matrix,
            plan,
            params,
            pool,
        })
    }

    pub fn params(&self) -> &FitnessParams {
        &self.params
    }

    pub fn plan(&self) -> &ChunkPlan {
        &self.plan
    }

    pub fn matrix(&self) -> &ExpressionMatrix {
        self.matrix
    }

    pub fn count(&self, population: &CbfPopulation) -> Vec<u64> {
        let eps = self.params.epsilon;
        match &self.pool {
            Some(pool) => pool.install(|| count_matches_eps(self.matrix, population, &self.plan, eps)),
            None => count_matches_eps(self.matrix, population, &self.plan, eps),
        }
    }

    pub fn evaluate(&self, population: &CbfPopulation) -> Vec<f64> {
        self.count(population)
            .into_iter()
            .zip(population.iter())
            .map(|(n, s)| fitness(n, s.len(), &self.params))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cbf::encode_raw;

    fn params(sigma: usize) -> FitnessParams {
        FitnessParams::new(sigma).unwrap()
    }

    #[test]
    fn fitness_hand_values() {
        assert_eq!(fitness(1, 7, &params(10)), 0.0);
        assert_eq!(fitness(0, 7, &params(10)), 0.0);
        assert_eq!(fitness(2, 5, &params(10)), 0.0);
        // 5 * ln 19
        assert!((fitness(20, 5, &params(10)) - 14.722_194_895_832_2).abs() < 1e-9);
        // 2^-2 * 4 * ln 7
        assert!((fitness(8, 4, &params(10)) - 1.945_910_149_055_313).abs() < 1e-9);
    }

    #[test]
    fn sigma_default() {
        assert_eq!(FitnessParams::default_sigma(150), 4);
        assert_eq!(FitnessParams::default_sigma(1000), 20);
        assert_eq!(FitnessParams::default_sigma(201), 5);
        assert!(FitnessParams::new(1).is_err());
    }

    #[test]
    fn chunk_plan_tiles_rows() {
        let plan = ChunkPlan::new(10, 3);
        assert_eq!(plan.chunks(), &[0..4, 4..8, 8..10]);
        let plan = ChunkPlan::new(2, 8);
        assert_eq!(plan.chunks(), &[0..1, 1..2]);
        assert!(ChunkPlan::from_ranges(vec![0..3, 4..10], 10, 2).is_err());
        assert!(ChunkPlan::from_ranges(vec![0..3, 3..9], 10, 2).is_err());
        assert!(ChunkPlan::from_ranges(vec![0..3, 3..10], 10, 2).is_ok());
    }

    #[test]
    fn small_counts() {
        let m = ExpressionMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0], vec![3.0, 4.0]]).unwrap();
        let pop = encode_raw(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(count_matches(&m, &pop, &ChunkPlan::new(3, 1)), vec![2, 1]);
        assert_eq!(count_matches(&m, &pop, &ChunkPlan::new(3, 2)), vec![2, 1]);

        let flat = ExpressionMatrix::from_rows(&[vec![5.0; 4], vec![-1.0; 4]]).unwrap();
        let pop = encode_raw(&[vec![0, 1], vec![3, 2, 1], vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(count_matches(&flat, &pop, &ChunkPlan::new(2, 1)), vec![0, 0, 0]);
    }

    #[test]
    fn row_rule() {
        let m = ExpressionMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 2.0, 3.0]]).unwrap();
        let s = ColumnSeries::new(vec![0, 1, 2]).unwrap();
        assert!(row_matches(&m, 0, &s));
        assert!(!row_matches(&m, 1, &s));
    }

    #[test]
    fn unmatched_series_scores_zero() {
        let m = ExpressionMatrix::from_rows(&[vec![3.0, 2.0, 1.0]]).unwrap();
        let pop = encode_raw(&[vec![0, 1, 2]]).unwrap();
        let f = evaluate_population(&m, &pop, &ChunkPlan::new(1, 1), &params(4));
        assert_eq!(f, vec![0.0]);
    }
}
