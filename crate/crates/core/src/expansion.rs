//! Turning ranked series into biclusters: exact row assignment, then
//! optional expansion with rows that follow the reversed series (negative
//! trend) or follow the series up to a few violated steps (approximate).
//!
//! "Approximate" here means at most `approx_violations` adjacent pairs along
//! the series fail the strict increase. Expansion never changes fitness,
//! which keeps describing the exact core.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bicluster::{Bicluster, RowFlag};
use crate::evolution::TopRankList;
use crate::fitness::ChunkPlan;
use crate::matrix::ExpressionMatrix;
use crate::series::{count_violations, is_increasing, ColumnSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionOptions {
    pub allow_negative: bool,
    pub approx_violations: usize,
}

impl Default for ExpansionOptions {
    fn default() -> Self {
        Self {
            allow_negative: true,
            approx_violations: 1,
        }
    }
}

impl ExpansionOptions {
    pub fn disabled() -> Self {
        Self {
            allow_negative: false,
            approx_violations: 0,
        }
    }
}

/// Rows strictly increasing along `series`, ascending.
pub fn assign_rows(matrix: &ExpressionMatrix, series: &ColumnSeries) -> Vec<usize> {
    assign_rows_eps(matrix, series, 0.0)
}

pub fn assign_rows_eps(matrix: &ExpressionMatrix, series: &ColumnSeries, epsilon: f64) -> Vec<usize> {
    (0..matrix.n_rows())
        .filter(|&r| is_increasing(matrix.row(r), series.cols(), epsilon))
        .collect()
}

/// Chunked variant; chunks are scanned in parallel and concatenated in
/// order, so the output equals [`assign_rows_eps`].
pub fn assign_rows_chunked(
    matrix: &ExpressionMatrix,
    series: &ColumnSeries,
    plan: &ChunkPlan,
    epsilon: f64,
) -> Vec<usize> {
    plan.chunks()
        .par_iter()
        .map(|chunk| {
            chunk
                .clone()
                .filter(|&r| is_increasing(matrix.row(r), series.cols(), epsilon))
                .collect::<Vec<_>>()
        })
        .flatten_iter()
        .collect()
}

pub fn expand_bicluster(
    matrix: &ExpressionMatrix,
    bicluster: &Bicluster,
    opts: &ExpansionOptions,
) -> Bicluster {
    let mut flags: Vec<Option<RowFlag>> = vec![None; matrix.n_rows()];
    for (&r, &f) in bicluster.rows.iter().zip(&bicluster.flags) {
        flags[r] = Some(f);
    }
    let cols = bicluster.series.cols();
    if opts.allow_negative || opts.approx_violations > 0 {
        let reversed: Vec<usize> = cols.iter().rev().copied().collect();
        for (r, flag) in flags.iter_mut().enumerate() {
            if flag.is_some() {
                continue;
            }
            let row = matrix.row(r);
            if opts.allow_negative && is_increasing(row, &reversed, 0.0) {
                *flag = Some(RowFlag::Negative);
            } else if opts.approx_violations > 0 && count_violations(row, cols) <= opts.approx_violations {
                *flag = Some(RowFlag::Approximate);
            }
        }
    }
    let (rows, flags): (Vec<usize>, Vec<RowFlag>) = flags
        .into_iter()
        .enumerate()
        .filter_map(|(r, f)| f.map(|f| (r, f)))
        .unzip();
    Bicluster {
        rows,
        series: bicluster.series.clone(),
        fitness: bicluster.fitness,
        flags,
    }
}

/// Resolves the best `limit` top-rank entries into (expanded) biclusters,
/// in top-rank order.
pub fn resolve_biclusters(
    matrix: &ExpressionMatrix,
    top_rank: &TopRankList,
    limit: usize,
    opts: &ExpansionOptions,
    epsilon: f64,
) -> Vec<Bicluster> {
    top_rank
        .entries()
        .par_iter()
        .take(limit)
        .map(|e| {
            let rows = assign_rows_eps(matrix, &e.series, epsilon);
            expand_bicluster(matrix, &Bicluster::exact(rows, e.series.clone(), e.fitness), opts)
        })
        .collect()
}
