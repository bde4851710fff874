//! Tournament selection with a crowding penalty.
//!
//! While a generation is being assembled, every admitted individual bumps a
//! usage counter for each of its columns. A tournament candidate's fitness is
//! divided by `base ^ theta`, where `theta` is the mean usage of its columns,
//! so series built from columns already common in the new generation lose.

use rand::Rng;

use crate::series::ColumnSeries;

#[derive(Debug, Clone)]
pub struct ColumnPenaltyTable {
    usage: Vec<u32>,
}

impl ColumnPenaltyTable {
    pub fn new(n_cols: usize) -> Self {
        Self {
            usage: vec![0; n_cols],
        }
    }

    pub fn record(&mut self, series: &[usize]) {
        for &c in series {
            self.usage[c] += 1;
        }
    }

    pub fn usage(&self, col: usize) -> u32 {
        self.usage[col]
    }

    pub fn reset(&mut self) {
        self.usage.iter_mut().for_each(|u| *u = 0);
    }

    /// Mean usage over the series' columns.
    pub fn theta(&self, series: &[usize]) -> f64 {
        let total: u64 = series.iter().map(|&c| u64::from(self.usage[c])).sum();
        total as f64 / series.len() as f64
    }

    pub fn adjusted(&self, fitness: f64, series: &[usize], base: f64) -> f64 {
        self.adjusted_ln(fitness, series, base.ln())
    }

    /// `adjusted` with the natural log of the base precomputed.
    #[inline]
    pub fn adjusted_ln(&self, fitness: f64, series: &[usize], ln_base: f64) -> f64 {
        fitness * (-self.theta(series) * ln_base).exp()
    }
}

/// Draws `tournament_size` candidates uniformly (with replacement) and
/// returns the index with the best penalised fitness; the earliest drawn wins
/// ties.
pub fn tournament_select<R: Rng + ?Sized>(
    population: &[ColumnSeries],
    fitnesses: &[f64],
    penalties: &ColumnPenaltyTable,
    tournament_size: usize,
    penalty_base: f64,
    rng: &mut R,
) -> usize {
    assert!(!population.is_empty(), "tournament over an empty population");
    let draw = |rng: &mut R| rng.random_range(0..population.len());
    let ln_base = penalty_base.ln();
    let score = |i: usize| penalties.adjusted_ln(fitnesses[i], population[i].cols(), ln_base);
    let mut best = draw(rng);
    let mut best_score = score(best);
    for _ in 1..tournament_size {
        let i = draw(rng);
        let sc = score(i);
        if sc > best_score {
            best = i;
            best_score = sc;
        }
    }
    best
}
