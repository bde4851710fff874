//! The four mutations and the crossover applied to column series.
//!
//! Each random operator has a deterministic `*_at` counterpart taking the
//! positions and columns explicitly. `None` means the operator cannot apply
//! to its input (no unused column left, series already at minimum length).

use rand::Rng;

use crate::series::ColumnSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operator {
    Insertion,
    Deletion,
    Swap,
    Substitution,
    Crossover,
}

impl Operator {
    pub const ALL: [Operator; 5] = [
        Operator::Insertion,
        Operator::Deletion,
        Operator::Swap,
        Operator::Substitution,
        Operator::Crossover,
    ];

    /// Picks an operator with the given probabilities (same order as `ALL`).
    pub fn draw<R: Rng + ?Sized>(probs: &[f64; 5], rng: &mut R) -> Operator {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (op, p) in Self::ALL.iter().zip(probs) {
            acc += p;
            if u < acc {
                return *op;
            }
        }
        // Rounding left u above the cumulative sum; take the last enabled one.
        let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(4);
        Self::ALL[last]
    }
}

pub fn insert_at(s: &ColumnSeries, col: usize, pos: usize) -> Option<ColumnSeries> {
    if s.contains(col) || pos > s.len() {
        return None;
    }
    let mut cols = Vec::with_capacity(s.len() + 1);
    cols.extend_from_slice(&s.cols()[..pos]);
    cols.push(col);
    cols.extend_from_slice(&s.cols()[pos..]);
    Some(ColumnSeries::from_vec_unchecked(cols))
}

pub fn mutate_insertion<R: Rng + ?Sized>(
    s: &ColumnSeries,
    n_cols: usize,
    rng: &mut R,
) -> Option<ColumnSeries> {
    let col = random_unused_column(s, n_cols, rng)?;
    let pos = rng.random_range(0..=s.len());
    insert_at(s, col, pos)
}

pub fn delete_at(s: &ColumnSeries, idx: usize) -> Option<ColumnSeries> {
    if s.len() < 3 || idx >= s.len() {
        return None;
    }
    let mut cols = s.cols().to_vec();
    cols.remove(idx);
    Some(ColumnSeries::from_vec_unchecked(cols))
}

pub fn mutate_deletion<R: Rng + ?Sized>(s: &ColumnSeries, rng: &mut R) -> Option<ColumnSeries> {
    if s.len() < 3 {
        return None;
    }
    delete_at(s, rng.random_range(0..s.len()))
}

pub fn swap_at(s: &ColumnSeries, i: usize, j: usize) -> Option<ColumnSeries> {
    if i == j || i >= s.len() || j >= s.len() {
        return None;
    }
    let mut cols = s.cols().to_vec();
    cols.swap(i, j);
    Some(ColumnSeries::from_vec_unchecked(cols))
}

pub fn mutate_swap<R: Rng + ?Sized>(s: &ColumnSeries, rng: &mut R) -> Option<ColumnSeries> {
    let n = s.len();
    let i = rng.random_range(0..n);
    let j = (i + rng.random_range(1..n)) % n;
    swap_at(s, i, j)
}

pub fn substitute_at(s: &ColumnSeries, pos: usize, col: usize) -> Option<ColumnSeries> {
    if pos >= s.len() || s.contains(col) {
        return None;
    }
    let mut cols = s.cols().to_vec();
    cols[pos] = col;
    Some(ColumnSeries::from_vec_unchecked(cols))
}

pub fn mutate_substitution<R: Rng + ?Sized>(
    s: &ColumnSeries,
    n_cols: usize,
    rng: &mut R,
) -> Option<ColumnSeries> {
    let col = random_unused_column(s, n_cols, rng)?;
    let pos = rng.random_range(0..s.len());
    substitute_at(s, pos, col)
}

/// The first `cut` columns of `a`, then the columns of `b` not yet present,
/// in `b`'s order.
pub fn crossover_at(a: &ColumnSeries, b: &ColumnSeries, cut: usize) -> Option<ColumnSeries> {
    if cut == 0 || cut > a.len() {
        return None;
    }
    let mut cols = Vec::with_capacity(cut + b.len());
    cols.extend_from_slice(&a.cols()[..cut]);
    for &c in b.cols() {
        if !cols.contains(&c) {
            cols.push(c);
        }
    }
    (cols.len() >= 2).then(|| ColumnSeries::from_vec_unchecked(cols))
}

pub fn crossover<R: Rng + ?Sized>(
    a: &ColumnSeries,
    b: &ColumnSeries,
    rng: &mut R,
) -> Option<ColumnSeries> {
    let cut = rng.random_range(1..=a.len());
    crossover_at(a, b, cut)
}

fn random_unused_column<R: Rng + ?Sized>(
    s: &ColumnSeries,
    n_cols: usize,
    rng: &mut R,
) -> Option<usize> {
    let free = n_cols.checked_sub(s.len())?;
    if free == 0 {
        return None;
    }
    if free * 2 >= n_cols {
        // At least half the columns are free: rejection needs < 2 draws on average.
        loop {
            let c = rng.random_range(0..n_cols);
            if !s.contains(c) {
                return Some(c);
            }
        }
    }
    let k = rng.random_range(0..free);
    (0..n_cols).filter(|c| !s.contains(*c)).nth(k)
}
