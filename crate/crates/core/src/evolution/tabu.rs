use rustc_hash::FxHashSet;

use crate::series::ColumnSeries;

/// Every series ever admitted for evaluation, keyed by its exact column
/// order. Keys are never removed.
///
/// Short series are packed into a `u128` (length byte plus fixed-width column
/// indices); longer ones are stored as boxed slices.
#[derive(Debug, Clone)]
pub struct TabuList {
    packed: FxHashSet<u128>,
    long: FxHashSet<Box<[u32]>>,
    bits: u32,
    pub hit_counter: usize,
}

impl Default for TabuList {
    fn default() -> Self {
        Self::new()
    }
}

impl TabuList {
    /// A list accepting any column index below `2^16`.
    pub fn new() -> Self {
        Self::for_columns(1 << 16)
    }

    /// A list sized for series over `n_cols` columns.
    pub fn for_columns(n_cols: usize) -> Self {
        let bits = usize::BITS - n_cols.saturating_sub(1).leading_zeros();
        Self {
            packed: FxHashSet::default(),
            long: FxHashSet::default(),
            bits: bits.max(1),
            hit_counter: 0,
        }
    }

    fn pack(&self, cols: &[usize]) -> Option<u128> {
        if cols.len() > 255 || 8 + cols.len() as u32 * self.bits > 128 {
            return None;
        }
        let mut key = cols.len() as u128;
        let mut shift = 8;
        for &c in cols {
            if (c as u128) >> self.bits != 0 {
                return None;
            }
            key |= (c as u128) << shift;
            shift += self.bits;
        }
        Some(key)
    }

    fn boxed(cols: &[usize]) -> Box<[u32]> {
        cols.iter().map(|&c| c as u32).collect()
    }

    /// Returns true if the series was new. A repeated series bumps the hit counter.
    pub fn insert(&mut self, s: &ColumnSeries) -> bool {
        let fresh = match self.pack(s.cols()) {
            Some(key) => self.packed.insert(key),
            None => self.long.insert(Self::boxed(s.cols())),
        };
        if !fresh {
            self.hit_counter += 1;
        }
        fresh
    }

    pub fn contains(&self, s: &ColumnSeries) -> bool {
        match self.pack(s.cols()) {
            Some(key) => self.packed.contains(&key),
            None => self.long.contains(&Self::boxed(s.cols())),
        }
    }

    pub fn len(&self) -> usize {
        self.packed.len() + self.long.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_matters_and_hits_count() {
        let mut tabu = TabuList::new();
        let a = ColumnSeries::new(vec![1, 2]).unwrap();
        let b = ColumnSeries::new(vec![2, 1]).unwrap();
        assert!(tabu.insert(&a));
        assert!(tabu.insert(&b));
        assert!(!tabu.insert(&a));
        assert!(!tabu.insert(&a));
        assert_eq!(tabu.hit_counter, 2);
        assert_eq!(tabu.len(), 2);
    }

    #[test]
    fn long_series_are_exact() {
        let mut tabu = TabuList::for_columns(100);
        let long: Vec<usize> = (0..40).collect();
        let mut other = long.clone();
        other.swap(38, 39);
        let a = ColumnSeries::new(long).unwrap();
        let b = ColumnSeries::new(other).unwrap();
        assert!(tabu.insert(&a));
        assert!(tabu.insert(&b));
        assert!(!tabu.insert(&a));
        assert!(tabu.contains(&b));
        assert_eq!(tabu.len(), 2);
    }

    #[test]
    fn packing_distinguishes_lengths() {
        let mut tabu = TabuList::for_columns(4);
        // Column 0 packs to zero bits, so a trailing 0 must still differ.
        let a = ColumnSeries::new(vec![1, 0]).unwrap();
        let b = ColumnSeries::new(vec![1, 0, 2]).unwrap();
        let c = ColumnSeries::new(vec![1, 2, 0]).unwrap();
        assert!(tabu.insert(&a) && tabu.insert(&b) && tabu.insert(&c));
        assert_eq!(tabu.hit_counter, 0);
    }
}
