//! Capacity-bounded list of the best mutually non-overlapping series.

use serde::Serialize;

use crate::series::ColumnSeries;

/// Column membership bitset used for fast overlap tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSet {
    words: Vec<u64>,
    len: usize,
}

impl ColumnSet {
    pub fn from_cols(cols: &[usize]) -> Self {
        let max = cols.iter().copied().max().unwrap_or(0);
        let mut words = vec![0u64; max / 64 + 1];
        for &c in cols {
            words[c / 64] |= 1 << (c % 64);
        }
        Self {
            words,
            len: cols.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn intersection_len(&self, other: &ColumnSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// `|A ∩ B| / min(|A|, |B|)`; a series contained in another overlaps fully.
    pub fn overlap(&self, other: &ColumnSet) -> f64 {
        let denom = self.len.min(other.len);
        if denom == 0 {
            return 0.0;
        }
        self.intersection_len(other) as f64 / denom as f64
    }
}

pub fn column_overlap(a: &[usize], b: &[usize]) -> f64 {
    ColumnSet::from_cols(a).overlap(&ColumnSet::from_cols(b))
}

#[derive(Debug, Clone, Serialize)]
pub struct TopRankEntry {
    pub series: ColumnSeries,
    pub fitness: f64,
    #[serde(skip)]
    set: ColumnSet,
}

impl TopRankEntry {
    pub fn new(series: ColumnSeries, fitness: f64) -> Self {
        let set = ColumnSet::from_cols(series.cols());
        Self {
            series,
            fitness,
            set,
        }
    }

    pub fn column_set(&self) -> &ColumnSet {
        &self.set
    }
}

#[derive(Debug, Clone)]
pub struct TopRankList {
    entries: Vec<TopRankEntry>,
    capacity: usize,
    overlap_threshold: f64,
}

impl TopRankList {
    pub fn new(capacity: usize, overlap_threshold: f64) -> Self {
        Self {
            entries: Vec::new(),
            capacity,
            overlap_threshold,
        }
    }

    pub fn entries(&self) -> &[TopRankEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn overlap_threshold(&self) -> f64 {
        self.overlap_threshold
    }

    pub fn best_fitness(&self) -> Option<f64> {
        self.entries.first().map(|e| e.fitness)
    }

    /// Offers a whole evaluated population to the list.
    ///
    /// Individuals are visited from best to worst. One is admitted when it
    /// overlaps no entry ranked at or above its fitness by more than the
    /// threshold; admitting it evicts every lower-ranked entry it overlaps
    /// beyond the threshold. The list is then cut back to capacity.
    pub fn update(&mut self, population: &[ColumnSeries], fitnesses: &[f64]) {
        assert_eq!(population.len(), fitnesses.len());
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| fitnesses[b].total_cmp(&fitnesses[a]));
        for idx in order {
            self.offer(&population[idx], fitnesses[idx]);
        }
        self.entries.truncate(self.capacity);
    }

    /// Returns true if the candidate was admitted. Does not truncate.
    pub fn offer(&mut self, series: &ColumnSeries, fitness: f64) -> bool {
        // Entries with equal fitness rank ahead of the newcomer.
        let pos = self.entries.partition_point(|e| e.fitness >= fitness);
        if pos >= self.capacity {
            // Would be cut at truncation, and everything it could evict or
            // block ranks below it.
            return false;
        }
        let set = ColumnSet::from_cols(series.cols());
        let blocked = self.entries[..pos]
            .iter()
            .any(|e| e.set.overlap(&set) > self.overlap_threshold || e.series == *series);
        if blocked {
            return false;
        }
        let mut below = self.entries.split_off(pos);
        below.retain(|e| e.set.overlap(&set) <= self.overlap_threshold && e.series != *series);
        self.entries.push(TopRankEntry {
            series: series.clone(),
            fitness,
            set,
        });
        self.entries.append(&mut below);
        true
    }

    /// Checks sortedness, the pairwise overlap bound and the capacity bound.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.entries.len() > self.capacity {
            return Err(format!("{} entries exceed capacity {}", self.entries.len(), self.capacity));
        }
        for w in self.entries.windows(2) {
            if w[0].fitness < w[1].fitness {
                return Err(format!("not sorted: {} before {}", w[0].fitness, w[1].fitness));
            }
        }
        for (i, a) in self.entries.iter().enumerate() {
            for b in &self.entries[i + 1..] {
                let ov = a.set.overlap(&b.set);
                if ov > self.overlap_threshold {
                    return Err(format!("{} and {} overlap by {ov}", a.series, b.series));
                }
                if a.series == b.series {
                    return Err(format!("duplicate entry {}", a.series));
                }
            }
        }
        Ok(())
    }
}
