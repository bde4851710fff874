//! Evolutionary discovery of order-preserving biclusters.
//!
//! A bicluster is encoded as an ordered series of columns; its rows are the
//! rows whose values strictly increase along the series. A genetic search
//! evolves series, scoring each by its length and the number of matching
//! rows, and keeps the best mutually non-overlapping ones.
//!
//! ```
//! use evobic::prelude::*;
//!
//! let spec = ScenarioSpec::new(60, 30, vec![(10, 6)], Pattern::TrendPreserving, 3);
//! let data = generate(&spec).unwrap();
//! let cfg = EvolutionConfig { max_iterations: 20, population_size: 60, threads: 1, ..Default::default() };
//! let outcome = run(&data.matrix, &cfg).unwrap();
//! let found = resolve_biclusters(&data.matrix, &outcome.top_rank, 1, &ExpansionOptions::default(), 0.0);
//! assert_eq!(found.len(), 1);
//! ```

pub mod bench;
pub mod bicluster;
pub mod cbf;
pub mod error;
pub mod evolution;
pub mod expansion;
pub mod fitness;
pub mod matrix;
pub mod metrics;
pub mod series;
pub mod synthgen;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::bicluster::{Bicluster, BiclusterRecord, IndexBicluster, RowFlag};
    pub use crate::cbf::{decode_population, encode_population, CbfPopulation};
    pub use crate::evolution::{run, EvolutionConfig, RunOutcome, TopRankList};
    pub use crate::expansion::{assign_rows, expand_bicluster, resolve_biclusters, ExpansionOptions};
    pub use crate::fitness::{count_matches, evaluate_population, fitness, ChunkPlan, FitnessParams};
    pub use crate::matrix::{load_matrix, ExpressionMatrix, MatrixFormat};
    pub use crate::metrics::{jaccard, recovery, relevance, CellBlock};
    pub use crate::series::ColumnSeries;
    pub use crate::synthgen::{generate, Pattern, ScenarioSpec};
    pub use crate::{Error, Result};
}
