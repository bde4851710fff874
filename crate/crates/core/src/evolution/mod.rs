//! Generational search over column series.
//!
//! Each generation starts from clones of the best top-rank entries, then
//! fills up with children of tournament-selected parents. Only series never
//! seen before enter the population; repeats count as tabu hits and too many
//! of them in one generation end the run. New children are scored in
//! parallel and offered to the top-rank list, which is the run's output.

mod config;
pub mod operators;
mod selection;
mod tabu;
mod toprank;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use config::{EvolutionConfig, OperatorProbabilities};
pub use operators::Operator;
pub use selection::{tournament_select, ColumnPenaltyTable};
pub use tabu::TabuList;
pub use toprank::{column_overlap, ColumnSet, TopRankEntry, TopRankList};

use crate::cbf::{encode_population, CbfPopulation};
use crate::error::{Error, Result};
use crate::fitness::{FitnessEngine, FitnessParams};
use crate::matrix::ExpressionMatrix;
use crate::series::ColumnSeries;

/// Matrices narrower than this still run, with a warning.
pub const RECOMMENDED_MIN_COLS: usize = 20;

pub type SearchRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SearchRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random distinct series of length 2 to 4, all recorded in `tabu`.
///
/// On very narrow matrices fewer than `population_size` distinct series may
/// exist; the search then stops early with whatever it found.
pub fn init_population<R: Rng + ?Sized>(
    n_cols: usize,
    cfg: &EvolutionConfig,
    tabu: &mut TabuList,
    rng: &mut R,
) -> Result<Vec<ColumnSeries>> {
    if n_cols < 3 {
        return Err(Error::MatrixTooNarrow(n_cols));
    }
    if n_cols < RECOMMENDED_MIN_COLS {
        log::warn!(
            "matrix has only {n_cols} columns; an exhaustive search is preferable below {RECOMMENDED_MIN_COLS}"
        );
    }
    let max_len = n_cols.min(4);
    let mut population = Vec::with_capacity(cfg.population_size);
    let mut attempts = 0usize;
    let attempt_limit = cfg.population_size.saturating_mul(50).max(1000);
    while population.len() < cfg.population_size && attempts < attempt_limit {
        attempts += 1;
        let len = rng.random_range(2..=max_len);
        let cols = sample(rng, n_cols, len).into_vec();
        let series = ColumnSeries::from_vec_unchecked(cols);
        if tabu.insert(&series) {
            population.push(series);
        }
    }
    tabu.hit_counter = 0;
    if population.len() < cfg.population_size {
        log::warn!(
            "only {} distinct initial series could be drawn",
            population.len()
        );
    }
    Ok(population)
}

/// The next population. The first `elite_count` members are clones of
/// top-rank entries whose fitness is already known.
#[derive(Debug, Clone)]
pub struct NextGeneration {
    pub population: Vec<ColumnSeries>,
    pub elite_count: usize,
    pub terminate: bool,
}

impl NextGeneration {
    pub fn children(&self) -> &[ColumnSeries] {
        &self.population[self.elite_count..]
    }

    pub fn to_cbf(&self) -> Result<CbfPopulation> {
        encode_population(&self.population)
    }
}

#[allow(clippy::too_many_arguments)]
pub fn build_generation<R: Rng + ?Sized>(
    prev_population: &[ColumnSeries],
    prev_fitness: &[f64],
    top_rank: &TopRankList,
    tabu: &mut TabuList,
    penalties: &mut ColumnPenaltyTable,
    n_cols: usize,
    cfg: &EvolutionConfig,
    rng: &mut R,
) -> NextGeneration {
    tabu.hit_counter = 0;
    penalties.reset();
    let target = cfg.population_size;

    let elite_count = ((cfg.elite_fraction * top_rank.len() as f64).ceil() as usize)
        .min(top_rank.len())
        .min(target);
    let mut population: Vec<ColumnSeries> = Vec::with_capacity(target);
    for e in &top_rank.entries()[..elite_count] {
        penalties.record(e.series.cols());
        population.push(e.series.clone());
    }

    let probs = cfg.operators.as_array();
    let mut terminate = false;
    if prev_population.is_empty() {
        return NextGeneration {
            population,
            elite_count,
            terminate: true,
        };
    }
    while population.len() < target {
        let select = |rng: &mut R, penalties: &ColumnPenaltyTable| {
            tournament_select(
                prev_population,
                prev_fitness,
                penalties,
                cfg.tournament_size,
                cfg.penalty_base,
                rng,
            )
        };
        let i = select(rng, penalties);
        let parent = &prev_population[i];
        let child = match Operator::draw(&probs, rng) {
            Operator::Insertion => operators::mutate_insertion(parent, n_cols, rng),
            Operator::Deletion => operators::mutate_deletion(parent, rng),
            Operator::Swap => operators::mutate_swap(parent, rng),
            Operator::Substitution => operators::mutate_substitution(parent, n_cols, rng),
            Operator::Crossover => {
                let j = select(rng, penalties);
                operators::crossover(parent, &prev_population[j], rng).or_else(|| {
                    let fitter = if prev_fitness[j] > prev_fitness[i] { j } else { i };
                    Some(prev_population[fitter].clone())
                })
            }
        }
        .unwrap_or_else(|| parent.clone());

        if tabu.insert(&child) {
            penalties.record(child.cols());
            population.push(child);
        } else if tabu.hit_counter > target {
            terminate = true;
            break;
        }
    }
    NextGeneration {
        population,
        elite_count,
        terminate,
    }
}

/// What the observer sees after each evaluated generation (0 = initial).
pub struct GenerationReport<'a> {
    pub generation: usize,
    /// Series scored in this generation; elites are not re-scored.
    pub evaluated: Option<&'a CbfPopulation>,
    pub fitness: &'a [f64],
    pub top_rank: &'a TopRankList,
    pub population_size: usize,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub top_rank: TopRankList,
    /// Completed generations after initialisation.
    pub generations: usize,
    pub terminated_early: bool,
    /// Number of individual fitness evaluations.
    pub evaluations: usize,
    pub params: FitnessParams,
}

pub fn fitness_params_for(matrix: &ExpressionMatrix, cfg: &EvolutionConfig) -> FitnessParams {
    FitnessParams {
        sigma: cfg
            .sigma
            .unwrap_or_else(|| FitnessParams::default_sigma(matrix.n_rows())),
        epsilon: cfg.epsilon,
    }
}

pub fn run(matrix: &ExpressionMatrix, cfg: &EvolutionConfig) -> Result<RunOutcome> {
    run_with_observer(matrix, cfg, |_| {})
}

pub fn run_with_observer<F>(
    matrix: &ExpressionMatrix,
    cfg: &EvolutionConfig,
    mut observer: F,
) -> Result<RunOutcome>
where
    F: FnMut(&GenerationReport<'_>),
{
    cfg.validate()?;
    let params = fitness_params_for(matrix, cfg);
    let engine = FitnessEngine::new(matrix, params, cfg.threads)?;
    let n_cols = matrix.n_cols();
    let mut rng = seeded_rng(cfg.rng_seed);
    let mut tabu = TabuList::for_columns(n_cols);
    let mut penalties = ColumnPenaltyTable::new(n_cols);
    let mut top_rank = TopRankList::new(cfg.top_rank_capacity, cfg.overlap_threshold);

    let mut population = init_population(n_cols, cfg, &mut tabu, &mut rng)?;
    let cbf = encode_population(&population)?;
    let mut fitness = engine.evaluate(&cbf);
    let mut evaluations = fitness.len();
    top_rank.update(&population, &fitness);
    observer(&GenerationReport {
        generation: 0,
        evaluated: Some(&cbf),
        fitness: &fitness,
        top_rank: &top_rank,
        population_size: population.len(),
    });

    let mut generations = 0;
    let mut terminated_early = false;
    for gen in 1..=cfg.max_iterations {
        let next = build_generation(
            &population,
            &fitness,
            &top_rank,
            &mut tabu,
            &mut penalties,
            n_cols,
            cfg,
            &mut rng,
        );
        if next.terminate {
            log::debug!("tabu list saturated at generation {gen}");
            terminated_early = true;
            break;
        }
        let mut next_fitness: Vec<f64> = top_rank.entries()[..next.elite_count]
            .iter()
            .map(|e| e.fitness)
            .collect();
        let children = next.children();
        let evaluated = if children.is_empty() {
            None
        } else {
            let cbf = encode_population(children)?;
            next_fitness.extend(engine.evaluate(&cbf));
            evaluations += children.len();
            Some(cbf)
        };
        top_rank.update(children, &next_fitness[next.elite_count..]);
        generations = gen;
        observer(&GenerationReport {
            generation: gen,
            evaluated: evaluated.as_ref(),
            fitness: &next_fitness,
            top_rank: &top_rank,
            population_size: next.population.len(),
        });
        population = next.population;
        fitness = next_fitness;
    }

    Ok(RunOutcome {
        top_rank,
        generations,
        terminated_early,
        evaluations,
        params,
    })
}
