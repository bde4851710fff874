#![allow(dead_code)]

use std::collections::HashSet;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use evobic::cbf::{decode_population, encode_raw};
use evobic::evolution::operators;
use evobic::evolution::{run_with_observer, EvolutionConfig};
use evobic::expansion::{resolve_biclusters, ExpansionOptions};
use evobic::fitness::{count_matches_eps, fitness, ChunkPlan, FitnessParams};
use evobic::matrix::ExpressionMatrix;
use evobic::metrics::{jaccard, recovery, relevance, CellBlock};
use evobic::series::ColumnSeries;
use evobic::synthgen::{generate, Pattern, ScenarioSpec};

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

/// Naive per-row check: every adjacent pair of the series must increase.
pub fn oracle_row_increasing(m: &ExpressionMatrix, r: usize, cols: &[usize], eps: f64) -> bool {
    for k in 0..cols.len() - 1 {
        let a = m.get(r, cols[k]);
        let b = m.get(r, cols[k + 1]);
        if !(a < b + eps) {
            return false;
        }
    }
    true
}

pub fn oracle_count(m: &ExpressionMatrix, cols: &[usize], eps: f64) -> u64 {
    (0..m.n_rows())
        .filter(|&r| oracle_row_increasing(m, r, cols, eps))
        .count() as u64
}

/// `2^min(rows - sigma, 0) * len * ln(rows - 1)`, spelled out without the
/// library helpers.
pub fn oracle_fitness(rows: u64, len: usize, sigma: usize) -> f64 {
    if rows < 2 {
        return 0.0;
    }
    let deficit = rows as i64 - sigma as i64;
    let factor = if deficit < 0 { 0.5f64.powi((-deficit) as i32) } else { 1.0 };
    factor * len as f64 * ((rows - 1) as f64).ln()
}

pub fn cell_set(rows: &[usize], cols: &[usize]) -> HashSet<(usize, usize)> {
    let mut s = HashSet::new();
    for &r in rows {
        for &c in cols {
            s.insert((r, c));
        }
    }
    s
}

pub fn oracle_jaccard(a: &(Vec<usize>, Vec<usize>), b: &(Vec<usize>, Vec<usize>)) -> f64 {
    let x = cell_set(&a.0, &a.1);
    let y = cell_set(&b.0, &b.1);
    let inter = x.intersection(&y).count();
    let union = x.union(&y).count();
    inter as f64 / union as f64
}

pub fn oracle_recovery(expected: &[(Vec<usize>, Vec<usize>)], found: &[(Vec<usize>, Vec<usize>)]) -> f64 {
    if found.is_empty() {
        return 0.0;
    }
    let total: f64 = expected
        .iter()
        .map(|e| found.iter().map(|f| oracle_jaccard(e, f)).fold(0.0, f64::max))
        .sum();
    total / expected.len() as f64
}

/// Set overlap `|A & B| / min(|A|, |B|)` computed with hash sets.
pub fn oracle_overlap(a: &[usize], b: &[usize]) -> f64 {
    let x: HashSet<usize> = a.iter().copied().collect();
    let y: HashSet<usize> = b.iter().copied().collect();
    x.intersection(&y).count() as f64 / x.len().min(y.len()) as f64
}

pub fn is_valid_series(cols: &[usize], n_cols: usize) -> bool {
    let distinct: HashSet<usize> = cols.iter().copied().collect();
    cols.len() >= 2 && distinct.len() == cols.len() && cols.iter().all(|&c| c < n_cols)
}

/// A small matrix with many ties (values on a coarse grid).
pub fn tied_matrix() -> impl Strategy<Value = ExpressionMatrix> {
    (1usize..40, 3usize..12).prop_flat_map(|(rows, cols)| {
        prop::collection::vec(0i32..5, rows * cols).prop_map(move |v| {
            let vals = v.into_iter().map(|x| x as f64 * 0.5).collect();
            ExpressionMatrix::from_values(vals, rows, cols).unwrap()
        })
    })
}

pub fn series_in(n_cols: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n_cols).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_flat_map(move |perm| (Just(perm), 2usize..=n_cols))
        .prop_map(|(perm, len)| perm[..len].to_vec())
}

pub fn population_in(n_cols: usize, max_pop: usize) -> impl Strategy<Value = Vec<Vec<usize>>> {
    prop::collection::vec(series_in(n_cols), 1..=max_pop)
}

fn report<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

/// Encoding then decoding any population yields it back unchanged.
pub fn prop_cbf_round_trip(cases: u32) -> Result<(), String> {
    let strat = (2usize..60).prop_flat_map(|n| population_in(n, 30));
    report(runner(cases).run(&strat, |pop| {
        let cbf = encode_raw(&pop).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(cbf.offsets().len(), pop.len() + 1);
        prop_assert_eq!(cbf.offsets()[0], 0);
        prop_assert_eq!(*cbf.offsets().last().unwrap(), cbf.col_indices().len());
        let back: Vec<Vec<usize>> = decode_population(&cbf).into_iter().map(ColumnSeries::into_inner).collect();
        prop_assert_eq!(back, pop);
        Ok(())
    }))
}

/// Chunked counts equal the row-by-row oracle for several partitions.
pub fn prop_count_matches(cases: u32) -> Result<(), String> {
    let strat = tied_matrix().prop_flat_map(|m| {
        let n = m.n_cols();
        let rows = m.n_rows();
        (
            Just(m),
            population_in(n, 12),
            prop::collection::btree_set(1..rows.max(2), 0..4),
            prop_oneof![Just(0.0), Just(0.25), Just(0.5), Just(1.0)],
        )
    });
    report(runner(cases).run(&strat, |(m, pop, cuts, eps)| {
        let cbf = encode_raw(&pop).unwrap();
        let expected: Vec<u64> = pop.iter().map(|s| oracle_count(&m, s, eps)).collect();
        let rows = m.n_rows();
        let mut plans: Vec<ChunkPlan> = [1, 2, 3, 7].iter().map(|&w| ChunkPlan::new(rows, w)).collect();
        let mut bounds: Vec<usize> = cuts.into_iter().filter(|&c| c < rows).collect();
        bounds.insert(0, 0);
        bounds.push(rows);
        let ranges = bounds.windows(2).map(|w| w[0]..w[1]).collect();
        plans.push(ChunkPlan::from_ranges(ranges, rows, 3).unwrap());
        for plan in &plans {
            let got = count_matches_eps(&m, &cbf, plan, eps);
            prop_assert_eq!(&got, &expected, "plan {:?}", plan.chunks());
        }
        Ok(())
    }))
}

pub fn fitness_hand_cases() -> Result<(), String> {
    // (rows, length, sigma, expected)
    let cases = [
        (20u64, 5usize, 4usize, 14.722194895832201),
        (8, 2, 4, 3.8918202981106265),
        (3, 4, 6, 0.34657359027997264),
        (5, 10, 10, 0.4332169878499658),
        (2, 3, 4, 0.0),
        (1, 7, 4, 0.0),
        (0, 7, 4, 0.0),
        (100, 15, 4, 68.92679775201884),
    ];
    for (rows, len, sigma, want) in cases {
        let p = FitnessParams::new(sigma).unwrap();
        let got = fitness(rows, len, &p);
        if (got - want).abs() > 1e-9 {
            return Err(format!("fitness({rows}, {len}, sigma {sigma}) = {got}, expected {want}"));
        }
        let oracle = oracle_fitness(rows, len, sigma);
        if (got - oracle).abs() > 1e-9 {
            return Err(format!("fitness({rows}, {len}, sigma {sigma}) = {got}, oracle {oracle}"));
        }
    }
    Ok(())
}

/// Every operator returns either nothing or a valid series with the
/// structure its definition requires.
pub fn prop_operators(cases: u32) -> Result<(), String> {
    let strat = (3usize..40)
        .prop_flat_map(|n| (Just(n), series_in(n), series_in(n), any::<u64>()))
        .prop_map(|(n, a, b, seed)| (n, ColumnSeries::new(a).unwrap(), ColumnSeries::new(b).unwrap(), seed));
    report(runner(cases).run(&strat, |(n, a, b, seed)| {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);

        match operators::mutate_insertion(&a, n, &mut rng) {
            Some(c) => {
                prop_assert!(is_valid_series(c.cols(), n));
                prop_assert_eq!(c.len(), a.len() + 1);
                let fresh: Vec<usize> = c.cols().iter().copied().filter(|x| !a.contains(*x)).collect();
                prop_assert_eq!(fresh.len(), 1);
                let kept: Vec<usize> = c.cols().iter().copied().filter(|x| a.contains(*x)).collect();
                prop_assert_eq!(&kept[..], a.cols());
            }
            None => prop_assert_eq!(a.len(), n),
        }

        match operators::mutate_deletion(&a, &mut rng) {
            Some(c) => {
                prop_assert!(is_valid_series(c.cols(), n));
                prop_assert_eq!(c.len() + 1, a.len());
                let kept: Vec<usize> = a.cols().iter().copied().filter(|x| c.contains(*x)).collect();
                prop_assert_eq!(&kept[..], c.cols());
            }
            None => prop_assert_eq!(a.len(), 2),
        }

        let c = operators::mutate_swap(&a, &mut rng).expect("swap always applies");
        prop_assert!(is_valid_series(c.cols(), n));
        let diff: Vec<usize> = (0..a.len()).filter(|&i| a.cols()[i] != c.cols()[i]).collect();
        prop_assert_eq!(diff.len(), 2);
        prop_assert_eq!(a.cols()[diff[0]], c.cols()[diff[1]]);
        prop_assert_eq!(a.cols()[diff[1]], c.cols()[diff[0]]);

        match operators::mutate_substitution(&a, n, &mut rng) {
            Some(c) => {
                prop_assert!(is_valid_series(c.cols(), n));
                prop_assert_eq!(c.len(), a.len());
                let diff: Vec<usize> = (0..a.len()).filter(|&i| a.cols()[i] != c.cols()[i]).collect();
                prop_assert_eq!(diff.len(), 1);
                prop_assert!(!a.contains(c.cols()[diff[0]]));
            }
            None => prop_assert_eq!(a.len(), n),
        }

        if let Some(c) = operators::crossover(&a, &b, &mut rng) {
            prop_assert!(is_valid_series(c.cols(), n));
            let cut = (1..=a.len())
                .rev()
                .find(|&k| c.cols().starts_with(&a.cols()[..k]))
                .expect("child starts with a prefix of the first parent");
            let tail: Vec<usize> = b.cols().iter().copied().filter(|x| !a.cols()[..cut].contains(x)).collect();
            prop_assert_eq!(&c.cols()[cut..], &tail[..]);
        }
        Ok(())
    }))
}

fn blocks() -> impl Strategy<Value = Vec<(Vec<usize>, Vec<usize>)>> {
    let block = (
        prop::collection::btree_set(0usize..30, 1..8),
        prop::collection::btree_set(0usize..20, 1..6),
    )
        .prop_map(|(r, c)| (r.into_iter().collect(), c.into_iter().collect()));
    prop::collection::vec(block, 1..5)
}

/// Jaccard, recovery and relevance against hash-set cell oracles.
pub fn prop_metrics(cases: u32) -> Result<(), String> {
    report(runner(cases).run(&(blocks(), blocks()), |(expected, found)| {
        let to_cells = |v: &[(Vec<usize>, Vec<usize>)]| -> Vec<CellBlock> {
            v.iter().map(|(r, c)| CellBlock::new(r.clone(), c.clone())).collect()
        };
        let e = to_cells(&expected);
        let f = to_cells(&found);
        for (x, xo) in e.iter().zip(&expected) {
            for (y, yo) in f.iter().zip(&found) {
                let got = jaccard(x, y).unwrap();
                prop_assert!((got - oracle_jaccard(xo, yo)).abs() < 1e-12);
                prop_assert!((got - jaccard(y, x).unwrap()).abs() < 1e-15);
            }
        }
        let rec = recovery(&e, &f).unwrap();
        let rel = relevance(&e, &f).unwrap();
        prop_assert!((rec - oracle_recovery(&expected, &found)).abs() < 1e-12);
        prop_assert!((rel - oracle_recovery(&found, &expected)).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&rec) && (0.0..=1.0).contains(&rel));
        prop_assert_eq!(recovery(&e, &e).unwrap(), 1.0);
        Ok(())
    }))
}

/// Checks the reported top-rank list against an independent oracle after
/// every generation of a 200-generation run.
pub fn top_rank_invariants_run() -> Result<(), String> {
    let spec = ScenarioSpec::new(80, 30, vec![(12, 6), (10, 5)], Pattern::TrendPreserving, 11);
    let data = generate(&spec).map_err(|e| e.to_string())?;
    let cfg = EvolutionConfig {
        max_iterations: 200,
        population_size: 120,
        top_rank_capacity: 20,
        overlap_threshold: 0.5,
        threads: 1,
        rng_seed: 5,
        ..Default::default()
    };
    let mut failure: Option<String> = None;
    let mut generations = 0;
    let outcome = run_with_observer(&data.matrix, &cfg, |rep| {
        generations += 1;
        if failure.is_some() {
            return;
        }
        let entries = rep.top_rank.entries();
        let check = || -> Result<(), String> {
            rep.top_rank.check_invariants()?;
            if entries.len() > cfg.top_rank_capacity {
                return Err(format!("{} entries exceed capacity", entries.len()));
            }
            for w in entries.windows(2) {
                if w[0].fitness < w[1].fitness {
                    return Err("fitness not sorted".into());
                }
            }
            for (i, a) in entries.iter().enumerate() {
                for b in &entries[i + 1..] {
                    if a.series == b.series {
                        return Err(format!("duplicate entry {}", a.series));
                    }
                    let ov = oracle_overlap(a.series.cols(), b.series.cols());
                    if ov > cfg.overlap_threshold {
                        return Err(format!("{} and {} overlap {ov}", a.series, b.series));
                    }
                }
            }
            Ok(())
        };
        if let Err(e) = check() {
            failure = Some(format!("generation {}: {e}", rep.generation));
        }
    })
    .map_err(|e| e.to_string())?;
    if let Some(f) = failure {
        return Err(f);
    }
    if generations != outcome.generations + 1 || (outcome.generations != 200 && !outcome.terminated_early) {
        return Err(format!("observed {generations} reports for {} generations", outcome.generations));
    }
    Ok(())
}

/// Output JSON of a full search plus expansion.
pub fn search_json(matrix: &ExpressionMatrix, cfg: &EvolutionConfig, limit: usize) -> String {
    let outcome = evobic::evolution::run(matrix, cfg).unwrap();
    let found = resolve_biclusters(matrix, &outcome.top_rank, limit, &ExpansionOptions::default(), cfg.epsilon);
    evobic::bicluster::biclusters_to_json(&found).unwrap()
}

/// Same seed gives byte-identical output with 1, 2 and 8 fitness workers.
pub fn determinism_across_workers() -> Result<(), String> {
    let spec = ScenarioSpec::new(301, 40, vec![(20, 8), (15, 6)], Pattern::TrendPreserving, 3);
    let data = generate(&spec).map_err(|e| e.to_string())?;
    let outputs: Vec<String> = [1, 2, 8]
        .iter()
        .map(|&threads| {
            let cfg = EvolutionConfig {
                max_iterations: 60,
                population_size: 150,
                threads,
                rng_seed: 99,
                ..Default::default()
            };
            search_json(&data.matrix, &cfg, 10)
        })
        .collect();
    if outputs[0] != outputs[1] || outputs[0] != outputs[2] {
        return Err("outputs differ between worker counts".into());
    }
    Ok(())
}
