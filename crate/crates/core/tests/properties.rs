mod support;

use proptest::prelude::*;

use evobic::cbf::{encode_raw, CbfPopulation};
use evobic::evolution::{tournament_select, ColumnPenaltyTable};
use evobic::evolution::TabuList;
use evobic::fitness::{count_matches, fitness, ChunkPlan, FitnessParams};
use evobic::matrix::ExpressionMatrix;
use evobic::series::ColumnSeries;

use support::*;

#[test]
fn cbf_round_trip_10k_populations() {
    prop_cbf_round_trip(10_000).unwrap();
}

#[test]
fn count_matches_agrees_with_row_oracle() {
    prop_count_matches(500).unwrap();
}

#[test]
fn fitness_direct_arithmetic() {
    fitness_hand_cases().unwrap();
}

#[test]
fn operators_produce_valid_series() {
    prop_operators(10_000).unwrap();
}

#[test]
fn metrics_agree_with_cell_oracle() {
    prop_metrics(1_000).unwrap();
}

#[test]
fn corrupt_cbf_is_rejected() {
    assert!(CbfPopulation::from_parts(vec![0], vec![]).is_err());
    assert!(CbfPopulation::from_parts(vec![1, 3], vec![0, 1, 2]).is_err());
    assert!(CbfPopulation::from_parts(vec![0, 2, 2], vec![0, 1]).is_err());
    assert!(CbfPopulation::from_parts(vec![0, 2, 5], vec![0, 1, 2, 3]).is_err());
    assert!(CbfPopulation::from_parts(vec![0, 2], vec![3, 3]).is_err());
    assert!(CbfPopulation::from_parts(vec![0, 1], vec![3]).is_err());
    assert!(encode_raw(&[]).is_err());
    let ok = CbfPopulation::from_parts(vec![0, 2, 5], vec![0, 1, 4, 2, 3]).unwrap();
    assert_eq!(ok.get(1), &[4, 2, 3]);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn appending_a_column_never_adds_rows(m in tied_matrix(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..m.n_cols()).collect();
        perm.shuffle(&mut rng);
        let plan = ChunkPlan::new(m.n_rows(), 1);
        let prefixes: Vec<Vec<usize>> = (2..=perm.len()).map(|k| perm[..k].to_vec()).collect();
        let counts = count_matches(&m, &encode_raw(&prefixes).unwrap(), &plan);
        for w in counts.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn fitness_is_monotone(rows in 2u64..500, len in 2usize..60, sigma in 2usize..50) {
        let p = FitnessParams::new(sigma).unwrap();
        let f = fitness(rows, len, &p);
        prop_assert!(f >= 0.0);
        prop_assert!(fitness(rows + 1, len, &p) >= f);
        prop_assert!(fitness(rows, len + 1, &p) >= f);
        prop_assert!((f - oracle_fitness(rows, len, sigma)).abs() <= 1e-9 * f.max(1.0));
    }

    #[test]
    fn tournament_ignores_fitness_scale(
        fits in prop::collection::vec(0.0f64..100.0, 2..30),
        scale in 0.01f64..100.0,
        seed in any::<u64>(),
    ) {
        use rand::SeedableRng;
        let n = fits.len();
        let pop: Vec<ColumnSeries> = (0..n).map(|i| ColumnSeries::new(vec![i % 7, 7 + i % 5]).unwrap()).collect();
        let mut pen = ColumnPenaltyTable::new(12);
        pen.record(&[0, 1, 7]);
        pen.record(&[0, 8]);
        let scaled: Vec<f64> = fits.iter().map(|f| f * scale).collect();
        for _ in 0..5 {
            let mut r1 = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut r2 = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = tournament_select(&pop, &fits, &pen, 4, 1.2, &mut r1);
            let b = tournament_select(&pop, &scaled, &pen, 4, 1.2, &mut r2);
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn tabu_rejects_exact_repeats_only(series in prop::collection::vec(series_in(12), 1..40)) {
        let mut tabu = TabuList::for_columns(12);
        let mut seen = std::collections::HashSet::new();
        let mut hits = 0;
        for s in &series {
            let fresh = tabu.insert(&ColumnSeries::new(s.clone()).unwrap());
            prop_assert_eq!(fresh, seen.insert(s.clone()));
            hits += usize::from(!fresh);
        }
        prop_assert_eq!(tabu.hit_counter, hits);
        prop_assert_eq!(tabu.len(), seen.len());
    }
}

#[test]
fn penalty_divides_by_base_to_mean_usage() {
    let mut pen = ColumnPenaltyTable::new(4);
    for _ in 0..5 {
        pen.record(&[0, 1]);
    }
    let used = ColumnSeries::new(vec![0, 1]).unwrap();
    let fresh = ColumnSeries::new(vec![2, 3]).unwrap();
    let adjusted = pen.adjusted(10.0, used.cols(), 1.2);
    assert!((adjusted - 4.018775720164609).abs() < 1e-9, "{adjusted}");
    assert_eq!(pen.adjusted(10.0, fresh.cols(), 1.2), 10.0);

    // Equal raw fitness: the unpenalised candidate wins unless it is never
    // drawn (probability 2^-8 per tournament).
    let pop = vec![used, fresh];
    let mut rng = evobic::evolution::seeded_rng(1);
    let wins = |fits: [f64; 2], rng: &mut evobic::evolution::SearchRng| {
        (0..400).filter(|_| tournament_select(&pop, &fits, &pen, 8, 1.2, rng) == 1).count()
    };
    assert!(wins([10.0, 10.0], &mut rng) >= 380);
    // A large enough raw advantage beats the penalty.
    assert!(wins([41.0, 10.0], &mut rng) <= 20);
}

/// On iid continuous data a series of length m matches a row with
/// probability 1/m!.
#[test]
fn random_rows_match_with_inverse_factorial_rate() {
    use rand::{Rng, SeedableRng};
    let rows = 60_000;
    let cols = 6;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let vals: Vec<f64> = (0..rows * cols).map(|_| rng.random::<f64>()).collect();
    let m = ExpressionMatrix::from_values(vals, rows, cols).unwrap();
    let pop = encode_raw(&[vec![0, 1], vec![3, 1, 5], vec![2, 0, 4, 1], vec![5, 4, 3, 2, 1]]).unwrap();
    let counts = count_matches(&m, &pop, &ChunkPlan::new(rows, 3));
    for (len, &got) in [2u64, 3, 4, 5].iter().zip(&counts) {
        let p = 1.0 / (1..=*len).product::<u64>() as f64;
        let mean = p * rows as f64;
        let sd = (rows as f64 * p * (1.0 - p)).sqrt();
        assert!(
            (got as f64 - mean).abs() < 5.0 * sd,
            "length {len}: {got} matches, expected {mean:.1} +- {sd:.1}"
        );
    }
}
