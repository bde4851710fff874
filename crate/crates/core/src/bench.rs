//! Wall-clock scaling harness over matrices of growing row count.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::evolution::{run, EvolutionConfig};
use crate::synthgen::{generate, suite_specs, Suite, SuiteOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub rows: usize,
    pub mean_seconds: f64,
    pub sd_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub rows: Vec<usize>,
    pub repeats: usize,
    pub iterations: usize,
    pub seed: u64,
    pub threads: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            rows: vec![5_000, 10_000, 15_000, 20_000, 25_000],
            repeats: 5,
            iterations: 200,
            seed: 0,
            threads: 0,
        }
    }
}

/// Generates one 100-column dataset per row count and times full searches
/// on it. Only the search is timed, not data generation.
pub fn run_bench(opts: &BenchOptions) -> Result<Vec<BenchRow>> {
    if opts.repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be positive".into()));
    }
    let suite_opts = SuiteOptions {
        scaling_rows: opts.rows.clone(),
        ..Default::default()
    };
    let mut out = Vec::with_capacity(opts.rows.len());
    for (rows, (_, spec)) in opts
        .rows
        .iter()
        .zip(suite_specs(Suite::Scaling, opts.seed, &suite_opts))
    {
        let scenario = generate(&spec)?;
        let cfg = EvolutionConfig {
            max_iterations: opts.iterations,
            rng_seed: opts.seed,
            threads: opts.threads,
            ..Default::default()
        };
        let mut times = Vec::with_capacity(opts.repeats);
        for _ in 0..opts.repeats {
            let start = Instant::now();
            run(&scenario.matrix, &cfg)?;
            times.push(start.elapsed().as_secs_f64());
        }
        let n = times.len() as f64;
        let mean = times.iter().sum::<f64>() / n;
        let sd = if times.len() > 1 {
            (times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        log::info!("{rows} rows: {mean:.3}s mean over {} runs", times.len());
        out.push(BenchRow {
            rows: *rows,
            mean_seconds: mean,
            sd_seconds: sd,
        });
    }
    Ok(out)
}

pub const CSV_HEADER: &str = "rows,mean_seconds,sd_seconds";

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!("{},{:.6},{:.6}\n", r.rows, r.mean_seconds, r.sd_seconds));
    }
    s
}

pub fn parse_csv(text: &str) -> Result<Vec<BenchRow>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(CSV_HEADER) {
        return Err(Error::InvalidConfig("missing bench CSV header".into()));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let bad = || Error::InvalidConfig(format!("bad bench CSV line {l:?}"));
            if f.len() != 3 {
                return Err(bad());
            }
            Ok(BenchRow {
                rows: f[0].parse().map_err(|_| bad())?,
                mean_seconds: f[1].parse().map_err(|_| bad())?,
                sd_seconds: f[2].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}
