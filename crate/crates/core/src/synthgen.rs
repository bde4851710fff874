//! Synthetic benchmark data: standard normal background with implanted
//! biclusters of one of six patterns, plus the suites built from them.
//!
//! Implantation distributions (all configurable through [`PatternParams`]):
//! shift offsets `N(0, shift_sd²)`, scale multipliers uniform on
//! `scale_range`, base vectors `N(0, 1)`. Trend-preserving rows start at a
//! `N(0, 1)` draw and climb by increments uniform on `trend_step`, visiting
//! the block's columns in one hidden order shared by every row of the block.
//! Consecutive blocks may share rows and columns; for trend-preserving blocks
//! the hidden orders agree on shared columns, so every block stays exact.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bicluster::IndexBicluster;
use crate::error::{Error, Result};
use crate::matrix::ExpressionMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    TrendPreserving,
    ColumnConstant,
    RowConstant,
    Shift,
    Scale,
    ShiftScale,
}

impl Pattern {
    pub const ALL: [Pattern; 6] = [
        Pattern::TrendPreserving,
        Pattern::ColumnConstant,
        Pattern::RowConstant,
        Pattern::Shift,
        Pattern::Scale,
        Pattern::ShiftScale,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Pattern::TrendPreserving => "trend_preserving",
            Pattern::ColumnConstant => "column_constant",
            Pattern::RowConstant => "row_constant",
            Pattern::Shift => "shift",
            Pattern::Scale => "scale",
            Pattern::ShiftScale => "shift_scale",
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown pattern {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PatternParams {
    pub shift_sd: f64,
    pub scale_range: (f64, f64),
    pub trend_step: (f64, f64),
}

impl Default for PatternParams {
    fn default() -> Self {
        Self {
            shift_sd: 2.0,
            scale_range: (0.5, 3.0),
            trend_step: (0.5, 1.5),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub n_rows: usize,
    pub n_cols: usize,
    /// (rows, cols) of each implanted bicluster.
    pub biclusters: Vec<(usize, usize)>,
    pub pattern: Pattern,
    /// Rows and columns shared by each pair of consecutive biclusters.
    pub overlap: (usize, usize),
    pub noise_sd: f64,
    pub seed: u64,
    #[serde(default)]
    pub params: PatternParams,
}

impl ScenarioSpec {
    pub fn new(n_rows: usize, n_cols: usize, biclusters: Vec<(usize, usize)>, pattern: Pattern, seed: u64) -> Self {
        Self {
            n_rows,
            n_cols,
            biclusters,
            pattern,
            overlap: (0, 0),
            noise_sd: 0.0,
            seed,
            params: PatternParams::default(),
        }
    }

    fn check(&self) -> Result<()> {
        let infeasible = |m: String| Err(Error::ScenarioInfeasible(m));
        if self.n_rows == 0 || self.n_cols == 0 {
            return infeasible("matrix has no cells".into());
        }
        if self.biclusters.is_empty() {
            return infeasible("no biclusters to implant".into());
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return infeasible(format!("noise_sd {} must be non-negative", self.noise_sd));
        }
        let (ov_r, ov_c) = self.overlap;
        for &(h, w) in &self.biclusters {
            if h < 2 || w < 2 {
                return infeasible(format!("bicluster {h}x{w} is smaller than 2x2"));
            }
            if self.biclusters.len() > 1 && (ov_r >= h || ov_c >= w) {
                return infeasible(format!("overlap {ov_r}x{ov_c} not smaller than {h}x{w}"));
            }
        }
        let k = self.biclusters.len();
        let rows: usize = self.biclusters.iter().map(|b| b.0).sum::<usize>() - (k - 1) * ov_r;
        let cols: usize = self.biclusters.iter().map(|b| b.1).sum::<usize>() - (k - 1) * ov_c;
        if rows > self.n_rows || cols > self.n_cols {
            return infeasible(format!(
                "{k} biclusters need {rows} rows and {cols} columns, matrix is {}x{}",
                self.n_rows, self.n_cols
            ));
        }
        let (lo, hi) = self.params.scale_range;
        if !(lo > 0.0 && hi >= lo) {
            return infeasible(format!("scale range ({lo}, {hi}) must be positive"));
        }
        let (lo, hi) = self.params.trend_step;
        if !(lo > 0.0 && hi >= lo) {
            return infeasible(format!("trend step ({lo}, {hi}) must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub matrix: ExpressionMatrix,
    pub truth: Vec<IndexBicluster>,
}

/// Chains index sets so that set `i` shares its last `overlap` members with
/// the first `overlap` members of set `i + 1`.
fn place_chain<R: Rng>(n: usize, sizes: &[usize], overlap: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut pool: Vec<usize> = (0..n).collect();
    pool.shuffle(rng);
    let mut cursor = 0;
    let mut out: Vec<Vec<usize>> = Vec::with_capacity(sizes.len());
    for (i, &size) in sizes.iter().enumerate() {
        let mut members = Vec::with_capacity(size);
        let shared = if i == 0 { 0 } else { overlap };
        if shared > 0 {
            let prev = &out[i - 1];
            members.extend_from_slice(&prev[prev.len() - shared..]);
        }
        members.extend_from_slice(&pool[cursor..cursor + size - shared]);
        cursor += size - shared;
        out.push(members);
    }
    out
}

pub fn generate(spec: &ScenarioSpec) -> Result<Scenario> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n_rows, n_cols) = (spec.n_rows, spec.n_cols);
    let mut values: Vec<f64> = (0..n_rows * n_cols)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();

    let heights: Vec<usize> = spec.biclusters.iter().map(|b| b.0).collect();
    let widths: Vec<usize> = spec.biclusters.iter().map(|b| b.1).collect();
    let row_sets = place_chain(n_rows, &heights, spec.overlap.0, &mut rng);
    let col_sets = place_chain(n_cols, &widths, spec.overlap.1, &mut rng);

    let p = &spec.params;
    let normal = |rng: &mut ChaCha8Rng| rng.sample::<f64, _>(StandardNormal);
    if spec.pattern == Pattern::TrendPreserving {
        implant_trends(&mut values, n_rows, n_cols, &row_sets, &col_sets, p, &mut rng)?;
    } else {
        let shift = Normal::new(0.0, p.shift_sd)
            .map_err(|e| Error::ScenarioInfeasible(format!("shift_sd: {e}")))?;
        let scale = Uniform::new_inclusive(p.scale_range.0, p.scale_range.1)
            .map_err(|e| Error::ScenarioInfeasible(format!("scale range: {e}")))?;
        for (rows, cols) in row_sets.iter().zip(&col_sets) {
            let base: Vec<f64> = cols.iter().map(|_| normal(&mut rng)).collect();
            for &r in rows {
                let (offset, factor, row_value) = match spec.pattern {
                    Pattern::Shift => (shift.sample(&mut rng), 1.0, 0.0),
                    Pattern::Scale => (0.0, scale.sample(&mut rng), 0.0),
                    Pattern::ShiftScale => (shift.sample(&mut rng), scale.sample(&mut rng), 0.0),
                    Pattern::RowConstant => (0.0, 0.0, normal(&mut rng)),
                    Pattern::ColumnConstant | Pattern::TrendPreserving => (0.0, 1.0, 0.0),
                };
                for (&c, &b) in cols.iter().zip(&base) {
                    values[r * n_cols + c] = match spec.pattern {
                        Pattern::RowConstant => row_value,
                        Pattern::ColumnConstant => b,
                        Pattern::Shift => b + offset,
                        _ => b * factor + offset,
                    };
                }
            }
        }
    }

    if spec.noise_sd > 0.0 {
        let noise = Normal::new(0.0, spec.noise_sd)
            .map_err(|e| Error::ScenarioInfeasible(format!("noise_sd: {e}")))?;
        let mut implanted = vec![false; n_rows * n_cols];
        for (rows, cols) in row_sets.iter().zip(&col_sets) {
            for &r in rows {
                for &c in cols {
                    implanted[r * n_cols + c] = true;
                }
            }
        }
        for (v, hit) in values.iter_mut().zip(implanted) {
            if hit {
                *v += noise.sample(&mut rng);
            }
        }
    }

    let truth = row_sets
        .into_iter()
        .zip(col_sets)
        .map(|(mut rows, mut columns)| {
            rows.sort_unstable();
            columns.sort_unstable();
            IndexBicluster { rows, columns }
        })
        .collect();
    Ok(Scenario {
        matrix: ExpressionMatrix::from_values(values, n_rows, n_cols)?,
        truth,
    })
}

/// Every implanted row climbs through the union of its blocks' columns in
/// the order given by one global random rank of the columns.
fn implant_trends(
    values: &mut [f64],
    n_rows: usize,
    n_cols: usize,
    row_sets: &[Vec<usize>],
    col_sets: &[Vec<usize>],
    p: &PatternParams,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let mut rank: Vec<usize> = (0..n_cols).collect();
    rank.shuffle(rng);
    let step = Uniform::new_inclusive(p.trend_step.0, p.trend_step.1)
        .map_err(|e| Error::ScenarioInfeasible(format!("trend step: {e}")))?;

    let mut row_cols: Vec<Vec<usize>> = vec![Vec::new(); n_rows];
    for (rows, cols) in row_sets.iter().zip(col_sets) {
        for &r in rows {
            row_cols[r].extend_from_slice(cols);
        }
    }
    for (r, cols) in row_cols.iter_mut().enumerate() {
        if cols.is_empty() {
            continue;
        }
        cols.sort_unstable_by_key(|&c| rank[c]);
        cols.dedup();
        let increments: Vec<f64> = (1..cols.len()).map(|_| step.sample(rng)).collect();
        let total: f64 = increments.iter().sum();
        let mut v = rng.sample::<f64, _>(StandardNormal) - total / 2.0;
        values[r * n_cols + cols[0]] = v;
        for (&c, inc) in cols[1..].iter().zip(&increments) {
            v += inc;
            values[r * n_cols + c] = v;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Patterns,
    Overlap,
    Narrow,
    Scaling,
    Noise,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "patterns" => Ok(Suite::Patterns),
            "overlap" => Ok(Suite::Overlap),
            "narrow" => Ok(Suite::Narrow),
            "scaling" => Ok(Suite::Scaling),
            "noise" => Ok(Suite::Noise),
            _ => Err(Error::InvalidConfig(format!("unknown suite {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    /// Biclusters per overlap dataset.
    pub overlap_blocks: usize,
    pub scaling_rows: Vec<usize>,
    pub variants: Option<usize>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            overlap_blocks: 3,
            scaling_rows: vec![5_000, 10_000, 15_000, 20_000, 25_000],
            variants: None,
        }
    }
}

/// Mixes a master seed with a dataset index (splitmix64 finaliser).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub const NOISE_LEVELS: [f64; 5] = [0.05, 0.1, 0.15, 0.2, 0.25];

pub const PATTERN_SCALES: [(usize, usize, usize, usize); 3] =
    [(150, 100, 3, 15), (200, 150, 4, 20), (300, 200, 5, 25)];

/// Named scenario specs of a suite, in a fixed order.
pub fn suite_specs(suite: Suite, master_seed: u64, opts: &SuiteOptions) -> Vec<(String, ScenarioSpec)> {
    let mut out = Vec::new();
    let mut push = |name: String, mut spec: ScenarioSpec| {
        spec.seed = derive_seed(master_seed, out.len() as u64);
        out.push((name, spec));
    };
    match suite {
        Suite::Patterns => {
            let variants = opts.variants.unwrap_or(5);
            for pattern in Pattern::ALL {
                for (rows, cols, k, size) in PATTERN_SCALES {
                    for v in 1..=variants {
                        push(
                            format!("{pattern}_{rows}x{cols}_v{v}"),
                            ScenarioSpec::new(rows, cols, vec![(size, size); k], pattern, 0),
                        );
                    }
                }
            }
        }
        Suite::Overlap => {
            let variants = opts.variants.unwrap_or(5);
            for ov in [0, 3, 6, 9] {
                for v in 1..=variants {
                    let mut spec = ScenarioSpec::new(
                        200,
                        150,
                        vec![(20, 20); opts.overlap_blocks],
                        Pattern::TrendPreserving,
                        0,
                    );
                    spec.overlap = (ov, ov);
                    push(format!("overlap_{ov}x{ov}_v{v}"), spec);
                }
            }
        }
        Suite::Narrow => {
            let variants = opts.variants.unwrap_or(3);
            for width in [10, 20, 30] {
                for v in 1..=variants {
                    push(
                        format!("narrow_100x{width}_v{v}"),
                        ScenarioSpec::new(1000, 100, vec![(100, width)], Pattern::TrendPreserving, 0),
                    );
                }
            }
        }
        Suite::Noise => {
            let variants = opts.variants.unwrap_or(5);
            for sd in NOISE_LEVELS {
                for v in 1..=variants {
                    let mut spec =
                        ScenarioSpec::new(150, 100, vec![(15, 15); 3], Pattern::TrendPreserving, 0);
                    spec.noise_sd = sd;
                    push(format!("noise_{sd}_v{v}"), spec);
                }
            }
        }
        Suite::Scaling => {
            for &rows in &opts.scaling_rows {
                push(
                    format!("scaling_{rows}x100"),
                    ScenarioSpec::new(rows, 100, vec![(100, 15); 3], Pattern::TrendPreserving, 0),
                );
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub matrix: PathBuf,
    pub truth: PathBuf,
    pub seed: u64,
    pub spec: ScenarioSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub suite: Suite,
    pub master_seed: u64,
    pub datasets: Vec<ManifestEntry>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Writes every dataset of the suite (`<name>.tsv` plus `<name>_truth.json`)
/// and a `manifest.json` into `out_dir`. Paths in the manifest are relative
/// to `out_dir`.
pub fn emit_suite(out_dir: &Path, suite: Suite, master_seed: u64, opts: &SuiteOptions) -> Result<Manifest> {
    std::fs::create_dir_all(out_dir)?;
    let specs = suite_specs(suite, master_seed, opts);
    let datasets = specs
        .into_par_iter()
        .map(|(name, spec)| {
            let scenario = generate(&spec)?;
            let matrix = PathBuf::from(format!("{name}.tsv"));
            let truth = PathBuf::from(format!("{name}_truth.json"));
            scenario.matrix.save_tsv(out_dir.join(&matrix))?;
            std::fs::write(out_dir.join(&truth), serde_json::to_string(&scenario.truth)?)?;
            Ok(ManifestEntry {
                name,
                matrix,
                truth,
                seed: spec.seed,
                spec,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = Manifest {
        suite,
        master_seed,
        datasets,
    };
    std::fs::write(out_dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}
