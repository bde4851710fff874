use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use evobic::bicluster::{Bicluster, IndexBicluster};
use evobic::cbf::{decode_population, encode_raw, CbfPopulation};
use evobic::evolution::EvolutionConfig;
use evobic::expansion::{resolve_biclusters, ExpansionOptions};
use evobic::fitness::{count_matches_eps, ChunkPlan, FitnessParams};
use evobic::matrix::ExpressionMatrix;
use evobic::metrics::CellBlock;
use evobic::synthgen::{Pattern, ScenarioSpec};

fn err(e: evobic::Error) -> PyErr {
    match e {
        evobic::Error::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Dense expression matrix (rows are genes, columns are conditions).
#[pyclass(name = "Matrix", module = "evobic", frozen)]
struct PyMatrix {
    inner: ExpressionMatrix,
}

#[pymethods]
impl PyMatrix {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self {
            inner: ExpressionMatrix::from_rows(&rows).map_err(err)?,
        })
    }

    #[staticmethod]
    fn load_tsv(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: ExpressionMatrix::load_tsv(path).map_err(err)?,
        })
    }

    fn save_tsv(&self, path: &str) -> PyResult<()> {
        self.inner.save_tsv(path).map_err(err)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.n_rows(), self.inner.n_cols())
    }

    fn get(&self, row: usize, col: usize) -> PyResult<f64> {
        if row >= self.inner.n_rows() || col >= self.inner.n_cols() {
            return Err(PyValueError::new_err(format!("index ({row}, {col}) out of range")));
        }
        Ok(self.inner.get(row, col))
    }

    fn to_list(&self) -> Vec<Vec<f64>> {
        (0..self.inner.n_rows()).map(|r| self.inner.row(r).to_vec()).collect()
    }

    #[getter]
    fn row_labels(&self) -> Vec<String> {
        self.inner.row_labels().to_vec()
    }

    #[getter]
    fn col_labels(&self) -> Vec<String> {
        self.inner.col_labels().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("Matrix({}x{})", self.inner.n_rows(), self.inner.n_cols())
    }
}

/// Flattens a population into `(offsets, col_indices)`.
#[pyfunction]
fn encode_population(population: Vec<Vec<usize>>) -> PyResult<(Vec<usize>, Vec<usize>)> {
    let cbf = encode_raw(&population).map_err(err)?;
    Ok((cbf.offsets().to_vec(), cbf.col_indices().to_vec()))
}

#[pyfunction]
#[pyo3(name = "decode_population")]
fn decode_population_py(offsets: Vec<usize>, col_indices: Vec<usize>) -> PyResult<Vec<Vec<usize>>> {
    let cbf = CbfPopulation::from_parts(offsets, col_indices).map_err(err)?;
    Ok(decode_population(&cbf).into_iter().map(|s| s.into_inner()).collect())
}

#[pyfunction]
#[pyo3(signature = (match_count, series_len, sigma = 4))]
fn fitness(match_count: u64, series_len: usize, sigma: usize) -> PyResult<f64> {
    let params = FitnessParams::new(sigma).map_err(err)?;
    Ok(evobic::fitness::fitness(match_count, series_len, &params))
}

/// Matching-row count of every series in `population`.
#[pyfunction]
#[pyo3(signature = (matrix, population, workers = 1, epsilon = 0.0))]
fn count_matches(
    py: Python<'_>,
    matrix: &PyMatrix,
    population: Vec<Vec<usize>>,
    workers: usize,
    epsilon: f64,
) -> PyResult<Vec<u64>> {
    let m = &matrix.inner;
    if let Some(c) = population.iter().flatten().find(|&&c| c >= m.n_cols()) {
        return Err(PyValueError::new_err(format!("column {c} out of range")));
    }
    let cbf = encode_raw(&population).map_err(err)?;
    let plan = ChunkPlan::new(m.n_rows(), workers);
    Ok(py.detach(|| count_matches_eps(m, &cbf, &plan, epsilon)))
}

fn bicluster_dict<'py>(py: Python<'py>, b: &Bicluster) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("fitness", b.fitness)?;
    d.set_item("columns", b.series.cols().to_vec())?;
    d.set_item("rows", b.rows.clone())?;
    let flags: Vec<&str> = b
        .flags
        .iter()
        .map(|f| match f {
            evobic::bicluster::RowFlag::Exact => "exact",
            evobic::bicluster::RowFlag::Negative => "negative",
            evobic::bicluster::RowFlag::Approximate => "approximate",
        })
        .collect();
    d.set_item("row_flags", flags)?;
    Ok(d)
}

/// Runs the search and returns up to `biclusters` results as dicts with
/// `fitness`, `columns`, `rows` and `row_flags`.
#[pyfunction]
#[pyo3(signature = (
    matrix, iterations = 5000, seed = 0, population = 400, overlap = 0.75,
    threads = 0, biclusters = 100, negative_trends = true, approx_violations = 1,
    sigma = None, epsilon = 0.0,
))]
#[allow(clippy::too_many_arguments)]
fn run<'py>(
    py: Python<'py>,
    matrix: &PyMatrix,
    iterations: usize,
    seed: u64,
    population: usize,
    overlap: f64,
    threads: usize,
    biclusters: usize,
    negative_trends: bool,
    approx_violations: usize,
    sigma: Option<usize>,
    epsilon: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = EvolutionConfig {
        max_iterations: iterations,
        rng_seed: seed,
        population_size: population,
        overlap_threshold: overlap,
        threads,
        sigma,
        epsilon,
        ..Default::default()
    };
    let opts = ExpansionOptions {
        allow_negative: negative_trends,
        approx_violations,
    };
    let m = &matrix.inner;
    let found = py
        .detach(|| {
            evobic::evolution::run(m, &cfg)
                .map(|out| resolve_biclusters(m, &out.top_rank, biclusters, &opts, cfg.epsilon))
        })
        .map_err(err)?;
    found.iter().map(|b| bicluster_dict(py, b)).collect()
}

/// Synthetic matrix with implanted biclusters; returns `(matrix, truth)`
/// where truth is a list of `{"rows", "columns"}` dicts.
#[pyfunction]
#[pyo3(signature = (n_rows, n_cols, biclusters, pattern = "trend_preserving", seed = 0, overlap = (0, 0), noise_sd = 0.0))]
fn generate<'py>(
    py: Python<'py>,
    n_rows: usize,
    n_cols: usize,
    biclusters: Vec<(usize, usize)>,
    pattern: &str,
    seed: u64,
    overlap: (usize, usize),
    noise_sd: f64,
) -> PyResult<(PyMatrix, Vec<Bound<'py, PyDict>>)> {
    let pattern: Pattern = pattern.parse().map_err(err)?;
    let mut spec = ScenarioSpec::new(n_rows, n_cols, biclusters, pattern, seed);
    spec.overlap = overlap;
    spec.noise_sd = noise_sd;
    let scenario = evobic::synthgen::generate(&spec).map_err(err)?;
    let truth = scenario
        .truth
        .iter()
        .map(|t| {
            let d = PyDict::new(py);
            d.set_item("rows", t.rows.clone())?;
            d.set_item("columns", t.columns.clone())?;
            Ok(d)
        })
        .collect::<PyResult<Vec<_>>>()?;
    Ok((PyMatrix { inner: scenario.matrix }, truth))
}

type Block = (Vec<usize>, Vec<usize>);

fn blocks(v: Vec<Block>) -> Vec<CellBlock> {
    v.into_iter().map(|(r, c)| CellBlock::new(r, c)).collect()
}

/// Cell-level Jaccard index of two `(rows, columns)` pairs.
#[pyfunction]
fn jaccard(a: Block, b: Block) -> PyResult<f64> {
    evobic::metrics::jaccard(&CellBlock::new(a.0, a.1), &CellBlock::new(b.0, b.1)).map_err(err)
}

#[pyfunction]
fn recovery(expected: Vec<Block>, found: Vec<Block>) -> PyResult<f64> {
    evobic::metrics::recovery(&blocks(expected), &blocks(found)).map_err(err)
}

#[pyfunction]
fn relevance(expected: Vec<Block>, found: Vec<Block>) -> PyResult<f64> {
    evobic::metrics::relevance(&blocks(expected), &blocks(found)).map_err(err)
}

/// `(recovery, relevance)` of found `(rows, columns)` pairs against truth.
#[pyfunction]
fn score(truth: Vec<Block>, found: Vec<Block>) -> PyResult<(f64, f64)> {
    let to_index = |v: Vec<Block>| -> Vec<IndexBicluster> {
        v.into_iter().map(|(rows, columns)| IndexBicluster { rows, columns }).collect()
    };
    let report = evobic::metrics::score(&to_index(truth), &to_index(found)).map_err(err)?;
    Ok((report.recovery, report.relevance))
}

#[pymodule]
#[pyo3(name = "evobic")]
fn evobic_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMatrix>()?;
    m.add_function(wrap_pyfunction!(encode_population, m)?)?;
    m.add_function(wrap_pyfunction!(decode_population_py, m)?)?;
    m.add_function(wrap_pyfunction!(fitness, m)?)?;
    m.add_function(wrap_pyfunction!(count_matches, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(jaccard, m)?)?;
    m.add_function(wrap_pyfunction!(recovery, m)?)?;
    m.add_function(wrap_pyfunction!(relevance, m)?)?;
    m.add_function(wrap_pyfunction!(score, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
