//! Python bindings. Vectors and matrices cross the boundary as plain lists.

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hilbert_simplex::embed::{self, Coordinates, EmbeddingConfig, EmbeddingResult, Target};
use hilbert_simplex::geometry::{self, LogRepPoint, PartitionSpec, PositiveVector};
use hilbert_simplex::graphs::{self, DistanceMatrix, SimilarityMatrix, SquareMatrix};
use hilbert_simplex::manifolds::{self, AmbientParam, ManifoldKind};
use hilbert_simplex::render;
use hilbert_simplex::rng::rng_from_seed;
use hilbert_simplex::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        Error::Divergence { .. } | Error::AllTrialsDiverged { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        e => PyValueError::new_err(e.to_string()),
    }
}

fn kind_of(name: &str) -> PyResult<ManifoldKind> {
    name.parse().map_err(py_err)
}

fn positive(v: Vec<f64>) -> PyResult<PositiveVector> {
    PositiveVector::new(v).map_err(py_err)
}

fn simplex(v: Vec<f64>) -> PyResult<geometry::SimplexPoint> {
    geometry::SimplexPoint::new(v).map_err(py_err)
}

fn square(rows: Vec<Vec<f64>>) -> PyResult<SquareMatrix> {
    SquareMatrix::from_rows(rows).map_err(py_err)
}

fn rows_of(m: &SquareMatrix) -> Vec<Vec<f64>> {
    m.rows().map(<[f64]>::to_vec).collect()
}

/// A point of the open probability simplex.
#[pyclass(frozen, skip_from_py_object, name = "SimplexPoint")]
#[derive(Clone)]
struct PySimplexPoint(geometry::SimplexPoint);

#[pymethods]
impl PySimplexPoint {
    #[new]
    fn new(coords: Vec<f64>) -> PyResult<Self> {
        Ok(PySimplexPoint(simplex(coords)?))
    }

    #[staticmethod]
    fn uniform(length: usize) -> PyResult<Self> {
        Ok(PySimplexPoint(geometry::SimplexPoint::uniform(length).map_err(py_err)?))
    }

    /// A uniformly distributed random point.
    #[staticmethod]
    fn random(length: usize, seed: u64) -> PyResult<Self> {
        if length < 1 {
            return Err(PyValueError::new_err("length must be >= 1"));
        }
        Ok(PySimplexPoint(geometry::SimplexPoint::random(&mut rng_from_seed(seed), length)))
    }

    #[getter]
    fn coords(&self) -> Vec<f64> {
        self.0.coords().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("SimplexPoint({:?})", self.0.coords())
    }
}

/// Simple undirected graph on nodes `0..n`.
#[pyclass(frozen, skip_from_py_object, name = "Graph")]
#[derive(Clone)]
struct PyGraph(graphs::Graph);

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (n, edges = Vec::new()))]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyGraph(graphs::Graph::from_edges(n, edges).map_err(py_err)?))
    }

    #[staticmethod]
    fn erdos_renyi(n: usize, p: f64, seed: u64) -> PyResult<Self> {
        Ok(PyGraph(graphs::gen_erdos_renyi(n, p, seed).map_err(py_err)?))
    }

    #[staticmethod]
    fn barabasi_albert(n: usize, m: usize, seed: u64) -> PyResult<Self> {
        Ok(PyGraph(graphs::gen_barabasi_albert(n, m, seed).map_err(py_err)?))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges().collect()
    }

    fn edge_count(&self) -> usize {
        self.0.edge_count()
    }

    fn is_connected(&self) -> bool {
        self.0.is_connected()
    }

    /// Hop-count distance matrix.
    fn shortest_paths(&self) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows_of(graphs::all_pairs_shortest_paths(&self.0).map_err(py_err)?.matrix()))
    }

    /// Row-stochastic `steps`-step walk similarity with the diagonal removed.
    #[pyo3(signature = (steps = 5))]
    fn random_walk_similarity(&self, steps: usize) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows_of(graphs::random_walk_similarity(&self.0, steps).map_err(py_err)?.matrix()))
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.0.n(), self.0.edge_count())
    }
}

#[pyfunction]
fn funk_distance(p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
    geometry::funk_distance(&positive(p)?, &positive(q)?).map_err(py_err)
}

#[pyfunction]
fn hilbert_distance(p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
    geometry::hilbert_distance(&positive(p)?, &positive(q)?).map_err(py_err)
}

/// Hilbert distance evaluated through the cross-ratio along the chord.
#[pyfunction]
fn cross_ratio_distance(p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
    geometry::cross_ratio_oracle(&simplex(p)?, &simplex(q)?).map_err(py_err)
}

#[pyfunction]
fn aitchison_distance(p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
    geometry::aitchison_distance(&simplex(p)?, &simplex(q)?).map_err(py_err)
}

#[pyfunction]
fn variation_norm(x: Vec<f64>) -> PyResult<f64> {
    geometry::variation_norm(&x).map_err(py_err)
}

/// Centered log-ratio coordinates.
#[pyfunction]
fn to_log_coordinates(p: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(geometry::to_log_coordinates(&simplex(p)?).coords().to_vec())
}

#[pyfunction]
fn from_log_coordinates(v: Vec<f64>) -> PyResult<Vec<f64>> {
    let v = LogRepPoint::new(v).map_err(py_err)?;
    Ok(geometry::from_log_coordinates(&v).map_err(py_err)?.coords().to_vec())
}

#[pyfunction]
fn softmax(v: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(geometry::softmax_point(&v).map_err(py_err)?.coords().to_vec())
}

#[pyfunction]
fn lse_funk_upper(p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
    geometry::lse_funk_upper(&positive(p)?, &positive(q)?).map_err(py_err)
}

#[pyfunction]
fn lse_hilbert_surrogate(p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
    geometry::lse_hilbert_surrogate(&positive(p)?, &positive(q)?).map_err(py_err)
}

/// Merges coordinates of `p` according to `blocks`, a partition of its indices.
#[pyfunction]
fn coarse_grain(p: Vec<f64>, blocks: Vec<Vec<usize>>) -> PyResult<Vec<f64>> {
    let len = p.len();
    let part = PartitionSpec::new(blocks, len).map_err(py_err)?;
    Ok(geometry::coarse_grain(&simplex(p)?, &part).map_err(py_err)?.coords().to_vec())
}

#[pyfunction]
fn manifold_distance(kind: &str, u: Vec<f64>, w: Vec<f64>) -> PyResult<f64> {
    let (u, w) = (AmbientParam::new(u).map_err(py_err)?, AmbientParam::new(w).map_err(py_err)?);
    manifolds::manifold_distance(kind_of(kind)?, &u, &w).map_err(py_err)
}

/// Gradients of `manifold_distance` with respect to `u` and `w`.
#[pyfunction]
fn manifold_distance_grad(kind: &str, u: Vec<f64>, w: Vec<f64>) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let (u, w) = (AmbientParam::new(u).map_err(py_err)?, AmbientParam::new(w).map_err(py_err)?);
    manifolds::manifold_distance_grad(kind_of(kind)?, &u, &w).map_err(py_err)
}

#[pyfunction]
fn random_points_distance_matrix(n: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    Ok(rows_of(graphs::random_points_distance_matrix(n, seed).map_err(py_err)?.matrix()))
}

fn coordinates(y: Vec<Vec<f64>>) -> PyResult<Coordinates> {
    Coordinates::from_rows(&y).map_err(py_err)
}

#[pyfunction]
fn stress_loss(target: Vec<Vec<f64>>, y: Vec<Vec<f64>>, kind: &str) -> PyResult<f64> {
    let d = DistanceMatrix::new(square(target)?).map_err(py_err)?;
    embed::stress_loss(&d, &coordinates(y)?, kind_of(kind)?).map_err(py_err)
}

#[pyfunction]
fn kl_loss(target: Vec<Vec<f64>>, y: Vec<Vec<f64>>, kind: &str) -> PyResult<f64> {
    let p = SimilarityMatrix::new(square(target)?).map_err(py_err)?;
    embed::kl_loss(&p, &coordinates(y)?, kind_of(kind)?).map_err(py_err)
}

fn target_of(rows: Vec<Vec<f64>>, loss: &str) -> PyResult<Target> {
    let m = square(rows)?;
    match loss {
        "stress" => Ok(Target::Distance(DistanceMatrix::new(m).map_err(py_err)?)),
        "kl" => Ok(Target::Similarity(SimilarityMatrix::new(m).map_err(py_err)?)),
        other => Err(PyValueError::new_err(format!(
            "loss must be 'stress' or 'kl', got {other:?}"
        ))),
    }
}

fn result_dict<'py>(
    py: Python<'py>,
    config: &EmbeddingConfig,
    result: &EmbeddingResult,
) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    let y: Vec<Vec<f64>> = result.y.rows().map(<[f64]>::to_vec).collect();
    out.set_item("y", y)?;
    out.set_item("final_loss", result.final_loss)?;
    out.set_item("loss_trace", result.loss_trace.clone())?;
    out.set_item("epochs_run", result.epochs_run)?;
    out.set_item("learning_rate", config.learning_rate)?;
    out.set_item("batch_size", config.batch_size)?;
    out.set_item("seed", config.seed)?;
    Ok(out)
}

fn template(kind: &str, d: usize, n: usize, max_epochs: usize) -> PyResult<EmbeddingConfig> {
    let mut config = EmbeddingConfig::new(kind_of(kind)?, d, n);
    config.max_epochs = max_epochs;
    Ok(config)
}

/// Mini-batch SGD with momentum. `loss` is "stress" (distance target) or
/// "kl" (similarity target).
#[pyfunction]
#[pyo3(signature = (target, kind, d, loss = "stress", learning_rate = 0.01, batch_size = 16, seed = 0, max_epochs = embed::DEFAULT_MAX_EPOCHS))]
#[allow(clippy::too_many_arguments)]
fn sgd_embed<'py>(
    py: Python<'py>,
    target: Vec<Vec<f64>>,
    kind: &str,
    d: usize,
    loss: &str,
    learning_rate: f64,
    batch_size: usize,
    seed: u64,
    max_epochs: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let target = target_of(target, loss)?;
    let mut config = template(kind, d, target.n(), max_epochs)?;
    config.learning_rate = learning_rate;
    config.batch_size = batch_size.min(target.n());
    config.seed = seed;
    let result = py
        .detach(|| embed::sgd_embed(&config, &target))
        .map_err(py_err)?;
    result_dict(py, &config, &result)
}

/// Random search over learning rate and batch size; returns the best run.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (target, kind, d, loss = "stress", trials = embed::DEFAULT_TRIALS, seed = 0, max_epochs = embed::DEFAULT_MAX_EPOCHS))]
fn hyperparameter_search<'py>(
    py: Python<'py>,
    target: Vec<Vec<f64>>,
    kind: &str,
    d: usize,
    loss: &str,
    trials: usize,
    seed: u64,
    max_epochs: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let target = target_of(target, loss)?;
    let config = template(kind, d, target.n(), max_epochs)?;
    let outcome = py
        .detach(|| embed::hyperparameter_search(&config, &target, trials, seed))
        .map_err(py_err)?;
    let out = result_dict(py, &outcome.config, &outcome.result)?;
    let trials: Vec<(f64, usize, Option<f64>)> = outcome
        .trials
        .iter()
        .map(|t| (t.learning_rate, t.batch_size, t.final_loss))
        .collect();
    out.set_item("trials", trials)?;
    Ok(out)
}

/// Binary PGM of a distance field around `center` on the 2-simplex.
/// `distance` is one of "hilbert", "funk", "rfunk", "aitchison".
#[pyfunction]
#[pyo3(signature = (distance, center, resolution = 256, levels = 10))]
fn render_balls(distance: &str, center: Vec<f64>, resolution: usize, levels: usize) -> PyResult<Vec<u8>> {
    let distance = match distance {
        "hilbert" => render::FieldDistance::Hilbert,
        "funk" => render::FieldDistance::FunkForward,
        "rfunk" => render::FieldDistance::FunkReverse,
        "aitchison" => render::FieldDistance::Aitchison,
        other => return Err(PyValueError::new_err(format!("unknown distance {other:?}"))),
    };
    let field = render::render_distance_field(distance, &simplex(center)?, resolution).map_err(py_err)?;
    Ok(field.to_pgm(&field.contour_levels(levels)))
}

/// Binary PPM of the Voronoi diagram of `sites` on the 2-simplex.
/// `distance` is one of "hilbert", "aitchison", "varlog".
#[pyfunction]
#[pyo3(signature = (sites, distance = "hilbert", resolution = 256))]
fn render_voronoi(sites: Vec<Vec<f64>>, distance: &str, resolution: usize) -> PyResult<Vec<u8>> {
    let distance = match distance {
        "hilbert" => render::VoronoiDistance::Hilbert,
        "aitchison" => render::VoronoiDistance::Aitchison,
        "varlog" => render::VoronoiDistance::VariationNormOnLogRep,
        other => return Err(PyValueError::new_err(format!("unknown distance {other:?}"))),
    };
    let sites = sites.into_iter().map(simplex).collect::<PyResult<Vec<_>>>()?;
    Ok(render::render_voronoi(&sites, distance, resolution).map_err(py_err)?.to_ppm())
}

#[pymodule]
#[pyo3(name = "hilbert_simplex")]
fn python_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySimplexPoint>()?;
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(funk_distance, m)?)?;
    m.add_function(wrap_pyfunction!(hilbert_distance, m)?)?;
    m.add_function(wrap_pyfunction!(cross_ratio_distance, m)?)?;
    m.add_function(wrap_pyfunction!(aitchison_distance, m)?)?;
    m.add_function(wrap_pyfunction!(variation_norm, m)?)?;
    m.add_function(wrap_pyfunction!(to_log_coordinates, m)?)?;
    m.add_function(wrap_pyfunction!(from_log_coordinates, m)?)?;
    m.add_function(wrap_pyfunction!(softmax, m)?)?;
    m.add_function(wrap_pyfunction!(lse_funk_upper, m)?)?;
    m.add_function(wrap_pyfunction!(lse_hilbert_surrogate, m)?)?;
    m.add_function(wrap_pyfunction!(coarse_grain, m)?)?;
    m.add_function(wrap_pyfunction!(manifold_distance, m)?)?;
    m.add_function(wrap_pyfunction!(manifold_distance_grad, m)?)?;
    m.add_function(wrap_pyfunction!(random_points_distance_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(stress_loss, m)?)?;
    m.add_function(wrap_pyfunction!(kl_loss, m)?)?;
    m.add_function(wrap_pyfunction!(sgd_embed, m)?)?;
    m.add_function(wrap_pyfunction!(hyperparameter_search, m)?)?;
    m.add_function(wrap_pyfunction!(render_balls, m)?)?;
    m.add_function(wrap_pyfunction!(render_voronoi, m)?)?;
    m.add("MANIFOLD_KINDS", ManifoldKind::ALL.map(|k| k.name()).to_vec())?;
    Ok(())
}
