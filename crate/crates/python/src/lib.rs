//! Python bindings for `hkc`.
//!
//! Matrices cross the boundary as lists of rows (anything numpy's `tolist()`
//! produces), so the module has no numpy dependency.

use std::collections::BTreeMap;

use hkc::baselines;
use hkc::data_gen::{self, Bandwidth, PointCloud};
use hkc::graph::{self, validate_laplacian};
use hkc::optimizer::{hkc_cost, hkc_gradient_with, solve_from};
use hkc::spectral::{self, eigendecompose};
use hkc::{CouplingData, DMatrix, GradientRoute, HkcProblem, SolverConfig};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(pyhkc, HkcError, PyException, "Raised for any error from the hkc library.");

fn err(e: hkc::HkcError) -> PyErr {
    HkcError::new_err(e.to_string())
}

type Rows = Vec<Vec<f64>>;

fn to_matrix(rows: Rows) -> PyResult<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(PyValueError::new_err("rows have different lengths"));
    }
    Ok(DMatrix::from_row_iterator(nrows, ncols, rows.into_iter().flatten()))
}

fn to_rows(m: &DMatrix<f64>) -> Rows {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn parse_route(route: &str) -> PyResult<GradientRoute> {
    match route {
        "spectral" => Ok(GradientRoute::Spectral),
        "block" => Ok(GradientRoute::BlockExponential),
        other => Err(PyValueError::new_err(format!(
            "route must be 'spectral' or 'block', got {other:?}"
        ))),
    }
}

/// Undirected graph with nonnegative edge weights.
#[pyclass(name = "Graph", module = "pyhkc", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: hkc::WeightedGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> PyResult<Self> {
        let inner = hkc::WeightedGraph::from_triplets(n, &edges).map_err(err)?;
        Ok(PyGraph { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = hkc::io::graph_from_json(text).map_err(err)?;
        Ok(PyGraph { inner })
    }

    fn to_json(&self) -> String {
        hkc::io::graph_to_json(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    /// Edges as `(i, j)` with `i < j`, in canonical order.
    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().iter().map(|e| (e.i, e.j)).collect()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    /// Same edges, new weights (in `edges` order).
    fn with_weights(&self, weights: Vec<f64>) -> PyResult<Self> {
        let inner = self.inner.with_weights(weights).map_err(err)?;
        Ok(PyGraph { inner })
    }

    fn laplacian(&self) -> Rows {
        to_rows(graph::laplacian(&self.inner).as_matrix())
    }

    /// Structural checks of `matrix` (default: this graph's Laplacian)
    /// against this graph's edge set. Returns `{property: (pass, max_violation)}`.
    #[pyo3(signature = (matrix = None))]
    fn validate(&self, matrix: Option<Rows>) -> PyResult<BTreeMap<&'static str, (bool, f64)>> {
        let l = match matrix {
            Some(rows) => to_matrix(rows)?,
            None => graph::laplacian(&self.inner).into_inner(),
        };
        let r = validate_laplacian(&l, self.inner.edges()).map_err(err)?;
        Ok(BTreeMap::from([
            ("symmetric_nonpositive", (r.symmetric_nonpositive.pass, r.symmetric_nonpositive.max_violation)),
            ("sparsity", (r.sparsity.pass, r.sparsity.max_violation)),
            ("zero_row_sum", (r.zero_row_sum.pass, r.zero_row_sum.max_violation)),
        ]))
    }

    #[pyo3(signature = (threshold = 0.0))]
    fn connected_components(&self, threshold: f64) -> usize {
        self.inner.connected_components(threshold)
    }

    fn cycle_rank(&self) -> usize {
        self.inner.cycle_rank()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, num_edges={})", self.inner.n(), self.inner.num_edges())
    }
}

/// `e^{-tL}` of the graph Laplacian.
#[pyfunction]
fn heat_kernel(py: Python<'_>, g: &PyGraph, t: f64) -> PyResult<Rows> {
    py.detach(|| {
        let dec = eigendecompose(&graph::laplacian(&g.inner))?;
        Ok(to_rows(spectral::heat_kernel(&dec, t)?.matrix()))
    })
    .map_err(err)
}

/// Applies `e^{-tL}` to each column of `f0`.
#[pyfunction]
fn heat(py: Python<'_>, g: &PyGraph, t: f64, f0: Rows) -> PyResult<Rows> {
    let f0 = to_matrix(f0)?;
    if f0.nrows() != g.inner.n() {
        return Err(PyValueError::new_err(format!(
            "initial conditions have {} rows, graph has {} vertices",
            f0.nrows(),
            g.inner.n()
        )));
    }
    py.detach(|| {
        let dec = eigendecompose(&graph::laplacian(&g.inner))?;
        Ok(to_rows(&(spectral::heat_kernel(&dec, t)?.matrix() * f0)))
    })
    .map_err(err)
}

/// All-pairs diffusion distances at time `t`.
#[pyfunction]
fn diffusion_distances(py: Python<'_>, g: &PyGraph, t: f64) -> PyResult<Rows> {
    py.detach(|| {
        let dec = eigendecompose(&graph::laplacian(&g.inner))?;
        spectral::diffusion_distance_matrix(&dec, t).map(|d| to_rows(&d))
    })
    .map_err(err)
}

/// Graph on the union of both edge sets whose Laplacian is `(L1 + L2) / 2`.
#[pyfunction]
fn average_laplacian(g1: &PyGraph, g2: &PyGraph) -> PyResult<PyGraph> {
    let inner = baselines::average_laplacian(&g1.inner, &g2.inner).map_err(err)?;
    Ok(PyGraph { inner })
}

/// Heat bumps `e^{-sL} δ_v` at `vertices`, one column each (`s = 0` gives indicators).
#[pyfunction]
#[pyo3(signature = (g, vertices, smoothing = 0.0))]
fn landmark_functions(g: &PyGraph, vertices: Vec<usize>, smoothing: f64) -> PyResult<Rows> {
    let f = data_gen::landmark_functions(&g.inner, &vertices, smoothing).map_err(err)?;
    Ok(to_rows(&f))
}

/// Per-class indicator columns for two labelings, unit mass when `normalize`.
#[pyfunction]
#[pyo3(signature = (labels1, labels2, normalize = true))]
fn class_indicators(labels1: Vec<usize>, labels2: Vec<usize>, normalize: bool) -> (Rows, Rows) {
    let (f, g) = data_gen::class_indicator_functions(&labels1, &labels2, normalize);
    (to_rows(&f), to_rows(&g))
}

/// Self-tuning (or fixed-`sigma`) Gaussian kNN graph of a point cloud.
#[pyfunction]
#[pyo3(signature = (points, k, sigma = None))]
fn knn_graph(points: Rows, k: usize, sigma: Option<f64>) -> PyResult<PyGraph> {
    let pc = PointCloud::new(to_matrix(points)?, None).map_err(err)?;
    let bw = sigma.map_or(Bandwidth::SelfTuning, Bandwidth::Global);
    let inner = data_gen::knn_gaussian_graph(&pc, k, bw).map_err(err)?;
    Ok(PyGraph { inner })
}

/// Synthetic pair of graphs with ground truth, as returned by the generators.
#[pyclass(name = "Experiment", module = "pyhkc", frozen, get_all)]
struct PyExperiment {
    g1: PyGraph,
    g2: PyGraph,
    correspondence: Vec<usize>,
    points: Rows,
    landmarks: Vec<usize>,
    /// Suggested kernel times for this experiment.
    times: Vec<f64>,
}

/// Two eccentric rings whose bridge edges differ between the graphs.
#[pyfunction]
#[pyo3(signature = (n_per_ring = data_gen::DEFAULT_N_PER_RING, bridges = 2, seed = 0))]
fn gen_circles(n_per_ring: usize, bridges: usize, seed: u64) -> PyResult<PyExperiment> {
    let c = data_gen::gen_circles(n_per_ring, bridges, seed).map_err(err)?;
    Ok(PyExperiment {
        g1: PyGraph { inner: c.g1 },
        g2: PyGraph { inner: c.g2 },
        correspondence: c.correspondence,
        points: to_rows(&c.points),
        landmarks: c.landmarks,
        times: data_gen::CIRCLES_TIMES.to_vec(),
    })
}

/// A closed kNN ring and its copy with a crack.
#[pyfunction]
#[pyo3(signature = (n = 70, k = 4, crack = true, seed = 0))]
fn gen_ring(n: usize, k: usize, crack: bool, seed: u64) -> PyResult<PyExperiment> {
    let r = data_gen::gen_ring_pair(n, k, crack, seed).map_err(err)?;
    Ok(PyExperiment {
        g1: PyGraph { inner: r.g1 },
        g2: PyGraph { inner: r.g2 },
        correspondence: r.correspondence,
        points: to_rows(&r.points),
        landmarks: r.landmarks,
        times: data_gen::RING_TIMES.to_vec(),
    })
}

/// Two graphs, corresponding functions `F` (n1 x q) and `G` (n2 x q), kernel
/// times and the coupling weight `alpha`.
#[pyclass(name = "Problem", module = "pyhkc", frozen)]
struct PyProblem {
    inner: HkcProblem,
}

#[pymethods]
impl PyProblem {
    #[new]
    #[pyo3(signature = (g1, g2, f, g, times, alpha = 1e6))]
    fn new(g1: &PyGraph, g2: &PyGraph, f: Rows, g: Rows, times: Vec<f64>, alpha: f64) -> PyResult<Self> {
        let coupling = CouplingData::new(to_matrix(f)?, to_matrix(g)?, times).map_err(err)?;
        let inner = HkcProblem::new(g1.inner.clone(), g2.inner.clone(), coupling, alpha).map_err(err)?;
        Ok(PyProblem { inner })
    }

    /// Coupling problem with landmark bumps at matching vertex pairs.
    #[staticmethod]
    #[pyo3(signature = (g1, g2, pairs, times, alpha = 1e6, smoothing = 0.0))]
    fn from_landmarks(
        g1: &PyGraph,
        g2: &PyGraph,
        pairs: Vec<(usize, usize)>,
        times: Vec<f64>,
        alpha: f64,
        smoothing: f64,
    ) -> PyResult<Self> {
        let coupling = data_gen::landmark_coupling_functions(&g1.inner, &g2.inner, &pairs, smoothing, times)
            .map_err(err)?;
        let inner = HkcProblem::new(g1.inner.clone(), g2.inner.clone(), coupling, alpha).map_err(err)?;
        Ok(PyProblem { inner })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.coupling().times().to_vec()
    }

    /// `(distance, coupling, total)` at weights `(u1, u2)`.
    fn cost(&self, u1: Vec<f64>, u2: Vec<f64>) -> PyResult<(f64, f64, f64)> {
        let c = hkc_cost(&self.inner, &u1, &u2).map_err(err)?;
        Ok((c.distance, c.coupling, c.total))
    }

    #[pyo3(signature = (u1, u2, route = "spectral"))]
    fn gradient(&self, py: Python<'_>, u1: Vec<f64>, u2: Vec<f64>, route: &str) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let route = parse_route(route)?;
        py.detach(|| hkc_gradient_with(&self.inner, &u1, &u2, route))
            .map_err(err)
    }

    /// Runs the projected-gradient solver from the original weights, or from
    /// `(u1, u2)` when both are given. Keyword arguments left as `None` keep
    /// the library defaults.
    #[pyo3(signature = (*, max_iter = None, tol = None, gtol = None, patience = None, route = "spectral", u1 = None, u2 = None))]
    #[allow(clippy::too_many_arguments)]
    fn solve(
        &self,
        py: Python<'_>,
        max_iter: Option<usize>,
        tol: Option<f64>,
        gtol: Option<f64>,
        patience: Option<usize>,
        route: &str,
        u1: Option<Vec<f64>>,
        u2: Option<Vec<f64>>,
    ) -> PyResult<PySolution> {
        let mut cfg = SolverConfig {
            route: parse_route(route)?,
            ..SolverConfig::default()
        };
        cfg.max_iter = max_iter.unwrap_or(cfg.max_iter);
        cfg.tol = tol.unwrap_or(cfg.tol);
        cfg.gtol = gtol.unwrap_or(cfg.gtol);
        cfg.patience = patience.unwrap_or(cfg.patience);
        let u1 = u1.unwrap_or_else(|| self.inner.g1().weights().to_vec());
        let u2 = u2.unwrap_or_else(|| self.inner.g2().weights().to_vec());
        let sol = py.detach(|| solve_from(&self.inner, &cfg, u1, u2)).map_err(err)?;
        let g1 = self.inner.g1().with_weights(sol.u1.clone()).map_err(err)?;
        let g2 = self.inner.g2().with_weights(sol.u2.clone()).map_err(err)?;
        Ok(PySolution {
            g1: PyGraph { inner: g1 },
            g2: PyGraph { inner: g2 },
            cost_trajectory: sol.cost_trajectory,
            iterations: sol.iterations,
            converged: sol.converged,
            termination: format!("{:?}", sol.termination),
            u1: sol.u1,
            u2: sol.u2,
        })
    }
}

/// Result of `Problem.solve`.
#[pyclass(name = "Solution", module = "pyhkc", frozen, get_all)]
struct PySolution {
    g1: PyGraph,
    g2: PyGraph,
    u1: Vec<f64>,
    u2: Vec<f64>,
    cost_trajectory: Vec<f64>,
    iterations: usize,
    converged: bool,
    termination: String,
}

#[pymethods]
impl PySolution {
    fn __repr__(&self) -> String {
        format!(
            "Solution(iterations={}, converged={}, termination={}, cost={:e})",
            self.iterations,
            if self.converged { "True" } else { "False" },
            self.termination,
            self.cost_trajectory.last().copied().unwrap_or(f64::NAN)
        )
    }
}

/// Leave-one-out retrieval: `(mAP, {rank: precision})`.
#[pyfunction]
fn evaluate(dist: Rows, labels: Vec<usize>) -> PyResult<(f64, BTreeMap<usize, f64>)> {
    let m = hkc::retrieval::evaluate(&to_matrix(dist)?, &labels).map_err(err)?;
    Ok((m.map, m.precision_at))
}

#[pymodule]
fn pyhkc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("HkcError", m.py().get_type::<HkcError>())?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PyProblem>()?;
    m.add_class::<PySolution>()?;
    m.add_class::<PyExperiment>()?;
    m.add_function(wrap_pyfunction!(heat_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(heat, m)?)?;
    m.add_function(wrap_pyfunction!(diffusion_distances, m)?)?;
    m.add_function(wrap_pyfunction!(average_laplacian, m)?)?;
    m.add_function(wrap_pyfunction!(landmark_functions, m)?)?;
    m.add_function(wrap_pyfunction!(class_indicators, m)?)?;
    m.add_function(wrap_pyfunction!(knn_graph, m)?)?;
    m.add_function(wrap_pyfunction!(gen_circles, m)?)?;
    m.add_function(wrap_pyfunction!(gen_ring, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    Ok(())
}
