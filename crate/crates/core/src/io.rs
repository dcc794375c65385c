//! File formats: graph JSON, numeric CSV, labels, point clouds, landmark
//! pairs, problem and solution documents.
//!
//! Matrices are written row-major without a header, comma separated, with 17
//! significant digits so that every `f64` round-trips exactly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data_gen::PointCloud;
use crate::error::{HkcError, Result};
use crate::graph::{Edge, WeightedGraph};
use crate::optimizer::{CouplingData, HkcProblem, HkcSolution, SolverConfig, DEFAULT_ALPHA};

/// I/O and parse failures, kept apart from the numerical error type.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid contents in {path}")]
    Invalid { path: PathBuf, source: HkcError },
}

pub type IoResult<T> = std::result::Result<T, IoError>;

fn read(path: &Path) -> IoResult<String> {
    fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, contents: &[u8]) -> IoResult<()> {
    fs::File::create(path)
        .and_then(|mut f| f.write_all(contents))
        .map_err(|source| IoError::Io {
            path: path.to_owned(),
            source,
        })
}

fn parse_err(path: &Path, message: impl ToString) -> IoError {
    IoError::Parse {
        path: path.to_owned(),
        message: message.to_string(),
    }
}

fn invalid(path: &Path) -> impl FnOnce(HkcError) -> IoError + '_ {
    move |source| IoError::Invalid {
        path: path.to_owned(),
        source,
    }
}

/// Formats a float with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphDoc {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

/// Graph JSON text: `{"n": .., "edges": [[i, j, w], ..]}` in canonical order.
pub fn graph_to_json(g: &WeightedGraph) -> String {
    let doc = GraphDoc {
        n: g.n(),
        edges: g
            .edges()
            .iter()
            .zip(g.weights())
            .map(|(e, &w)| (e.i, e.j, w))
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("graph serializes")
}

/// Parses graph JSON. Edges must already be in canonical order with `i < j`.
pub fn graph_from_json(text: &str) -> Result<WeightedGraph> {
    let doc: GraphDoc = serde_json::from_str(text)
        .map_err(|e| HkcError::InvalidGraph(format!("malformed graph JSON: {e}")))?;
    let mut edges = Vec::with_capacity(doc.edges.len());
    let mut weights = Vec::with_capacity(doc.edges.len());
    for (i, j, w) in doc.edges {
        if i >= j {
            return Err(HkcError::InvalidGraph(format!(
                "edge ({i}, {j}) must satisfy i < j"
            )));
        }
        edges.push(Edge { i, j });
        weights.push(w);
    }
    WeightedGraph::new(doc.n, edges, weights)
}

pub fn read_graph(path: &Path) -> IoResult<WeightedGraph> {
    graph_from_json(&read(path)?).map_err(invalid(path))
}

pub fn write_graph(path: &Path, g: &WeightedGraph) -> IoResult<()> {
    write(path, graph_to_json(g).as_bytes())
}

/// Matrix as headerless CSV text.
pub fn matrix_to_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format_f64(m[(r, c)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn csv_records(text: &str) -> std::result::Result<Vec<Vec<String>>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    reader
        .records()
        .map(|r| {
            r.map(|rec| rec.iter().map(str::to_owned).collect::<Vec<String>>())
                .map_err(|e| e.to_string())
        })
        .filter(|r| !matches!(r, Ok(v) if v.iter().all(|s: &String| s.is_empty())))
        .collect()
}

/// Parses a headerless numeric CSV into a matrix; rows must have equal length.
pub fn matrix_from_csv(text: &str) -> std::result::Result<DMatrix<f64>, String> {
    let rows = csv_records(text)?;
    let ncols = rows.first().map_or(0, Vec::len);
    let mut data = Vec::with_capacity(rows.len() * ncols);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(format!("row {r} has {} columns, expected {ncols}", row.len()));
        }
        for cell in row {
            let v: f64 = cell
                .parse()
                .map_err(|_| format!("row {r}: cannot parse {cell:?} as a number"))?;
            data.push(v);
        }
    }
    Ok(DMatrix::from_row_slice(rows.len(), ncols, &data))
}

pub fn read_matrix(path: &Path) -> IoResult<DMatrix<f64>> {
    matrix_from_csv(&read(path)?).map_err(|m| parse_err(path, m))
}

pub fn write_matrix(path: &Path, m: &DMatrix<f64>) -> IoResult<()> {
    write(path, matrix_to_csv(m).as_bytes())
}

/// One integer label per line, with an optional non-numeric header line.
pub fn read_labels(path: &Path) -> IoResult<Vec<usize>> {
    let text = read(path)?;
    let mut labels = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let cell = line.split(',').next().unwrap_or("").trim();
        if cell.is_empty() {
            continue;
        }
        match cell.parse::<usize>() {
            Ok(v) => labels.push(v),
            Err(_) if k == 0 => continue,
            Err(_) => return Err(parse_err(path, format!("line {}: bad label {cell:?}", k + 1))),
        }
    }
    Ok(labels)
}

pub fn write_labels(path: &Path, labels: &[usize]) -> IoResult<()> {
    let mut out = String::from("label\n");
    for l in labels {
        out.push_str(&format!("{l}\n"));
    }
    write(path, out.as_bytes())
}

/// Point-cloud CSV: one row per point; when `labeled`, the last column holds
/// an integer class id.
pub fn read_point_cloud(path: &Path, labeled: bool) -> IoResult<PointCloud> {
    let m = read_matrix(path)?;
    if !labeled {
        return PointCloud::new(m, None).map_err(invalid(path));
    }
    if m.ncols() < 2 {
        return Err(parse_err(path, "labeled point cloud needs a feature and a label column"));
    }
    let d = m.ncols() - 1;
    let mut labels = Vec::with_capacity(m.nrows());
    for r in 0..m.nrows() {
        let v = m[(r, d)];
        if v < 0.0 || v.fract() != 0.0 {
            return Err(parse_err(path, format!("row {r}: label {v} is not a nonnegative integer")));
        }
        labels.push(v as usize);
    }
    PointCloud::new(m.columns(0, d).into_owned(), Some(labels)).map_err(invalid(path))
}

pub fn write_point_cloud(path: &Path, pc: &PointCloud) -> IoResult<()> {
    let mut m = pc.points().clone();
    if let Some(labels) = pc.labels() {
        let d = m.ncols();
        m = m.insert_column(d, 0.0);
        for (r, &l) in labels.iter().enumerate() {
            m[(r, d)] = l as f64;
        }
    }
    write_matrix(path, &m)
}

/// Landmark pairs: JSON list of `[v1, v2]`.
pub fn read_landmark_pairs(path: &Path) -> IoResult<Vec<(usize, usize)>> {
    serde_json::from_str(&read(path)?).map_err(|e| parse_err(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> IoResult<()> {
    let text = serde_json::to_string_pretty(value).expect("value serializes");
    write(path, text.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> IoResult<T> {
    serde_json::from_str(&read(path)?).map_err(|e| parse_err(path, e))
}

/// Problem document. Paths are resolved relative to the document's directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub graph1: PathBuf,
    pub graph2: PathBuf,
    #[serde(rename = "F")]
    pub f: PathBuf,
    #[serde(rename = "G")]
    pub g: PathBuf,
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    #[serde(default)]
    pub alpha: Option<f64>,
}

impl ProblemFile {
    /// Loads every referenced file and builds the problem, with optional
    /// overrides for alpha and times.
    pub fn load(
        path: &Path,
        alpha: Option<f64>,
        times: Option<Vec<f64>>,
    ) -> IoResult<(ProblemFile, HkcProblem)> {
        let doc: ProblemFile = read_json(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let g1 = read_graph(&base.join(&doc.graph1))?;
        let g2 = read_graph(&base.join(&doc.graph2))?;
        let f = read_matrix(&base.join(&doc.f))?;
        let g = read_matrix(&base.join(&doc.g))?;
        let times = times
            .or_else(|| doc.times.clone())
            .unwrap_or_else(|| crate::optimizer::DEFAULT_TIMES.to_vec());
        let alpha = alpha.or(doc.alpha).unwrap_or(DEFAULT_ALPHA);
        let coupling = CouplingData::new(f, g, times).map_err(invalid(path))?;
        let prob = HkcProblem::new(g1, g2, coupling, alpha).map_err(invalid(path))?;
        Ok((doc, prob))
    }
}

/// Solution document written by the solver command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionFile {
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub cost_trajectory: Vec<f64>,
    pub initial_distance_term: f64,
    pub initial_coupling_term: f64,
    pub final_distance_term: f64,
    pub final_coupling_term: f64,
    pub final_cost: f64,
    pub iterations: usize,
    pub converged: bool,
    pub termination: crate::optimizer::Termination,
    pub alpha: f64,
    pub times: Vec<f64>,
    pub solver: SolverConfig,
    pub wall_clock_seconds: f64,
}

impl SolutionFile {
    pub fn new(sol: &HkcSolution, prob: &HkcProblem, cfg: &SolverConfig, seconds: f64) -> Self {
        SolutionFile {
            u1: sol.u1.clone(),
            u2: sol.u2.clone(),
            cost_trajectory: sol.cost_trajectory.clone(),
            initial_distance_term: sol.initial_distance_term,
            initial_coupling_term: sol.initial_coupling_term,
            final_distance_term: sol.final_distance_term,
            final_coupling_term: sol.final_coupling_term,
            final_cost: *sol.cost_trajectory.last().unwrap_or(&f64::NAN),
            iterations: sol.iterations,
            converged: sol.converged,
            termination: sol.termination,
            alpha: prob.alpha(),
            times: prob.coupling().times().to_vec(),
            solver: cfg.clone(),
            wall_clock_seconds: seconds,
        }
    }
}
