use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use log::info;
use serde::Serialize;

use hkc::baselines::average_laplacian;
use hkc::data_gen::{
    class_indicator_functions, gen_circles, gen_multimodal, gen_ring_pair, knn_gaussian_graph,
    landmark_coupling_functions, Bandwidth, MultimodalConfig, CIRCLES_TIMES, RING_TIMES,
};
use hkc::graph::{laplacian, laplacian_from_weights, validate_laplacian, Edge};
use hkc::io::{
    read_graph, read_labels, read_matrix, read_point_cloud, write_graph, write_json, write_labels, write_matrix,
    write_point_cloud, ProblemFile, SolutionFile,
};
use hkc::optimizer::{solve_hkc, GradientRoute, HkcSolution, SolverConfig, DEFAULT_ALPHA, DEFAULT_TIMES};
use hkc::retrieval::evaluate;
use hkc::spectral::{diffusion_distance_matrix, eigendecompose, heat_kernel};
use hkc::{DMatrix, HkcError, WeightedGraph};

use crate::manifest::Recorder;
use crate::{
    AverageArgs, CirclesArgs, Command, DiffdistArgs, EvalArgs, GenKind, HeatArgs, KnnArgs, MultimodalArgs, RingArgs,
    Route, SolveArgs, ValidateArgs, EXIT_NOT_CONVERGED, EXIT_NUMERICAL,
};

pub fn run(command: Command) -> Result<u8> {
    match command {
        Command::Gen { kind } => match kind {
            GenKind::Circles(a) => gen_circles_cmd(&a),
            GenKind::Ring(a) => gen_ring_cmd(&a),
            GenKind::Multimodal(a) => gen_multimodal_cmd(&a),
            GenKind::Knn(a) => gen_knn_cmd(&a),
        },
        Command::Solve(a) => solve_cmd(&a),
        Command::Heat(a) => heat_cmd(&a),
        Command::Diffdist(a) => diffdist_cmd(&a),
        Command::Eval(a) => eval_cmd(&a),
        Command::Average(a) => average_cmd(&a),
        Command::Validate(a) => validate_cmd(&a),
    }
}

fn out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

/// Directory that receives the manifest of a single-file command.
fn parent_of(file: &Path) -> PathBuf {
    match file.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Writes the files shared by every generated experiment.
struct Experiment<'a> {
    g1: &'a WeightedGraph,
    g2: &'a WeightedGraph,
    f: &'a DMatrix<f64>,
    g: &'a DMatrix<f64>,
    correspondence: &'a [usize],
    times: &'a [f64],
}

impl Experiment<'_> {
    fn write(&self, dir: &Path, rec: &mut Recorder) -> Result<()> {
        let put = |name: &str, rec: &mut Recorder| {
            let p = dir.join(name);
            rec.output(p.clone());
            p
        };
        write_graph(&put("g1.json", rec), self.g1)?;
        write_graph(&put("g2.json", rec), self.g2)?;
        write_matrix(&put("F.csv", rec), self.f)?;
        write_matrix(&put("G.csv", rec), self.g)?;
        write_json(&put("corr.json", rec), &self.correspondence)?;
        let problem = ProblemFile {
            graph1: "g1.json".into(),
            graph2: "g2.json".into(),
            f: "F.csv".into(),
            g: "G.csv".into(),
            times: Some(self.times.to_vec()),
            alpha: Some(DEFAULT_ALPHA),
        };
        write_json(&put("problem.json", rec), &problem)?;
        Ok(())
    }
}

#[derive(Serialize)]
struct CirclesTruth<'a> {
    bridges1: &'a [Edge],
    bridges2: &'a [Edge],
    landmarks: &'a [usize],
}

fn gen_circles_cmd(a: &CirclesArgs) -> Result<u8> {
    let c = gen_circles(a.n_per_ring, a.bridges, a.seed)?;
    let pairs: Vec<(usize, usize)> = c.landmarks.iter().map(|&v| (v, v)).collect();
    let coupling = landmark_coupling_functions(&c.g1, &c.g2, &pairs, a.landmark_smoothing, CIRCLES_TIMES.to_vec())?;
    out_dir(&a.out)?;
    let mut rec = Recorder::new("gen circles", a, Some(a.seed));
    Experiment {
        g1: &c.g1,
        g2: &c.g2,
        f: coupling.f(),
        g: coupling.g(),
        correspondence: &c.correspondence,
        times: &CIRCLES_TIMES,
    }
    .write(&a.out, &mut rec)?;
    let points = a.out.join("points.csv");
    write_matrix(&points, &c.points)?;
    rec.output(points);
    let truth = a.out.join("truth.json");
    write_json(
        &truth,
        &CirclesTruth {
            bridges1: &c.bridges1,
            bridges2: &c.bridges2,
            landmarks: &c.landmarks,
        },
    )?;
    rec.output(truth);
    rec.finish(&a.out)?;
    Ok(0)
}

#[derive(Serialize)]
struct RingTruth<'a> {
    crack_after: usize,
    crack_edges: &'a [Edge],
    landmarks: &'a [usize],
}

fn gen_ring_cmd(a: &RingArgs) -> Result<u8> {
    let r = gen_ring_pair(a.n, a.k, !a.no_crack, a.seed)?;
    let pairs: Vec<(usize, usize)> = r.landmarks.iter().map(|&v| (v, v)).collect();
    let coupling = landmark_coupling_functions(&r.g1, &r.g2, &pairs, a.landmark_smoothing, RING_TIMES.to_vec())?;
    out_dir(&a.out)?;
    let mut rec = Recorder::new("gen ring", a, Some(a.seed));
    Experiment {
        g1: &r.g1,
        g2: &r.g2,
        f: coupling.f(),
        g: coupling.g(),
        correspondence: &r.correspondence,
        times: &RING_TIMES,
    }
    .write(&a.out, &mut rec)?;
    let points = a.out.join("points.csv");
    write_matrix(&points, &r.points)?;
    rec.output(points);
    let truth = a.out.join("truth.json");
    write_json(
        &truth,
        &RingTruth {
            crack_after: r.crack_after,
            crack_edges: &r.crack_edges,
            landmarks: &r.landmarks,
        },
    )?;
    rec.output(truth);
    rec.finish(&a.out)?;
    Ok(0)
}

fn gen_multimodal_cmd(a: &MultimodalArgs) -> Result<u8> {
    let cfg = MultimodalConfig {
        n: a.n,
        classes: a.classes,
        dim: a.dim,
        separation: a.separation,
        ambiguity: a.ambiguity,
        noise: a.noise,
    };
    let ds = gen_multimodal(&cfg, a.seed)?;
    let g1 = knn_gaussian_graph(&ds.modality1, a.k, Bandwidth::SelfTuning)?;
    let g2 = knn_gaussian_graph(&ds.modality2, a.k, Bandwidth::SelfTuning)?;
    let (f, g) = class_indicator_functions(&ds.labels, &ds.labels, true);
    let identity: Vec<usize> = (0..a.n).collect();
    out_dir(&a.out)?;
    let mut rec = Recorder::new("gen multimodal", a, Some(a.seed));
    Experiment {
        g1: &g1,
        g2: &g2,
        f: &f,
        g: &g,
        correspondence: &identity,
        times: &DEFAULT_TIMES,
    }
    .write(&a.out, &mut rec)?;
    for (name, pc) in [("modality1.csv", &ds.modality1), ("modality2.csv", &ds.modality2)] {
        let p = a.out.join(name);
        write_point_cloud(&p, pc)?;
        rec.output(p);
    }
    let labels = a.out.join("labels.csv");
    write_labels(&labels, &ds.labels)?;
    rec.output(labels);
    rec.finish(&a.out)?;
    Ok(0)
}

fn gen_knn_cmd(a: &KnnArgs) -> Result<u8> {
    let pc = read_point_cloud(&a.points, a.labeled)?;
    let bandwidth = a.sigma.map_or(Bandwidth::SelfTuning, Bandwidth::Global);
    let g = knn_gaussian_graph(&pc, a.k, bandwidth)?;
    let mut rec = Recorder::new("gen knn", a, None);
    rec.input(&a.points);
    write_graph(&a.out, &g)?;
    rec.output(&a.out);
    rec.finish(&parent_of(&a.out))?;
    Ok(0)
}

#[derive(Serialize)]
struct ResolvedSolve<'a> {
    problem: &'a Path,
    alpha: f64,
    times: &'a [f64],
    solver: &'a SolverConfig,
    out: &'a Path,
}

fn write_solution(
    dir: &Path,
    rec: &mut Recorder,
    sol: &HkcSolution,
    file: &SolutionFile,
    g1: &WeightedGraph,
    g2: &WeightedGraph,
) -> Result<()> {
    let solution = dir.join("solution.json");
    write_json(&solution, file)?;
    rec.output(solution);
    for (name, g, u) in [("g1_hkc.json", g1, &sol.u1), ("g2_hkc.json", g2, &sol.u2)] {
        let p = dir.join(name);
        write_graph(&p, &g.with_weights(u.clone())?)?;
        rec.output(p);
    }
    let cost = dir.join("cost.csv");
    let mut text = String::from("iteration,cost\n");
    for (k, c) in sol.cost_trajectory.iter().enumerate() {
        text.push_str(&format!("{k},{}\n", hkc::io::format_f64(*c)));
    }
    fs::write(&cost, text).with_context(|| format!("writing {}", cost.display()))?;
    rec.output(cost);
    Ok(())
}

fn solve_cmd(a: &SolveArgs) -> Result<u8> {
    let (doc, prob) = ProblemFile::load(&a.problem, a.alpha, a.times.clone())?;
    let defaults = SolverConfig::default();
    let cfg = SolverConfig {
        tol: a.tol.unwrap_or(defaults.tol),
        gtol: a.gtol.unwrap_or(defaults.gtol),
        max_iter: a.max_iter.unwrap_or(defaults.max_iter),
        patience: a.patience.unwrap_or(defaults.patience),
        route: match a.route {
            Some(Route::Block) => GradientRoute::BlockExponential,
            Some(Route::Spectral) => GradientRoute::Spectral,
            None => defaults.route,
        },
        ..defaults
    };
    let resolved = ResolvedSolve {
        problem: &a.problem,
        alpha: prob.alpha(),
        times: prob.coupling().times(),
        solver: &cfg,
        out: &a.out,
    };
    let mut rec = Recorder::new("solve", &resolved, None);
    let base = parent_of(&a.problem);
    rec.input(&a.problem);
    for p in [&doc.graph1, &doc.graph2, &doc.f, &doc.g] {
        rec.input(base.join(p));
    }
    out_dir(&a.out)?;

    let start = Instant::now();
    let (sol, code) = match solve_hkc(&prob, &cfg) {
        Ok(sol) => {
            let code = if sol.converged { 0 } else { EXIT_NOT_CONVERGED };
            (sol, code)
        }
        Err(HkcError::NumericalBlowup { iteration, partial }) => {
            eprintln!("error: numerical failure at iteration {iteration}; partial trajectory written");
            (*partial, EXIT_NUMERICAL)
        }
        Err(e) => return Err(e.into()),
    };
    let seconds = start.elapsed().as_secs_f64();
    let file = SolutionFile::new(&sol, &prob, &cfg, seconds);
    write_solution(&a.out, &mut rec, &sol, &file, prob.g1(), prob.g2())?;
    rec.finish(&a.out)?;
    info!(
        "{:?} after {} iterations, cost {:.6e} -> {:.6e}",
        sol.termination,
        sol.iterations,
        sol.cost_trajectory[0],
        file.final_cost
    );
    println!(
        "{:?}: {} iterations, cost {:.6e} -> {:.6e}",
        sol.termination, sol.iterations, sol.cost_trajectory[0], file.final_cost
    );
    Ok(code)
}

fn heat_cmd(a: &HeatArgs) -> Result<u8> {
    let g = read_graph(&a.graph)?;
    let f0 = read_matrix(&a.init)?;
    if f0.nrows() != g.n() {
        bail!("{} has {} rows for a graph with {} vertices", a.init.display(), f0.nrows(), g.n());
    }
    let dec = eigendecompose(&laplacian(&g))?;
    // columns: every initial function at the first time, then the next time, ...
    let mut out = DMatrix::zeros(g.n(), f0.ncols() * a.t.len());
    for (k, &t) in a.t.iter().enumerate() {
        let h = heat_kernel(&dec, t)?;
        let ft = h.matrix() * &f0;
        out.columns_mut(k * f0.ncols(), f0.ncols()).copy_from(&ft);
    }
    let mut rec = Recorder::new("heat", a, None);
    rec.input(&a.graph);
    rec.input(&a.init);
    write_matrix(&a.out, &out)?;
    rec.output(&a.out);
    rec.finish(&parent_of(&a.out))?;
    Ok(0)
}

fn diffdist_cmd(a: &DiffdistArgs) -> Result<u8> {
    let g = read_graph(&a.graph)?;
    let d = diffusion_distance_matrix(&eigendecompose(&laplacian(&g))?, a.t)?;
    let mut rec = Recorder::new("diffdist", a, None);
    rec.input(&a.graph);
    write_matrix(&a.out, &d)?;
    rec.output(&a.out);
    rec.finish(&parent_of(&a.out))?;
    Ok(0)
}

fn eval_cmd(a: &EvalArgs) -> Result<u8> {
    let d = read_matrix(&a.dist)?;
    let labels = read_labels(&a.labels)?;
    let metrics = evaluate(&d, &labels)?;
    let mut rec = Recorder::new("eval", a, None);
    rec.input(&a.dist);
    rec.input(&a.labels);
    write_json(&a.out, &metrics)?;
    rec.output(&a.out);
    rec.finish(&parent_of(&a.out))?;
    println!("mAP {:.4}", metrics.map);
    Ok(0)
}

fn average_cmd(a: &AverageArgs) -> Result<u8> {
    let g = average_laplacian(&read_graph(&a.g1)?, &read_graph(&a.g2)?)?;
    let mut rec = Recorder::new("average", a, None);
    rec.input(&a.g1);
    rec.input(&a.g2);
    write_graph(&a.out, &g)?;
    rec.output(&a.out);
    rec.finish(&parent_of(&a.out))?;
    Ok(0)
}

fn validate_cmd(a: &ValidateArgs) -> Result<u8> {
    let g = read_graph(&a.graph)?;
    let m = match &a.matrix {
        Some(p) => read_matrix(p)?,
        None => laplacian_from_weights(g.edges(), g.n(), g.weights())?.into_inner(),
    };
    let report = validate_laplacian(&m, g.edges())?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.is_valid() { 0 } else { EXIT_NUMERICAL })
}
