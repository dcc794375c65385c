use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hkc::io::{matrix_to_csv, read_graph, read_matrix, write_graph};
use hkc::{DMatrix, WeightedGraph};

fn hkc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hkc"))
        .args(args)
        .env("HKC_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = hkc(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn gen_circles_file_contract_and_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        ok(&["gen", "circles", "--n-per-ring", "32", "--bridges", "2", "--seed", "7", "--out", p(dir)]);
    }
    for name in ["g1.json", "g2.json", "F.csv", "G.csv", "corr.json", "manifest.json", "problem.json"] {
        assert!(a.join(name).exists(), "missing {name}");
    }
    let (ma, mb) = (manifest(&a), manifest(&b));
    assert_eq!(ma["seed"], 7);
    assert_eq!(ma["config"]["n_per_ring"], 32);
    for name in ["g1.json", "g2.json", "F.csv", "G.csv", "corr.json", "problem.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name} differs");
        let key_a = a.join(name).display().to_string();
        let key_b = b.join(name).display().to_string();
        assert_eq!(ma["outputs"][&key_a], mb["outputs"][&key_b]);
    }
    let g1 = read_graph(&a.join("g1.json")).unwrap();
    assert_eq!(g1.n(), 64);
    let f = read_matrix(&a.join("F.csv")).unwrap();
    assert_eq!(f.shape(), (64, 4));
}

#[test]
fn gen_ring_writes_paper_setup() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("ring");
    ok(&["gen", "ring", "--n", "70", "--k", "4", "--seed", "3", "--out", p(&dir)]);
    let g1 = read_graph(&dir.join("g1.json")).unwrap();
    let g2 = read_graph(&dir.join("g2.json")).unwrap();
    assert_eq!(g1.n(), 70);
    assert!(g2.num_edges() < g1.num_edges());
    let closed = tmp.path().join("closed");
    ok(&["gen", "ring", "--no-crack", "--seed", "3", "--out", p(&closed)]);
    assert_eq!(
        fs::read(closed.join("g1.json")).unwrap(),
        fs::read(closed.join("g2.json")).unwrap()
    );
}

#[test]
fn solve_pipeline_and_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("mm");
    ok(&["gen", "multimodal", "--seed", "1", "--out", p(&data)]);
    let problem = data.join("problem.json");
    let before = fs::read(data.join("g1.json")).unwrap();

    let sol = tmp.path().join("sol");
    let out = ok(&["solve", "--problem", p(&problem), "--times", "0.5,1,2", "--out", p(&sol)]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("iterations"));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(sol.join("solution.json")).unwrap()).unwrap();
    assert_eq!(doc["converged"], true);
    assert_eq!(doc["alpha"], 1e6);
    assert_eq!(doc["times"].as_array().unwrap().len(), 3);
    let cost = fs::read_to_string(sol.join("cost.csv")).unwrap();
    assert!(cost.starts_with("iteration,cost\n"));
    assert_eq!(cost.lines().count(), doc["cost_trajectory"].as_array().unwrap().len() + 1);
    ok(&["validate", "--graph", p(&sol.join("g1_hkc.json"))]);
    assert_eq!(fs::read(data.join("g1.json")).unwrap(), before, "input was modified");
    assert_eq!(manifest(&sol)["inputs"].as_object().unwrap().len(), 5);

    // mAP after coupling beats the original graph
    let map = |graph: &Path, name: &str| -> f64 {
        let d = tmp.path().join(format!("{name}.csv"));
        let m = tmp.path().join(format!("{name}.json"));
        ok(&["diffdist", "--graph", p(graph), "--t", "1.25", "--out", p(&d)]);
        ok(&["eval", "--dist", p(&d), "--labels", p(&data.join("labels.csv")), "--out", p(&m)]);
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(m).unwrap()).unwrap();
        v["map"].as_f64().unwrap()
    };
    assert!(map(&sol.join("g1_hkc.json"), "after") > map(&data.join("g1.json"), "before"));

    let capped = hkc(&["solve", "--problem", p(&problem), "--max-iter", "1", "--out", p(&tmp.path().join("x"))]);
    assert_eq!(capped.status.code(), Some(3));

    let bad = hkc(&["solve", "--problem", p(&problem), "--times", "2,1", "--out", p(&tmp.path().join("y"))]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("increasing"));
}

#[test]
fn heat_conserves_mass_and_starts_at_input() {
    let tmp = tempfile::tempdir().unwrap();
    let g = WeightedGraph::from_triplets(5, &[(0, 1, 1.0), (1, 2, 0.5), (2, 3, 2.0), (3, 4, 1.0), (0, 4, 0.3)]).unwrap();
    let gp = tmp.path().join("g.json");
    write_graph(&gp, &g).unwrap();
    let f0 = DMatrix::from_row_slice(5, 2, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0, 3.0, 0.0, 0.0, -1.0]);
    let fp = tmp.path().join("f.csv");
    fs::write(&fp, matrix_to_csv(&f0)).unwrap();

    let zero = tmp.path().join("zero.csv");
    ok(&["heat", "--graph", p(&gp), "--t", "0", "--init", p(&fp), "--out", p(&zero)]);
    assert!((read_matrix(&zero).unwrap() - &f0).amax() < 1e-14);

    let series = tmp.path().join("series.csv");
    ok(&["heat", "--graph", p(&gp), "--t", "1,3,5,10", "--init", p(&fp), "--out", p(&series)]);
    let s = read_matrix(&series).unwrap();
    assert_eq!(s.shape(), (5, 8));
    for (c, col) in s.column_iter().enumerate() {
        assert!((col.sum() - f0.column(c % 2).sum()).abs() < 1e-8);
    }
}

#[test]
fn diffdist_average_and_validate() {
    let tmp = tempfile::tempdir().unwrap();
    let g = WeightedGraph::from_triplets(4, &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0)]).unwrap();
    let gp = tmp.path().join("g.json");
    write_graph(&gp, &g).unwrap();

    let d = tmp.path().join("d.csv");
    ok(&["diffdist", "--graph", p(&gp), "--t", "0.7", "--out", p(&d)]);
    let dm = read_matrix(&d).unwrap();
    assert_eq!(dm, dm.transpose());
    assert!((0..4).all(|i| dm[(i, i)] == 0.0));

    let avg = tmp.path().join("avg.json");
    ok(&["average", "--g1", p(&gp), "--g2", p(&gp), "--out", p(&avg)]);
    assert_eq!(read_graph(&avg).unwrap(), g);

    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, matrix_to_csv(&DMatrix::from_element(4, 4, 1.0))).unwrap();
    let out = hkc(&["validate", "--graph", p(&gp), "--matrix", p(&bad)]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"pass\": false"));
}

#[test]
fn usage_errors_exit_nonzero() {
    let out = hkc(&["solve"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert!(!hkc(&["gen", "circles", "--bridges", "x", "--out", "/tmp/never"]).status.success());
    assert!(!hkc(&["frobnicate"]).status.success());
    let missing = hkc(&["diffdist", "--graph", "/nonexistent/g.json", "--t", "1", "--out", "/tmp/d.csv"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/g.json"));
}

#[test]
fn threads_flag_is_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("c");
    ok(&["--threads", "1", "gen", "circles", "--n-per-ring", "8", "--bridges", "1", "--out", p(&dir)]);
    assert_eq!(manifest(&dir)["threads"], 1);
}
