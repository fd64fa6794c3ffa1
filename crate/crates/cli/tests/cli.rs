use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hsg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hsg"))
        .args(args)
        .output()
        .expect("failed to run hsg")
}

fn summary(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout.clone()).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 1, "expected one summary line, got {stdout:?}");
    serde_json::from_str(lines[0]).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn read_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn gen_writes_connected_graph() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let s = summary(&hsg(&["gen", "er", "--n", "50", "--p", "0.5", "--seed", "1", "--out", p(&g)]));
    assert_eq!(s["dataset_id"], "er-n50-p0.5");
    assert_eq!(s["connected"], true);
    let text = fs::read_to_string(&g).unwrap();
    assert_eq!(text.lines().next(), Some("50"));
    assert_eq!(text.lines().count() as u64 - 1, s["edges"].as_u64().unwrap());
}

#[test]
fn gen_ba_edge_count() {
    let s = summary(&hsg(&["gen", "ba", "--n", "100", "--m", "2", "--seed", "1"]));
    assert_eq!(s["edges"], 3 + 97 * 2);
}

#[test]
fn gen_points_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    summary(&hsg(&["gen", "points", "--n", "6", "--seed", "4", "--out", p(&out)]));
    let rows = read_rows(&out);
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.len() == 6));
}

#[test]
fn usage_errors_exit_2() {
    let out = hsg(&["gen", "er", "--n", "10", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
    assert_eq!(hsg(&["gen", "er", "--n", "10", "--p", "1.5", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(hsg(&["gen", "ba", "--n", "10", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(hsg(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn dist_apsp_on_complete_graph() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("k5.txt");
    let mut text = String::from("5\n");
    for a in 0..5 {
        for b in a + 1..5 {
            text.push_str(&format!("{a} {b}\n"));
        }
    }
    fs::write(&g, text).unwrap();
    let out = dir.path().join("d.csv");
    summary(&hsg(&["dist", "apsp", "--graph", p(&g), "--out", p(&out)]));
    for (i, row) in read_rows(&out).iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            assert_eq!(v, if i == j { 0.0 } else { 1.0 });
        }
    }
}

#[test]
fn dist_rw_rows_sum_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    summary(&hsg(&["gen", "ba", "--n", "20", "--m", "2", "--seed", "3", "--out", p(&g)]));
    let out = dir.path().join("p.csv");
    summary(&hsg(&["dist", "rw", "--steps", "5", "--graph", p(&g), "--out", p(&out)]));
    for row in read_rows(&out) {
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
    let bad = hsg(&["dist", "rw", "--steps", "0", "--graph", p(&g), "--out", p(&out)]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn dist_from_adjacency_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let adj = dir.path().join("adj.csv");
    fs::write(&adj, "0,1,0\n1,0,1\n0,1,0\n").unwrap();
    let out = dir.path().join("d.csv");
    summary(&hsg(&["dist", "apsp", "--matrix", p(&adj), "--out", p(&out)]));
    assert_eq!(read_rows(&out)[0], vec![0.0, 1.0, 2.0]);
}

#[test]
fn disconnected_graph_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    fs::write(&g, "4\n0 1\n2 3\n").unwrap();
    let out = hsg(&["dist", "apsp", "--graph", p(&g), "--out", p(&dir.path().join("d.csv"))]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("disconnected"));
}

#[test]
fn missing_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = hsg(&[
        "dist",
        "apsp",
        "--graph",
        p(&dir.path().join("nope.txt")),
        "--out",
        p(&dir.path().join("d.csv")),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

fn write_path4(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("path4.csv");
    fs::write(&path, "0,1,2,3\n1,0,1,2\n2,1,0,1\n3,2,1,0\n").unwrap();
    path
}

#[test]
fn embed_path_graph_in_euclidean() {
    let dir = tempfile::tempdir().unwrap();
    let target = write_path4(dir.path());
    let y = dir.path().join("y.csv");
    let args = [
        "embed", "--target", p(&target), "--kind", "euclidean", "--d", "3", "--seed", "1", "--out",
        p(&y),
    ];
    let s = summary(&hsg(&args));
    assert_eq!(s["loss"], "stress");
    assert!(s["final_loss"].as_f64().unwrap() <= 0.05, "{s}");
    let first = fs::read(&y).unwrap();
    let again = summary(&hsg(&args));
    assert_eq!(s, again);
    assert_eq!(first, fs::read(&y).unwrap());
}

#[test]
fn embed_hilbert_shape() {
    let dir = tempfile::tempdir().unwrap();
    let target = write_path4(dir.path());
    let y = dir.path().join("y.csv");
    summary(&hsg(&[
        "embed", "--target", p(&target), "--kind", "hilbert", "--d", "2", "--trials", "3", "--seed",
        "2", "--out", p(&y),
    ]));
    let rows = read_rows(&y);
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.len() == 2));
}

#[test]
fn embed_ambiguous_matrix_needs_as() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("k2.csv");
    fs::write(&m, "0,1\n1,0\n").unwrap();
    let y = dir.path().join("y.csv");
    let base = ["embed", "--target", p(&m), "--kind", "l1", "--d", "1", "--trials", "1", "--seed", "0"];
    let out = hsg(&[&base[..], &["--out", p(&y)]].concat());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--as"));
    let s = summary(&hsg(&[&base[..], &["--out", p(&y), "--as", "sim"]].concat()));
    assert_eq!(s["loss"], "kl");
    let s = summary(&hsg(&[&base[..], &["--out", p(&y), "--as", "dist"]].concat()));
    assert_eq!(s["loss"], "stress");
}

const TINY_SPEC: &str = "\
# one dataset, one kind, one dimension, one replicate
dataset = er
n = 10
p = 0.5
target = stress
seed = 7
kinds = hilbert
dims = 2
repetitions = 1
trials = 2
max_epochs = 50
";

const GRID_SPEC: &str = "\
dataset = ba
n = 12
m = 2
target = rw
steps = 3
seed = 11
kinds = euclidean, hyperboloid
dims = 2..3
repetitions = 2
trials = 2
max_epochs = 40
";

#[test]
fn bench_tiny_spec_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("tiny.spec");
    fs::write(&spec, TINY_SPEC).unwrap();
    let out = dir.path().join("run");
    let s = summary(&hsg(&["bench", "--spec", p(&spec), "--out", p(&out)]));
    assert_eq!(s["records"], 1);
    assert_eq!(s["resumed"], 0);
    let results = fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 2);
    assert_eq!(
        results.lines().next().unwrap(),
        "dataset_id,seed,kind,d,lr,batch,loss,epochs,wall_ms"
    );
    let summary_csv = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary_csv.lines().next().unwrap(), "kind,d,mean_loss,std_loss,count");

    let s = summary(&hsg(&["bench", "--spec", p(&spec), "--out", p(&out)]));
    assert_eq!(s["resumed"], 1);
    assert_eq!(fs::read_to_string(out.join("results.csv")).unwrap(), results);
}

/// Result rows without the wall-time column, sorted.
fn outcomes(path: &Path) -> Vec<String> {
    let mut rows: Vec<String> = fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.rsplit_once(',').unwrap().0.to_string())
        .collect();
    rows.sort();
    rows
}

#[test]
fn bench_workers_agree() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("grid.spec");
    fs::write(&spec, GRID_SPEC).unwrap();
    let one = dir.path().join("one");
    let four = dir.path().join("four");
    summary(&hsg(&["bench", "--spec", p(&spec), "--workers", "1", "--out", p(&one)]));
    summary(&hsg(&["bench", "--spec", p(&spec), "--workers", "4", "--out", p(&four)]));
    let a = outcomes(&one.join("results.csv"));
    assert_eq!(a.len(), 8);
    assert_eq!(a, outcomes(&four.join("results.csv")));
}

#[test]
fn bench_bad_spec_and_total_failure() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.spec");
    fs::write(&spec, "dataset = er\nn = 10\n").unwrap();
    let out = hsg(&["bench", "--spec", p(&spec), "--out", p(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));

    // Even-length walks on K_2 leave no off-diagonal mass, so every job fails.
    fs::write(
        &spec,
        "dataset = er\nn = 2\np = 1\ntarget = rw\nsteps = 2\nseed = 0\nkinds = l1\ndims = 1\nrepetitions = 1\ntrials = 1\n",
    )
    .unwrap();
    let out = hsg(&["bench", "--spec", p(&spec), "--out", p(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn render_balls_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ball.pgm");
    let s = summary(&hsg(&[
        "render", "balls", "--dist", "hilbert", "--center", "0.4,0.3,0.3", "--res", "256", "--out",
        p(&out),
    ]));
    let bytes = fs::read(&out).unwrap();
    let header = b"P5\n256 256\n255\n";
    assert!(bytes.starts_with(header));
    assert_eq!(bytes.len(), header.len() + 256 * 256);
    let levels = fs::read_to_string(dir.path().join("ball.levels.txt")).unwrap();
    assert_eq!(levels.lines().count(), s["levels"].as_array().unwrap().len());
}

#[test]
fn render_rejects_boundary_center() {
    let dir = tempfile::tempdir().unwrap();
    let out = hsg(&[
        "render", "balls", "--dist", "rfunk", "--center", "0.5,0.5,0", "--out",
        p(&dir.path().join("b.pgm")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn render_voronoi_hilbert_matches_varlog() {
    let dir = tempfile::tempdir().unwrap();
    let sites = dir.path().join("sites.txt");
    fs::write(&sites, "0.2,0.3,0.5\n0.6 0.2 0.2\n0.1,0.8,0.1\n0.45,0.1,0.45\n").unwrap();
    let a = dir.path().join("h.ppm");
    let b = dir.path().join("v.ppm");
    for (dist, out) in [("hilbert", &a), ("varlog", &b)] {
        summary(&hsg(&[
            "render", "voronoi", "--dist", dist, "--sites", p(&sites), "--res", "128", "--out", p(out),
        ]));
    }
    let bytes = fs::read(&a).unwrap();
    assert!(bytes.starts_with(b"P6\n128 128\n255\n"));
    assert_eq!(bytes, fs::read(&b).unwrap());

    fs::write(&sites, "0.2,0.3,0.5\n0.2,0.3,0.5\n").unwrap();
    let out = hsg(&["render", "voronoi", "--dist", "aitchison", "--sites", p(&sites), "--out", p(&a)]);
    assert_eq!(out.status.code(), Some(2));
}
