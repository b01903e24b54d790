//! End-to-end subprocess tests: every subcommand exercised through the real
//! binary, outputs checked against the library or for exact reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::Rng;

use anm::graph::{cpdag, parse_dag, serialize_dag, Dag, Pdag};
use anm::metrics::{shd, sid, sid_bounds};
use anm::rng::rng_from_seed;

fn anm_cmd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_anm"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = anm_cmd().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = anm_cmd().arg("--definitely-not-a-flag").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Usage"), "no usage text in {err}");
}

#[test]
fn runtime_failure_exits_one_with_diagnostic() {
    let out = anm_cmd()
        .args(["evaluate", "--true", "/nonexistent/t.txt", "--est", "/nonexistent/e.txt"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("error:"), "missing diagnostic in {err}");
}

#[test]
fn simulate_writes_deterministic_replicates() {
    let td = tempfile::tempdir().unwrap();
    let dir_a = td.path().join("a");
    let dir_b = td.path().join("b");
    let dir_c = td.path().join("c");
    for (dir, seed) in [(&dir_a, "7"), (&dir_b, "7"), (&dir_c, "8")] {
        run_ok(&[
            "simulate",
            "--p",
            "3",
            "--n",
            "40",
            "--regime",
            "linear_nongauss",
            "--replicates",
            "2",
            "--seed",
            seed,
            "--out-dir",
            dir.to_str().unwrap(),
        ]);
    }
    for name in ["rep0.data.csv", "rep0.graph.txt", "rep0.sem.txt", "rep1.data.csv"] {
        let a = fs::read(dir_a.join(name)).unwrap();
        assert_eq!(a, fs::read(dir_b.join(name)).unwrap(), "{name} differs across runs");
        assert!(!a.is_empty());
    }
    assert_ne!(
        fs::read(dir_a.join("rep0.data.csv")).unwrap(),
        fs::read(dir_c.join("rep0.data.csv")).unwrap(),
        "seed change must change the data"
    );
    // Replicates within one run must differ too.
    assert_ne!(
        fs::read(dir_a.join("rep0.data.csv")).unwrap(),
        fs::read(dir_a.join("rep1.data.csv")).unwrap()
    );
    let graph = parse_dag(&fs::read_to_string(dir_a.join("rep0.graph.txt")).unwrap()).unwrap();
    assert_eq!(graph.p(), 3);
    let sem = fs::read_to_string(dir_a.join("rep0.sem.txt")).unwrap();
    assert!(sem.starts_with("p=3\n"));
    assert!(sem.contains("node.0.mechanism="));
    assert!(sem.contains("node.2.noise_draws="));
}

#[test]
fn discover_recovers_graph_and_writes_diagnostics() {
    let td = tempfile::tempdir().unwrap();
    let dir = td.path();
    run_ok(&[
        "simulate",
        "--p",
        "3",
        "--n",
        "150",
        "--regime",
        "linear_nongauss",
        "--seed",
        "3",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    let data = dir.join("rep0.data.csv");
    let g_path = dir.join("est.txt");
    let d_path = dir.join("diag.txt");
    run_ok(&[
        "discover",
        "--data",
        data.to_str().unwrap(),
        "--method",
        "resit",
        "--regression",
        "linear",
        "--alpha",
        "0.05",
        "--out",
        g_path.to_str().unwrap(),
        "--diagnostics",
        d_path.to_str().unwrap(),
    ]);
    let est = parse_dag(&fs::read_to_string(&g_path).unwrap()).unwrap();
    assert_eq!(est.p(), 3);
    let diag = fs::read_to_string(&d_path).unwrap();
    assert!(diag.lines().all(|l| l.contains('=')));
    assert!(diag.contains("phase2_kept"));
}

#[test]
fn evaluate_row_matches_library_metrics() {
    let td = tempfile::tempdir().unwrap();
    let truth = Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    let est = Dag::from_edges(3, &[(0, 1)]).unwrap();
    let t_path = td.path().join("t.txt");
    let e_path = td.path().join("e.txt");
    fs::write(&t_path, serialize_dag(&truth)).unwrap();
    fs::write(&e_path, serialize_dag(&est)).unwrap();
    let out = run_ok(&[
        "evaluate",
        "--true",
        t_path.to_str().unwrap(),
        "--est",
        e_path.to_str().unwrap(),
    ]);
    let want_shd = shd(&Pdag::from(&truth), &Pdag::from(&est)).unwrap();
    let want_cp = shd(&cpdag(&truth), &cpdag(&est)).unwrap();
    let want_sid = sid(&truth, &est).unwrap();
    let expected = format!(
        "shd,shd_cpdag,sid_lower,sid_upper\n{},{},{},{}\n",
        want_shd, want_cp, want_sid.lower, want_sid.upper
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout), expected);
}

#[test]
fn evaluate_handles_partially_directed_estimates() {
    let td = tempfile::tempdir().unwrap();
    let truth = Dag::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
    let t_path = td.path().join("t.txt");
    let e_path = td.path().join("e.txt");
    fs::write(&t_path, serialize_dag(&truth)).unwrap();
    fs::write(&e_path, "p=3\n0 -- 1\n0 -- 2\n").unwrap();
    let out = run_ok(&[
        "evaluate",
        "--true",
        t_path.to_str().unwrap(),
        "--est",
        e_path.to_str().unwrap(),
        "--metrics",
        "sid",
    ]);
    let pdag = anm::graph::parse_pdag("p=3\n0 -- 1\n0 -- 2\n").unwrap();
    let want = sid_bounds(&truth, &pdag).unwrap();
    let expected = format!("sid_lower,sid_upper\n{},{}\n", want.lower, want.upper);
    assert_eq!(String::from_utf8_lossy(&out.stdout), expected);
}

#[test]
fn identifiability_reports_zero_residuals_for_matched_pair() {
    let td = tempfile::tempdir().unwrap();
    let triple = td.path().join("triple.txt");
    let out = td.path().join("resid.csv");
    fs::write(
        &triple,
        "# reversible exponential pair\nf = 0, -1\nxi = log-mix-lin-exp: -1, 1, 2, 0\nnu = log-mix-lin-exp: -1, 1, 1, 0\n",
    )
    .unwrap();
    run_ok(&[
        "identifiability",
        "--triple",
        triple.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let csv = fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y,residual"));
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 3);
        if !fields[2].is_empty() {
            assert!(fields[2].parse::<f64>().unwrap().abs() < 1e-6, "bad row {line}");
        }
        rows += 1;
    }
    assert_eq!(rows, 21 * 21);
}

#[test]
fn identifiability_rejects_bad_triple_files() {
    let td = tempfile::tempdir().unwrap();
    let out = td.path().join("resid.csv");
    for (body, hint) in [
        ("f = 0, 1\nxi = gaussian: 0, 1\n", "must set nu"),
        ("f = 0, 1\nxi = cauchy: 0, 1\nnu = gaussian: 0, 1\n", "unknown family"),
        ("f = 0, 1\nxi = gaussian: 0\nnu = gaussian: 0, 1\n", "mean, variance"),
    ] {
        let triple = td.path().join("bad.txt");
        fs::write(&triple, body).unwrap();
        let res = anm_cmd()
            .args([
                "identifiability",
                "--triple",
                triple.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(res.status.code(), Some(1));
        let err = String::from_utf8_lossy(&res.stderr);
        assert!(err.contains(hint), "wanted {hint:?} in {err}");
    }
}

fn write_linear_pair(dir: &Path, id: &str, seed: u64, flip: bool) {
    let mut rng = rng_from_seed(seed);
    let body: String = (0..200)
        .map(|_| {
            let x = rng.gen_range(-1.0..1.0f64);
            let y = x + 0.2 * rng.gen_range(-1.0..1.0f64);
            if flip {
                format!("{y} {x}\n")
            } else {
                format!("{x} {y}\n")
            }
        })
        .collect();
    fs::write(dir.join(format!("pair{id}.txt")), body).unwrap();
}

#[test]
fn pairs_writes_the_accuracy_curve() {
    let td = tempfile::tempdir().unwrap();
    let dir = td.path();
    fs::write(dir.join("pairmeta.txt"), "0001 1 1 2 2 1\n0002 2 2 1 1 0.5\n").unwrap();
    write_linear_pair(dir, "0001", 40, false);
    write_linear_pair(dir, "0002", 41, true);
    let out = dir.join("curve.csv");
    run_ok(&[
        "pairs",
        "--dir",
        dir.to_str().unwrap(),
        "--regression",
        "linear",
        "--out",
        out.to_str().unwrap(),
    ]);
    let csv = fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("decision_rate,accuracy,ci68_low,ci68_high,ci95_low,ci95_high")
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    // Both pairs orient correctly, so accuracy is 1 at every decision rate.
    for row in &rows {
        assert_eq!(row[1], 1.0);
        assert!(row[2] <= row[1] && row[1] <= row[3]);
        assert!(row[4] <= row[2] && row[3] <= row[5]);
    }
    assert!((rows[1][0] - 1.0).abs() < 1e-12);
    assert!(rows[0][0] < rows[1][0]);
}

#[test]
fn bench_outputs_are_reproducible_and_well_formed() {
    let td = tempfile::tempdir().unwrap();
    let cfg = td.path().join("bench.cfg");
    fs::write(
        &cfg,
        "regimes = linear_nongauss\np = 3\nn = 50\nreplicates = 2\nmethods = resit, random_baseline\nseed = 11\n",
    )
    .unwrap();
    let dir_a = td.path().join("a");
    let dir_b = td.path().join("b");
    let out_a = run_ok(&[
        "bench",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        dir_a.to_str().unwrap(),
    ]);
    let out_b = run_ok(&[
        "bench",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        dir_b.to_str().unwrap(),
    ]);
    assert_eq!(out_a.stdout, out_b.stdout);
    for name in ["replicates.csv", "summary.csv"] {
        assert_eq!(
            fs::read(dir_a.join(name)).unwrap(),
            fs::read(dir_b.join(name)).unwrap(),
            "{name} differs across runs"
        );
    }
    let summary = fs::read_to_string(dir_a.join("summary.csv")).unwrap();
    assert_eq!(summary.as_bytes(), &out_a.stdout[..], "stdout must mirror summary.csv");
    assert_eq!(summary.lines().next(), Some("regime,p,n,method,metric,mean,sd,replicates"));
    // 2 methods x 3 metrics.
    assert_eq!(summary.lines().count(), 1 + 6);
    let replicates = fs::read_to_string(dir_a.join("replicates.csv")).unwrap();
    assert_eq!(
        replicates.lines().next(),
        Some("regime,p,n,method,replicate,shd_dag,shd_cpdag,sid,error")
    );
    assert_eq!(replicates.lines().count(), 1 + 4);
}

#[test]
fn bench_rejects_a_bad_config_at_runtime() {
    let td = tempfile::tempdir().unwrap();
    let cfg = td.path().join("bench.cfg");
    fs::write(&cfg, "mystery = 1\n").unwrap();
    let out = anm_cmd().args(["bench", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
}
