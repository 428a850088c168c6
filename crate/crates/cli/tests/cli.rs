use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn socmine(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_socmine"))
        .current_dir(dir)
        .args(args)
        .env_remove("SEARCH_API_KEY")
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Corpus, catalog and two seeds under `dir`.
fn fixture(dir: &Path) {
    let out = socmine(
        dir,
        &[
            "make-corpus", "--nodes", "40", "--edges", "50", "--pattern", "and", "--seed", "7",
            "--output-prefix", "fx/tiny",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let catalog = fs::read_to_string(dir.join("fx/tiny.catalog.txt")).unwrap();
    let seeds: Vec<&str> = catalog.lines().take(2).collect();
    fs::write(dir.join("seeds.txt"), seeds.join("\n")).unwrap();
}

const REPLAY: &[&str] = &["--corpus", "fx/tiny.tsv", "--catalog", "fx/tiny.catalog.txt", "--seeds", "seeds.txt"];

fn with(base: &[&str], extra: &[&str]) -> Vec<String> {
    base.iter().chain(extra).map(|s| s.to_string()).collect()
}

fn run(dir: &Path, args: &[String]) -> Output {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    socmine(dir, &refs)
}

#[test]
fn extract_writes_edges_and_trace() {
    let tmp = tempfile::tempdir().unwrap();
    fixture(tmp.path());
    let args = with(
        &["extract", "--mode", "bf", "--backend", "replay"],
        &[REPLAY, &["--tau", "2", "--max-requests", "100", "--output-prefix", "run/bf"]].concat(),
    );
    let out = run(tmp.path(), &args);
    assert!(out.status.success(), "{}", stderr(&out));
    let edges = fs::read_to_string(tmp.path().join("run/bf.edges")).unwrap();
    assert!(!edges.is_empty());
    let trace = fs::read_to_string(tmp.path().join("run/bf.trace.csv")).unwrap();
    assert!(trace.starts_with("step,kind,entity,new_nodes,new_edges,nodes,edges,requests\n"));
    assert!(tmp.path().join("run/bf.graphml").exists());
    let summary = fs::read_to_string(tmp.path().join("run/bf.summary.txt")).unwrap();
    assert!(summary.starts_with("status: complete"));
}

#[test]
fn zero_tau_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    fixture(tmp.path());
    let out = run(tmp.path(), &with(&["extract", "--tau", "0"], REPLAY));
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("tau must be ≥ 1"), "{}", stderr(&out));
}

#[test]
fn unknown_flags_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = socmine(tmp.path(), &["extract", "--colour", "red"]);
    assert!(!out.status.success());
}

#[test]
fn live_backend_needs_explicit_opt_in() {
    let tmp = tempfile::tempdir().unwrap();
    fixture(tmp.path());
    let out = run(tmp.path(), &with(&["extract", "--backend", "live"], REPLAY));
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--live"));
    // opted in, but no key in the environment
    let out = run(tmp.path(), &with(&["extract", "--backend", "live", "--live"], REPLAY));
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("SEARCH_API_KEY"));
}

#[test]
fn config_file_values_and_flag_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    fixture(tmp.path());
    fs::write(
        tmp.path().join("run.conf"),
        "corpus = fx/tiny.tsv\ncatalog = fx/tiny.catalog.txt\nseeds = seeds.txt\ntau = 0\noutput-prefix = conf/out\n",
    )
    .unwrap();
    let out = socmine(tmp.path(), &["--config", "run.conf", "extract"]);
    assert_eq!(out.status.code(), Some(1), "tau from the file applies");
    let out = socmine(tmp.path(), &["--config", "run.conf", "extract", "--tau", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(tmp.path().join("conf/out.edges").exists());

    fs::write(tmp.path().join("bad.conf"), "colour = red\n").unwrap();
    let out = socmine(tmp.path(), &["--config", "bad.conf", "extract"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analyze_dist_writes_two_histograms() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("g.edges"), "A\tB\t3\nB\tC\t1\n").unwrap();
    let out = socmine(tmp.path(), &["analyze", "--graph", "g.edges", "--report", "dist", "--output-prefix", "a/g"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let degree = fs::read_to_string(tmp.path().join("a/g.degree_hist.csv")).unwrap();
    assert_eq!(degree, "\"value\",\"frequency\"\n1,2\n2,1\n");
    let weight = fs::read_to_string(tmp.path().join("a/g.weight_hist.csv")).unwrap();
    assert_eq!(weight, "\"value\",\"frequency\"\n1,1\n3,1\n");

    // `all` without MI inputs skips MI; asking for MI alone is an error
    let out = socmine(tmp.path(), &["analyze", "--graph", "g.edges", "--report", "all", "--output-prefix", "b/g"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(tmp.path().join("b/g.top.csv").exists());
    assert!(!tmp.path().join("b/g.mi.csv").exists());
    let out = socmine(tmp.path(), &["analyze", "--graph", "g.edges", "--report", "mi"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analyze_mi_and_top() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("g.edges"), "A\tB\t3\nB\tC\t7\n").unwrap();
    fs::write(tmp.path().join("pol.txt"), "and President\nmeets minister\n").unwrap();
    fs::write(tmp.path().join("act.txt"), "played with\nand\n").unwrap();
    let out = socmine(
        tmp.path(),
        &[
            "analyze", "--graph", "g.edges", "--report", "all", "--mi-input", "politics=pol.txt", "--mi-input",
            "movies=act.txt", "--output-prefix", "a/x",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let top = fs::read_to_string(tmp.path().join("a/x.top.csv")).unwrap();
    assert!(top.lines().nth(1).unwrap().starts_with("1,\"B\",\"C\",7"));
    let mi = fs::read_to_string(tmp.path().join("a/x.mi.csv")).unwrap();
    assert!(mi.contains("\"presid\",\"politics\""));
    assert!(mi.contains("\"plai\",\"movies\""));
}

#[test]
fn make_corpus_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    for prefix in ["a/c", "b/c"] {
        let out = socmine(
            tmp.path(),
            &["make-corpus", "--nodes", "30", "--pa-edges-per-node", "2", "--noise", "0.1", "--seed", "9", "--output-prefix", prefix],
        );
        assert!(out.status.success(), "{}", stderr(&out));
    }
    for suffix in [".tsv", ".truth.edges", ".catalog.txt"] {
        let a = fs::read(tmp.path().join(format!("a/c{suffix}"))).unwrap();
        let b = fs::read(tmp.path().join(format!("b/c{suffix}"))).unwrap();
        assert_eq!(a, b, "{suffix}");
    }
    let out = socmine(tmp.path(), &["make-corpus", "--nodes", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn replay_outputs_are_reproducible_and_cache_is_transparent() {
    let tmp = tempfile::tempdir().unwrap();
    fixture(tmp.path());
    let mut outputs = Vec::new();
    for prefix in ["r1/o", "r2/o", "r3/o"] {
        let args = with(
            &["extract", "--mode", "prio", "--alpha", "0.01", "--cache-dir", "cache"],
            &[REPLAY, &["--output-prefix", prefix]].concat(),
        );
        let out = run(tmp.path(), &args);
        assert!(out.status.success(), "{}", stderr(&out));
        outputs.push(fs::read(tmp.path().join(format!("{prefix}.edges"))).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
    let warm = fs::read_to_string(tmp.path().join("r2/o.summary.txt")).unwrap();
    assert!(warm.contains("\nrequests: 0\n"), "{warm}");
}

#[test]
fn baseline_and_mining_subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    fixture(tmp.path());
    let out = run(
        tmp.path(),
        &with(&["baseline", "--threshold", "0.2", "--max-requests", "50", "--output-prefix", "b/o"], REPLAY),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(tmp.path().join("b/o.trace.csv").exists());
    let out = run(tmp.path(), &with(&["baseline", "--threshold", "1.5"], REPLAY));
    assert_eq!(out.status.code(), Some(1));

    let out = run(tmp.path(), &with(&["extract", "--output-prefix", "e/o"], REPLAY));
    assert!(out.status.success(), "{}", stderr(&out));
    let out = socmine(
        tmp.path(),
        &[
            "mine-patterns", "--graph", "e/o.edges", "--corpus", "fx/tiny.tsv", "--catalog", "fx/tiny.catalog.txt",
            "--h", "10", "--output-prefix", "m/o",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(tmp.path().join("m/o.candidates.csv")).unwrap();
    assert!(csv.starts_with("\"phrase\",\"n\",\"m\",\"d\",\"score\",\"admitted\"\n\"and\","));
}

#[test]
fn backend_failure_exits_2_with_partial_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    fixture(tmp.path());
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let endpoint = format!("http://127.0.0.1:{port}/search");
    let out = Command::new(env!("CARGO_BIN_EXE_socmine"))
        .current_dir(tmp.path())
        .args(["extract", "--backend", "live", "--live", "--endpoint", &endpoint, "--output-prefix", "x/o"])
        .args(["--catalog", "fx/tiny.catalog.txt", "--seeds", "seeds.txt"])
        .env("SEARCH_API_KEY", "test-key")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    let summary = fs::read_to_string(tmp.path().join("x/o.summary.txt")).unwrap();
    assert!(summary.starts_with("status: incomplete"));
    assert!(tmp.path().join("x/o.edges").exists());
}
