use std::path::Path;
use std::process::{Command, Output};

fn qsparse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsparse")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn gen_cycle() {
    let o = qsparse(&["gen", "--family", "cycle", "--n", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("5 5\n"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn sparsify_certify_hamsim_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let g = d.join("g.edges");
    let o = qsparse(&["gen", "--family", "random", "--n", "40", "--p", "0.3", "--seed", "4", "--out", d.to_str().unwrap()]);
    assert!(o.status.success());
    std::fs::rename(d.join("graph.edges"), &g).unwrap();
    let gs = g.to_str().unwrap();

    let o = qsparse(&["resist", "--graph", gs, "--json"]);
    assert!(json(&o)["foster_residual"].as_f64().unwrap() < 1e-8 * 40.0);

    let sp = d.join("sp");
    let o = qsparse(&["sparsify", "--graph", gs, "--epsilon", "0.5", "--seed", "1", "--out", sp.to_str().unwrap(), "--json"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["seed"], 1);
    assert!(Path::new(&sp.join("sparsifier.json")).exists());
    let spe = sp.join("sparsifier.edges");

    let o = qsparse(&["certify", "--graph", gs, "--sparsifier", spe.to_str().unwrap(), "--epsilon", "0.5", "--json"]);
    let cert = json(&o);
    let code = o.status.code().unwrap();
    assert_eq!(code == 0, cert["laplacian"]["verdict"].as_bool().unwrap() && cert["adjacency"]["verdict"].as_bool().unwrap());

    let o = qsparse(&["certify", "--graph", gs, "--sparsifier", spe.to_str().unwrap(), "--epsilon", "0.0001"]);
    assert_eq!(o.status.code(), Some(2));

    let o = qsparse(&["hamsim", "--graph", gs, "--sparsifier", spe.to_str().unwrap(), "--times", "0.5,1"]);
    assert!(stdout(&o).starts_with("t,diff_norm,sq_bound,commuting\n"));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn rowsparsity_flags_star() {
    let o = qsparse(&["rowsparsity", "--family", "star", "--n", "32", "--b", "1", "--seeds", "10"]);
    assert!(o.status.success());
    let r = json(&o);
    assert_eq!(r["marginal"]["passes"], false);
    assert_eq!(r["marginal"]["violators"], serde_json::json!([0]));
}

#[test]
fn quantum_testers() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    std::fs::write(&csv, "1,0,0,0\n0,0,0,0\n1,1,1,1\n0,1,0,1\n").unwrap();
    let c = csv.to_str().unwrap();
    let o = qsparse(&["qtest-ae", "--matrix", c, "--delta", "0.5", "--eps", "0.25", "--seed", "3"]);
    assert!(o.status.success());
    let r = json(&o);
    assert_eq!(r["per_row_estimates"].as_array().unwrap().len(), 4);
    assert_eq!(r["per_row_estimates"][1], 0.0);
    assert!(r["ledger"]["oracle_calls"].as_u64().unwrap() > 0);
    assert!(r["verdict"].is_string());

    let o = qsparse(&["qtest-max", "--matrix", c]);
    let r = json(&o);
    assert_eq!((r["max_sum"].as_f64().unwrap(), r["argmax"].as_u64().unwrap()), (4.0, 2));

    let o = qsparse(&["qtest-ae", "--matrix", c, "--counting-qubits", "12", "--cap-qubits", "24"]);
    assert_eq!(o.status.code(), Some(3));
    let o = qsparse(&["qtest-max", "--family", "cycle", "--n", "5", "--json"]);
    assert!(o.status.success());
}

#[test]
fn pipeline_exit_codes_and_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = qsparse(&["pipeline", "--family", "complete", "--n", "3", "--epsilon", "1", "--samples", "100000", "--out", out.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let report = json(&o);
    assert_eq!(report["seed"], 0);
    assert_eq!(report["config"]["graph"]["family"]["family"], "complete");
    for f in ["report.json", "resistances.csv", "marginals.csv", "sparsifier.edges", "sparsifier.json", "evolution.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert_eq!(std::fs::read(out.join("report.json")).unwrap(), o.stdout);

    // The embedded config reproduces the run.
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, serde_json::to_string(&report["config"]).unwrap()).unwrap();
    let again = qsparse(&["pipeline", "--config", cfg.to_str().unwrap(), "--json"]);
    assert_eq!(again.stdout, o.stdout);

    let o = qsparse(&["pipeline", "--family", "cycle", "--n", "12", "--epsilon", "0.01", "--samples", "12", "--retry-limit", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qsparse(&["pipeline", "--family", "random", "--n", "10", "--p", "1.5"]);
    assert_eq!(o.status.code(), Some(3));
    let o = qsparse(&["resist", "--graph", "/nonexistent/file"]);
    assert_eq!(o.status.code(), Some(3));
    let o = qsparse(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(3));
}
