use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_turan"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn run_json(args: &[&str]) -> Value {
    let (code, stdout, stderr) = run(args);
    assert_eq!(code, 0, "{args:?} failed: {stderr}");
    let doc: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["schemaVersion"], turan_core::SCHEMA_VERSION);
    assert!(doc["metadata"]["elapsedMs"].is_u64());
    doc
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn bad_parameters_exit_two() {
    assert_eq!(run(&["primes", "--p", "6", "--bound", "100"]).0, 2);
    assert_eq!(run(&["lps", "--p", "5", "--q", "13"]).0, 2);
    assert_eq!(run(&["mu", "--m", "3", "--alpha", "0.5"]).0, 2);
    assert_eq!(run(&["mu", "--m", "6", "--alpha", "x/y"]).0, 2);
    assert_eq!(run(&["lagrangian", "/nonexistent/graph.txt"]).0, 2);
    assert_eq!(
        run(&["--format", "csv", "mu", "--m", "6", "--alpha", "2/5"]).0,
        2
    );
}

#[test]
fn primes_json_and_csv() {
    let doc = run_json(&["primes", "--p", "5", "--bound", "200"]);
    assert_eq!(doc["command"], "primes");
    assert_eq!(
        doc["result"]["primes"],
        serde_json::json!([41, 61, 101, 181])
    );
    let (code, csv, _) = run(&["--format", "csv", "primes", "--p", "5", "--bound", "200"]);
    assert_eq!(code, 0);
    assert_eq!(csv, "q\n41\n61\n101\n181\n");
}

#[test]
fn lps_graph_round_trips_through_ramanujan() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lps.txt");
    let p = path.display().to_string();
    let doc = run_json(&["lps", "--p", "5", "--q", "29", "--out", &p]);
    assert_eq!(doc["result"]["vertices"], 12180);
    assert_eq!(doc["result"]["edges"], 36540);
    assert_eq!(doc["result"]["connected"], true);
    assert_eq!(doc["result"]["bipartite"], false);
    assert!(!dir.path().join("lps.txt.partial").exists());

    let spec = run_json(&["--seed", "3", "ramanujan", &p]);
    assert_eq!(spec["result"]["isRamanujan"], true);
    assert!(spec["result"]["residualNorm"].as_f64().unwrap() <= 1e-8);

    let gens = run_json(&["lps", "--p", "5", "--q", "29", "--generators-only"]);
    assert_eq!(gens["result"]["count"], 6);
    assert!(gens["result"].get("vertices").is_none());
    assert_eq!(
        run(&[
            "lps",
            "--p",
            "5",
            "--q",
            "29",
            "--generators-only",
            "--out",
            &p
        ])
        .0,
        2
    );
}

#[test]
fn lagrangian_of_small_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = write(dir.path(), "k4.txt", "3 4\n0 1 2\n0 1 3\n0 2 3\n1 2 3\n");
    let doc = run_json(&["lagrangian", &k4, "--oracle", "24"]);
    assert!((doc["result"]["value"].as_f64().unwrap() - 0.375).abs() < 1e-9);
    assert!(
        doc["result"]["oracle"]["difference"]
            .as_f64()
            .unwrap()
            .abs()
            < 1e-3
    );

    let edge = write(dir.path(), "edge.txt", "# one triple\n3 3\n0 1 2\n");
    let doc = run_json(&["lagrangian", &edge]);
    assert!((doc["result"]["value"].as_f64().unwrap() - 2.0 / 9.0).abs() < 1e-9);

    let broken = write(dir.path(), "broken.txt", "3 3\n0 1\n");
    assert_eq!(run(&["lagrangian", &broken]).0, 2);
}

#[test]
fn mu_values() {
    let doc = run_json(&["mu", "--m", "2701", "--alpha", "899/900"]);
    assert!((doc["result"]["mu"].as_f64().unwrap() - 0.998_889_574_505_890_6).abs() <= 1e-10);
    assert_eq!(doc["result"]["alpha"], "899/900");
    let one = run_json(&["mu", "--m", "4", "--alpha", "1"]);
    assert!((one["result"]["mu"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn target_out_of_range_exits_four() {
    let (code, stdout, stderr) = run(&[
        "target",
        "--y",
        "0.9",
        "--depth",
        "20",
        "--tail-depth",
        "100",
        "--count",
        "600",
    ]);
    assert_eq!(code, 4, "{stderr}");
    assert!(stdout.is_empty());
    assert_eq!(
        run(&[
            "target",
            "--y",
            "0.3",
            "--depth",
            "20",
            "--tail-depth",
            "100",
            "--count",
            "600"
        ])
        .0,
        4
    );
}

#[test]
fn target_reports_trace() {
    let doc = run_json(&[
        "target",
        "--y",
        "0.5603090",
        "--depth",
        "30",
        "--tail-depth",
        "200",
        "--count",
        "800",
    ]);
    let r = &doc["result"];
    assert_eq!(r["invariantHolds"], true);
    assert_eq!(r["containsTarget"], true);
    assert!(r["discardedPrefix"].as_u64().unwrap() > 0);
    assert_eq!(r["trace"]["perStep"].as_array().unwrap().len(), 30);
}

#[test]
fn tails_and_ladder_csv() {
    let (code, csv, _) = run(&["--format", "csv", "tails", "--count", "300"]);
    assert_eq!(code, 0);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("j,nu_lower,nu_upper"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 300);
    assert!(rows.iter().all(|r| r[1] <= r[2]));

    let (code, csv, _) = run(&["--format", "csv", "ladder"]);
    assert_eq!(code, 0);
    let ratios: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ratios.len(), 4);
    assert!(ratios.iter().all(|&r| r >= 1.0 - 1e-6));
}

#[test]
fn pipeline_flags() {
    assert_eq!(run(&["pipeline"]).0, 2);
    assert_eq!(run(&["pipeline", "--toy-params", "--paper-params"]).0, 2);
    let doc = run_json(&["pipeline", "--paper-params"]);
    let stages = doc["result"]["stages"].as_array().unwrap();
    let spectrum = stages.iter().find(|s| s["name"] == "ramanujan").unwrap();
    assert_eq!(spectrum["status"], "skipped");
}

#[test]
fn runs_are_deterministic() {
    let args = ["--seed", "7", "lagrangian", "--starts", "6"];
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", "3 5\n0 1 2\n0 3 4\n1 2 3\n2 3 4\n");
    let with_file: Vec<&str> = args.iter().copied().chain([g.as_str()]).collect();
    let a = run_json(&with_file);
    let b = run_json(&with_file);
    assert_eq!(a["result"], b["result"]);
    assert_eq!(
        run_json(&["--threads", "1", "tails", "--count", "50"])["result"],
        run_json(&["--threads", "4", "tails", "--count", "50"])["result"]
    );
}
