use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cascade_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cascade-lab"))
        .args(args)
        .env("CASCADE_LAB_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_config(dir: &Path, network: &str, extra: &str) -> String {
    let text = format!(
        r#"config_version = 1
rng_seed = 11
k = 1
trials = 200
output_dir = "{out}"

[network]
{network}

[grid]
kind = "uniform"
step = 0.25

[[strategies]]
strategy = "hill_climb"
trials_per_eval = 20

[[strategies]]
strategy = "local"
mass = 2
trials_per_eval = 20
{extra}
"#,
        out = dir.join("out").display()
    );
    let path = dir.join("config.toml");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn sweep_on_three_node_path() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("path.txt"), "0 1\n1 2\n").unwrap();
    let cfg = write_config(dir.path(), "source = \"edge_list\"\npath = \"path.txt\"", "");
    let out = cascade_lab(&["sweep", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "p,strategy,median,mean,se,cost_steps,utility");
    // 5 grid points x 3 strategies
    assert_eq!(lines.len(), 1 + 15);
    for (i, p) in ["0", "0.25", "0.5", "0.75", "1"].iter().enumerate() {
        let labels: Vec<&str> = lines[1 + 3 * i..4 + 3 * i]
            .iter()
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                assert_eq!(f[0], *p);
                f[1]
            })
            .collect();
        assert_eq!(labels, ["random", "hill_climb", "local_m2"]);
    }
    let summary = read_json(&dir.path().join("out/summary.json"));
    assert_eq!(summary["rng_seed"], 11);
    assert_eq!(summary["config"]["k"], 1);
    assert!(summary["optimization_region_width"]["mean"].is_number());
}

#[test]
fn sweep_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "source = \"generator\"\nfamily = \"er\"\nn = 120\nmean_degree = 3.0\nrng_seed = 4",
        "",
    );
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    for d in [&first, &second] {
        let out = cascade_lab(&["sweep", "--config", &cfg, "--output-dir", d.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(first.join("sweep.csv")).unwrap();
    let b = fs::read(second.join("sweep.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn width_from_saved_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "source = \"generator\"\nfamily = \"small_world\"\nn = 100\nz = 4\nmu = 0.2",
        "",
    );
    assert!(cascade_lab(&["sweep", "--config", &cfg]).status.success());
    let saved = dir.path().join("out/sweep.json");
    let out = cascade_lab(&["width", "--config", &cfg, "--input", saved.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let width = read_json(&dir.path().join("out/width.json"));
    let summary = read_json(&dir.path().join("out/summary.json"));
    assert_eq!(width["optimization_region_width"], summary["optimization_region_width"]);
}

#[test]
fn fit_recovers_planted_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("size,width\n");
    for n in (1..=10).map(|i| 1000 * i) {
        csv.push_str(&format!("{n},{}\n", 2.75 * (n as f64).powf(-0.4)));
    }
    let input = dir.path().join("widths.csv");
    fs::write(&input, csv).unwrap();
    let out = cascade_lab(&["fit", "--input", input.to_str().unwrap(), "--output-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let fit = read_json(&dir.path().join("fit.json"));
    assert!((fit["fit"]["exponent"].as_f64().unwrap() - 0.4).abs() < 1e-6);
    assert!((fit["fit"]["amplitude"].as_f64().unwrap() - 2.75).abs() < 1e-5);
}

#[test]
fn oracle_check_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = cascade_lab(&[
        "oracle-check",
        "--graphs",
        "3",
        "--trials",
        "2000",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("passed") && stdout.contains("failed"), "{stdout}");
    let report = read_json(&dir.path().join("oracle.json"));
    let total = report["report"]["passed"].as_u64().unwrap() + report["report"]["failed"].as_u64().unwrap();
    assert_eq!(total, 15);
}

#[test]
fn utility_single_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let out = cascade_lab(&[
        "utility",
        "--opt",
        "100",
        "--rand",
        "0",
        "--time",
        "92103.4",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let u = read_json(&dir.path().join("utility.json"));
    assert_eq!(u["check"]["optimize_worthwhile"], true);
}

#[test]
fn generate_then_ingest_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "source = \"generator\"\nfamily = \"small_world\"\nn = 300\nz = 4\nmu = 0.3\nrng_seed = 8",
        "",
    );
    assert!(cascade_lab(&["generate", "--config", &cfg]).status.success());
    let generated = read_json(&dir.path().join("out/generate.json"));
    let edges_file = dir.path().join("out/network_0.edges");
    let ingest_cfg = write_config(
        dir.path(),
        &format!("source = \"edge_list\"\npath = \"{}\"\ndominant_component = false", edges_file.display()),
        "",
    );
    let out = cascade_lab(&["ingest", "--config", &ingest_cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ingested = read_json(&dir.path().join("out/ingest.json"));
    assert_eq!(ingested["edges"], generated["networks"][0]["network"]["edges"]);
    assert_eq!(ingested["nodes"], 300);
    assert_eq!(ingested["dropped_duplicates"], 0);
}

fn error_of(out: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().expect("error line on stderr");
    serde_json::from_str(line).unwrap()
}

#[test]
fn config_errors_list_every_violation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "source = \"generator\"\nfamily = \"er\"\nn = 1\nmean_degree = -2.0",
        "[utility]\nvalue_per_node = 0.0\n",
    );
    let out = cascade_lab(&["sweep", "--config", &cfg, "--set", "trials=0"]);
    assert_eq!(out.status.code(), Some(2));
    let err = error_of(&out);
    assert_eq!(err["error"]["kind"], "config");
    // n, mean_degree, trials, value_per_node
    assert_eq!(err["error"]["details"].as_array().unwrap().len(), 4, "{err}");
}

#[test]
fn data_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.txt"), "0 1\n1 two\n").unwrap();
    let cfg = write_config(dir.path(), "source = \"edge_list\"\npath = \"bad.txt\"", "");
    let out = cascade_lab(&["sweep", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    let err = error_of(&out);
    assert_eq!(err["error"]["type"], "parse");
    assert!(err["error"]["message"].as_str().unwrap().contains("line 2"));
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_cascade-lab"))
        .args(["oracle-check", "--graphs", "1", "--trials", "10"])
        .env("CASCADE_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
