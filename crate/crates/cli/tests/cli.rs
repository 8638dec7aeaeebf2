//! End-to-end runs of the `dht` binary: output formats, determinism, exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dht_core::zero_rate::{default_grid_step, default_threshold_grid, region_coherent, region_concurrent_w1_eq2};
use dht_core::{models, Pair};
use serde_json::Value;
use tempfile::TempDir;

fn dht(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dht")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = dht(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn models_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn model(name: &str) -> String {
    models_dir().join(format!("{name}.json")).display().to_string()
}

fn write_model(dir: &TempDir, name: &str, sizes: [usize; 3], p: &[f64], q: &[f64]) -> String {
    let doc = serde_json::json!({
        "alphabet_sizes": {"x": sizes[0], "y1": sizes[1], "y2": sizes[2]},
        "p": p,
        "p_bar": q,
    });
    let path = dir.path().join(format!("{name}.json"));
    std::fs::write(&path, doc.to_string()).unwrap();
    path.display().to_string()
}

fn binary_model(dir: &TempDir) -> String {
    write_model(
        dir,
        "binary",
        [2, 2, 2],
        &[0.2, 0.05, 0.1, 0.15, 0.05, 0.2, 0.15, 0.1],
        &[0.05, 0.1, 0.15, 0.1, 0.2, 0.1, 0.15, 0.15],
    )
}

/// (θ1, θ2) rows of a region CSV, checking the header and unit column.
fn parse_region(csv: &str, unit: &str) -> Vec<(f64, f64)> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("theta1,theta2,unit"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 3);
            assert_eq!(f[2], unit);
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect()
}

fn parse_simulation(csv: &str) -> Vec<Vec<String>> {
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("n,alpha1,beta1,alpha2,beta2,exp_beta1,exp_beta2,method,ci95_alpha1,ci95_beta1,ci95_alpha2,ci95_beta2")
    );
    lines.map(|l| l.split(',').map(String::from).collect()).collect()
}

fn bits(v: f64) -> f64 {
    v / std::f64::consts::LN_2
}

#[test]
fn identical_laws_give_the_origin() {
    let csv = stdout(&["region", "--model", &model("identical")]);
    assert_eq!(csv, "theta1,theta2,unit\n0,0,bits\n");
}

#[test]
fn one_bit_frontier_round_trips_exactly() {
    let dir = TempDir::new().unwrap();
    let json = dir.path().join("region.json");
    let svg = dir.path().join("region.svg");
    let csv = stdout(&[
        "region",
        "--model",
        &model("example6"),
        "--mode",
        "concurrent",
        "--w1",
        "2",
        "--json",
        json.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    let rows = parse_region(&csv, "bits");
    assert!(rows.len() >= 5);
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 > w[1].1), "{rows:?}");

    let pair: Pair = models::example6();
    let step = default_grid_step(2);
    let lib = region_concurrent_w1_eq2(&pair, step, &default_threshold_grid(&pair, step).unwrap()).unwrap().region;
    let mut want: Vec<(f64, f64)> = lib.points.iter().map(|p| (bits(p.theta1), bits(p.theta2))).collect();
    want.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert_eq!(rows, want);

    let doc: Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(doc["unit"], "bits");
    assert_eq!(doc["mode"], "concurrent");
    let from_json: Vec<(f64, f64)> = doc["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p["theta1"].as_f64().unwrap(), p["theta2"].as_f64().unwrap()))
        .collect();
    assert_eq!(from_json, rows);

    let svg = std::fs::read_to_string(svg).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<circle").count(), rows.len());
}

#[test]
fn nats_flag_switches_the_unit() {
    let b = parse_region(&stdout(&["region", "--model", &model("example6")]), "bits");
    let n = parse_region(&stdout(&["region", "--model", &model("example6"), "--nats"]), "nats");
    let corner = region_coherent(&models::example6::<f64>()).unwrap().corner().unwrap();
    assert_eq!(n, vec![(corner.theta1, corner.theta2)]);
    assert_eq!(b, vec![(bits(corner.theta1), bits(corner.theta2))]);
}

#[test]
fn positive_rate_frontier_exceeds_the_baseline() {
    let search = ["--lambda-points", "5", "--restarts", "6", "--iterations", "80"];
    let m = model("example1");
    let mut args = vec!["region", "--model", &m, "--regime", "positive-rate", "--r1", "0.4", "--r2", "0"];
    args.extend(search);
    let coop = parse_region(&stdout(&args), "bits");
    args[4] = "no-coop";
    let nc = parse_region(&stdout(&args), "bits");
    let max2 = |r: &[(f64, f64)]| r.iter().map(|p| p.1).fold(0.0, f64::max);
    assert!(max2(&coop) > max2(&nc) + 0.05, "{} vs {}", max2(&coop), max2(&nc));
    assert!(coop.windows(2).all(|w| w[0].0 <= w[1].0));
}

#[test]
fn exact_simulation_has_zero_intervals() {
    let dir = TempDir::new().unwrap();
    let csv = stdout(&["simulate", "--model", &binary_model(&dir), "--exact", "--n", "12", "--mu", "0.1"]);
    let rows = parse_simulation(&csv);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "12");
    assert_eq!(rows[0][7], "exact");
    assert!(rows[0][8..].iter().all(|c| c == "0"));
}

#[test]
fn monte_carlo_files_are_identical_for_a_seed() {
    let dir = TempDir::new().unwrap();
    let m = binary_model(&dir);
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        stdout(&[
            "simulate",
            "--model",
            &m,
            "--mc",
            "--n",
            "12",
            "--trials",
            "100000",
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ]);
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv", "7");
    assert_eq!(a, run("b.csv", "7"));
    assert_ne!(a, run("c.csv", "8"));
    let rows = parse_simulation(std::str::from_utf8(&a).unwrap());
    assert_eq!(rows[0][7], "monte_carlo");
}

#[test]
fn exponent_sweep_approaches_the_region_corner() {
    let dir = TempDir::new().unwrap();
    let m = binary_model(&dir);
    let corner = parse_region(&stdout(&["region", "--model", &m]), "bits")[0];
    let rows = parse_simulation(&stdout(&["simulate", "--model", &m, "--exact", "--n", "8,16,24,32", "--mu", "0.01"]));
    let gaps: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r[5].parse::<f64>().unwrap() - corner.0).abs(), (r[6].parse::<f64>().unwrap() - corner.1).abs()))
        .collect();
    assert!(gaps.windows(2).all(|w| w[1].0 <= w[0].0 && w[1].1 <= w[0].1), "{gaps:?}");
}

fn benefit(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

#[test]
fn benefit_cases() {
    let same = benefit(&["benefit", "--model", &model("identical")]);
    assert_eq!(same["benefit"], 0.0);
    assert_eq!(same["unit"], "bits");

    let markov = benefit(&["benefit", "--model", &model("markov_y2")]);
    assert!(markov["benefit"].as_f64().unwrap() < 1e-7);

    let ex6 = benefit(&["benefit", "--model", &model("example6"), "--nats"]);
    let (c, n, b) = (
        ex6["theta2_coop"].as_f64().unwrap(),
        ex6["theta2_nocoop"].as_f64().unwrap(),
        ex6["benefit"].as_f64().unwrap(),
    );
    assert!(b > 0.0);
    assert!((b - (c - n)).abs() < 1e-9);
    assert_eq!(ex6["unit"], "nats");

    let high = benefit(&["benefit", "--model", &model("example6"), "--regime", "high-rate", "--nats"]);
    assert!(high["benefit"].as_f64().unwrap() > 0.0);
}

#[test]
fn bundled_models_match_the_library() {
    let doc: Value = serde_json::from_str(&stdout(&["model", "--builtin", "example6"])).unwrap();
    let pair: Pair = models::example6();
    let floats = |v: &Value| -> Vec<f64> { v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect() };
    assert_eq!(floats(&doc["p"]), pair.p().probs());
    assert_eq!(floats(&doc["p_bar"]), pair.p_bar().probs());
    let shipped: Value = serde_json::from_str(&std::fs::read_to_string(model("example6")).unwrap()).unwrap();
    assert_eq!(shipped, doc);
}

fn code(args: &[&str]) -> i32 {
    dht(args).status.code().unwrap()
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad_sum = write_model(&dir, "bad_sum", [2, 1, 1], &[0.5, 0.6], &[0.5, 0.5]);
    assert_eq!(code(&["region", "--model", &bad_sum]), 2);
    let nearly = write_model(&dir, "nearly", [2, 1, 1], &[0.5, 0.5 + 5e-10], &[0.5, 0.5]);
    assert_eq!(code(&["region", "--model", &nearly]), 0);
    let bad_len = write_model(&dir, "bad_len", [2, 2, 1], &[0.5, 0.5], &[0.5, 0.5]);
    assert_eq!(code(&["region", "--model", &bad_len]), 2);
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(code(&["region", "--model", garbage.to_str().unwrap()]), 2);
    assert_eq!(code(&["region", "--model", &model("example6"), "--regime", "sideways"]), 2);
    assert_eq!(code(&["region", "--model", &model("example1"), "--regime", "positive-rate", "--r1", "-1"]), 2);

    // P̄ vanishes where P does not: the high-rate divergences are infinite
    let holes = write_model(&dir, "holes", [2, 1, 2], &[0.25; 4], &[0.5, 0.0, 0.25, 0.25]);
    let out = dht(&["region", "--model", &holes, "--regime", "high-rate"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infinite"));

    let out = dht(&["region", "--model", &model("example6"), "--regime", "no-coop", "--r1", "0.2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("P̄ = P_X ⊗ P_Y1 ⊗ P_Y2"));

    assert_eq!(code(&["simulate", "--model", &model("example1"), "--exact", "--n", "40"]), 5);
    assert_eq!(code(&["simulate", "--model", &model("example1"), "--exact", "--mc", "--n", "4"]), 2);
}
