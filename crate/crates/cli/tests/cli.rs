//! End-to-end runs of the `paramarkov` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use paramarkov::ml_special::ml_one;
use paramarkov::sampling::lamperti_pdf;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_paramarkov"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_matrix(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

/// `(n, p_analytic, p_mc)` rows of a pmf table, skipping the summary rows.
fn read_pmf(path: &Path) -> Vec<(usize, f64, Option<f64>)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .filter_map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let n = f[0].parse().ok()?;
            Some((n, f[1].parse().unwrap(), f.get(2).map(|x| x.parse().unwrap())))
        })
        .collect()
}

#[test]
fn efpp_trajectory_has_requested_events_and_replays_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["simulate", "--process", "efpp", "--nu", "0.75", "--lambda", "1", "--events", "10000", "--seed", "1"];
    let a = run(dir.path(), &[&args[..], &["-o", "a.csv", "--plot"]].concat());
    assert!(a.status.success(), "{}", stderr(&a));
    let b = run(dir.path(), &[&args[..], &["-o", "b.csv"]].concat());
    assert!(b.status.success());
    let text = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(text, fs::read_to_string(dir.path().join("b.csv")).unwrap());
    assert!(dir.path().join("a.svg").exists());

    let rows: Vec<(f64, usize)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 10_001);
    assert!(rows.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 == w[0].1 + 1));
}

#[test]
fn poisson_waits_pass_exponentiality_test() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["simulate", "--nu", "1", "--lambda", "2", "--events", "5000", "-o", "p.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let times: Vec<f64> = fs::read_to_string(dir.path().join("p.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let mut waits: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    waits.sort_by(f64::total_cmp);
    let n = waits.len() as f64;
    let d = waits
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let f = 1.0 - (-2.0 * w).exp();
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    // Kolmogorov–Smirnov critical value at the 1% level
    assert!(d < 1.628 / n.sqrt(), "KS statistic {d}");
}

#[test]
fn replicas_get_separate_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["simulate", "--process", "para", "--bundled", "three-state", "--nu", "0.7", "--horizon", "5", "--replicas", "3", "-o", "x.csv"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    for i in 0..3 {
        assert!(dir.path().join(format!("x_{i}.csv")).exists());
    }
}

#[test]
fn json_trajectory_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["simulate", "--process", "semi", "--events", "20", "--format", "json", "-o", "t.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
    assert_eq!(v["times"].as_array().unwrap().len(), 21);
    assert_eq!(v["truncated"], false);
}

#[test]
fn pmf_at_nu_one_is_poisson() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["pmf", "--nu", "1", "--lambda", "1", "--t", "2", "--mc-replicas", "0", "--nmax", "15"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut fact = 1.0;
    for (n, p, _) in read_pmf(&dir.path().join("pmf.csv")) {
        if n > 0 {
            fact *= n as f64;
        }
        let want = 2f64.powi(n as i32) * (-2.0f64).exp() / fact;
        assert!((p - want).abs() <= 1e-12 * want, "n = {n}: {p} vs {want}");
    }
}

#[test]
fn pmf_comparison_matches_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["pmf", "--nu", "0.5", "--lambda", "1", "--t", "1", "--mc-replicas", "1000000"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("pmf.csv")).unwrap();
    assert!(text.starts_with("n,p_analytic,p_mc,abs_diff\n"));
    let tv: f64 = text.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(tv <= 5e-3, "tv {tv}");
    let rows = read_pmf(&dir.path().join("pmf.csv"));
    assert_eq!(rows.len(), 10);
    // p_0 is the Mittag-Leffler survival
    assert!((rows[0].1 - ml_one(0.5, -1.0).unwrap()).abs() < 1e-15);
}

#[test]
fn pmf_json_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["pmf", "--nu", "0.3", "--t", "2", "--mc-replicas", "10000", "--format", "json", "-o", "p.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("p.json")).unwrap()).unwrap();
    assert_eq!(v["analytic"]["probs"].as_array().unwrap().len(), 10);
    assert!(v["tv_distance"].as_f64().is_some());
    let o = run(dir.path(), &["pmf", "--nu", "0.3", "--t", "2", "--mc-replicas", "0", "--format", "svg", "-o", "p.svg"]);
    assert!(o.status.success());
    assert!(fs::read_to_string(dir.path().join("p.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn markov_matrix_at_zero_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["matrix", "--bundled", "three-state", "--mode", "markov", "--t", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = read_matrix(&dir.path().join("markov_t0.csv"));
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert_eq!(*v, if i == j { 1.0 } else { 0.0 });
        }
    }
    let spectral: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("spectral.json")).unwrap()).unwrap();
    assert_eq!(spectral["passed"], true);
}

#[test]
fn para_equals_markov_at_nu_one() {
    let dir = tempfile::tempdir().unwrap();
    for mode in ["markov", "para"] {
        let o = run(dir.path(), &["matrix", "--bundled", "three-state", "--mode", mode, "--nu", "1", "--t", "0.7"]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let a = read_matrix(&dir.path().join("markov_t0.7.csv"));
    let b = read_matrix(&dir.path().join("para_t0.7.csv"));
    for (ra, rb) in a.iter().zip(&b) {
        for (x, y) in ra.iter().zip(rb) {
            assert!((x - y).abs() <= 1e-10);
        }
    }
}

#[test]
fn para_matrix_matches_lamperti_mixture() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["matrix", "--mode", "para", "--nu", "0.5", "--t", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let p = read_matrix(&dir.path().join("para_t1.csv"));
    // e^{G l} = Π + e^{−3 l}(I − Π) for G = [[−1, 1], [2, −2]]; trapezoid in ln l
    let pi = [[2.0 / 3.0, 1.0 / 3.0], [2.0 / 3.0, 1.0 / 3.0]];
    let (h, mut u, mut decay) = (0.005, -120.0, 0.0);
    while u <= 12.0 {
        let l = f64::exp(u);
        decay += (-3.0 * l).exp() * lamperti_pdf(0.5, l).unwrap() * l * h;
        u += h;
    }
    for i in 0..2 {
        for j in 0..2 {
            let eye = if i == j { 1.0 } else { 0.0 };
            let want = pi[i][j] + (eye - pi[i][j]) * decay;
            assert!((p[i][j] - want).abs() <= 1e-6, "({i},{j}): {} vs {want}", p[i][j]);
        }
    }
}

#[test]
fn matrix_json_with_fractional_generator() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["matrix", "--mode", "semi", "--t", "0.5,2", "--frac-generator", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("semi.json")).unwrap()).unwrap();
    assert_eq!(v["matrices"].as_array().unwrap().len(), 2);
    // two-state closed form: −(−G)^ν = 3^{ν−1} G
    let b01 = v["frac_generator"][0][1].as_f64().unwrap();
    assert!((b01 - 3f64.powf(-0.5)).abs() < 1e-10);
}

#[test]
fn reducible_generator_is_rejected_for_para() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("red.csv"), "-1,1,0\n1,-1,0\n0,1,-1\n").unwrap();
    let o = run(dir.path(), &["matrix", "--generator", "red.csv", "--mode", "para"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("irreducible"));
    let o = run(dir.path(), &["verify", "--generator", "red.csv", "--nu", "0.5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stdout).contains("requires an irreducible generator"));
}

#[test]
fn verify_at_nu_one_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "--nu", "1", "-o", "v.json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("v.json")).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    for c in v["checks"].as_array().unwrap() {
        if let Some(x) = c["value"].as_f64() {
            assert!(x <= 1e-6, "{c}");
        }
    }
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.json"), "{\"states\": [\"a\", \"b\"],\n \"H\": [[0, 1], [1, 0]],\n \"rates\": [1, \"x\"], \"nu\": 0.5}").unwrap();
    let o = run(dir.path(), &["simulate", "--spec", "s.json", "--process", "para", "--horizon", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
    let o = run(dir.path(), &["simulate", "--nu", "1.5", "--events", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(dir.path(), &["matrix", "--format", "svg"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(dir.path(), &["simulate", "--process", "semi"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_summary_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["report", "--replicas", "200000", "--t", "1", "--nu", "0.5", "--events", "200"];
    let mut summaries = Vec::new();
    for out in ["r1", "r2"] {
        let o = run(dir.path(), &[&args[..], &["--output-dir", out]].concat());
        assert!(o.status.success(), "{}", stderr(&o));
        summaries.push(fs::read_to_string(dir.path().join(out).join("summary.json")).unwrap());
    }
    assert_eq!(summaries[0], summaries[1]);
    let v: serde_json::Value = serde_json::from_str(&summaries[0]).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["all_passed", "cells", "lambda", "nmax", "replicas", "seed", "tolerances", "trajectories"]);
    assert_eq!(v["trajectories"].as_array().unwrap().len(), 3);
    for nu in ["0.5", "0.75", "0.9"] {
        assert!(dir.path().join("r1").join(format!("trajectory_nu{nu}.svg")).exists());
    }
}
