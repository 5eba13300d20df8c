use std::path::Path;
use std::process::{Command, Output};

fn trichonet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trichonet"))
        .args(args)
        .env_remove("TRICHONET_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = trichonet(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// `(degree, values...)` rows of a CSV with a header.
fn rows(csv: &str) -> Vec<(u64, Vec<f64>)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let mut f = l.split(',');
            let k = f.next().unwrap().parse().unwrap();
            (k, f.map(|v| v.parse().unwrap()).collect())
        })
        .collect()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn simulate_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = ["simulate", "--L", "1", "--U", "1", "--n", "10", "--runs", "1", "--seed", "7"];
    ok(&[&args[..], &["--out", s(&a)]].concat());
    ok(&[&args[..], &["--out", s(&b), "--threads", "2"]].concat());
    let first = std::fs::read(&a).unwrap();
    assert_eq!(first, std::fs::read(&b).unwrap());
    assert!(String::from_utf8(first).unwrap().starts_with("degree,mean_probability,variance\n"));

    let manifest = json(&dir.path().join("a.csv.manifest.json"));
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["rng_seed"], 7);
    assert_eq!(manifest["config"]["target_size"], 10);
    assert_eq!(manifest["artifacts"][0], s(&a));
}

#[test]
fn simulate_rejects_crossed_thresholds() {
    let out = trichonet(&["simulate", "--L", "3", "--U", "2", "--n", "100"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ℒ ≤ 𝒰"));
}

#[test]
fn simulate_poisson_fixed_reports_degree_zero() {
    let csv = ok(&["simulate", "--L", "1", "--U", "1", "--n", "2000", "--runs", "4", "--mode", "poisson-fixed:100"]);
    let r = rows(&csv);
    assert_eq!(r[0].0, 0);
    let mass: f64 = r.iter().map(|(_, v)| v[0]).sum();
    assert!((mass - 1.0).abs() < 1e-6);
    let bad = trichonet(&["simulate", "--L", "1", "--U", "1", "--n", "20", "--mode", "poisson-fixed:100"]);
    assert_eq!(bad.status.code(), Some(1));
    let bad = trichonet(&["simulate", "--L", "1", "--U", "1", "--n", "20", "--mode", "nonsense"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn fit_simulated_bounded_network() {
    let dir = tempfile::tempdir().unwrap();
    let hist = dir.path().join("sim.hist.csv");
    let report = dir.path().join("sim.json");
    ok(&[
        "simulate", "--L", "2", "--U", "8", "--n", "100000", "--runs", "100", "--seed", "3",
        "--hist-out", s(&hist),
    ]);
    ok(&["fit", "--hist", s(&hist), "--out", s(&report)]);
    let r = json(&report);
    let exponent = r["exponent"].as_f64().unwrap();
    assert!((exponent + 3.0).abs() <= 0.4, "exponent {exponent}");

    let curve = std::fs::read_to_string(dir.path().join("sim.curve.csv")).unwrap();
    assert!(curve.starts_with("degree,empirical,fitted\n"));
    assert!(rows(&curve).iter().all(|(_, v)| v.len() == 2 && v[1] > 0.0));
    assert!(dir.path().join("sim.json.manifest.json").exists());
}

#[test]
fn fit_exact_trichotomy_sample() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = ok(&[
        "eval", "--model", "trichotomy", "--L", "2", "--U", "8", "--gamma", "2", "--n", "100000",
        "--k-max", "60",
    ]);
    let mut hist = String::from("degree,count\n");
    for (k, v) in rows(&pmf) {
        let c = (v[0] * 1e7).round() as u64;
        if c > 0 {
            hist.push_str(&format!("{k},{c}\n"));
        }
    }
    let path = dir.path().join("exact.csv");
    std::fs::write(&path, hist).unwrap();
    let r: serde_json::Value = serde_json::from_str(&ok(&["fit", "--hist", s(&path)])).unwrap();
    let ratio = r["rmse_trichotomy"].as_f64().unwrap() / r["rmse_power_law_only"].as_f64().unwrap();
    assert!(ratio <= 0.1, "ratio {ratio}");
}

#[test]
fn fit_from_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hubs.txt");
    // hubs of degree d (count ~ d^-2.5), each wired to its own leaves
    let mut text = String::from("# hub leaf\n");
    let mut leaf = 0;
    for d in 2..40u32 {
        let hubs = (5000.0 / f64::from(d).powf(2.5)).round() as u32;
        for h in 0..hubs {
            for _ in 0..d {
                text.push_str(&format!("h{d}_{h}\tl{leaf}\n"));
                leaf += 1;
            }
        }
    }
    std::fs::write(&path, text).unwrap();
    let out = trichonet(&["fit", "--edges", s(&path), "--delimiter", "tab", "--L0", "3", "--U0", "10", "--fixed-boundaries"]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(out.status.success(), "{stderr}");
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["dataset"], "hubs");
    assert_eq!(r["lower"], 3);
    assert_eq!(r["upper"], 10);
}

#[test]
fn fit_errors_name_phase_and_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(trichonet(&["fit"]).status.code(), Some(1));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "degree,count\n1,x\n").unwrap();
    let out = trichonet(&["fit", "--hist", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ingest: line 2"));

    let small = dir.path().join("small.csv");
    std::fs::write(&small, "degree,count\n1,5\n2,3\n").unwrap();
    let out = trichonet(&["fit", "--hist", s(&small)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fit: "));

    let missing = dir.path().join("missing.csv");
    assert_eq!(trichonet(&["fit", "--hist", s(&missing)]).status.code(), Some(2));
}

#[test]
fn eval_models() {
    let tri = rows(&ok(&[
        "eval", "--model", "trichotomy", "--L", "2", "--LL", "2", "--U", "8", "--UU", "8", "--gamma", "2",
        "--n", "100000",
    ]));
    assert_eq!(tri.len(), 100_000);
    let mass: f64 = tri.iter().map(|(_, v)| v[0]).sum();
    assert!((mass - 1.0).abs() < 1e-9, "mass {mass}");

    let ba = ok(&["eval", "--model", "ba", "--k-max", "3"]);
    assert_eq!(ba.lines().nth(1), Some("1,0.666666667"));

    let degenerate = rows(&ok(&["eval", "--model", "poisson", "--mean", "0", "--k-max", "5"]));
    assert_eq!(degenerate[0], (0, vec![1.0]));
    assert!(degenerate[1..].iter().all(|(_, v)| v[0] == 0.0));

    let geom = rows(&ok(&["eval", "--model", "mixture-geom", "--p0", "1", "--k-max", "4"]));
    assert_eq!(geom, rows(&ok(&["eval", "--model", "exp", "--k-max", "4"])));

    assert_eq!(trichonet(&["eval", "--model", "weibull"]).status.code(), Some(1));
    assert_eq!(trichonet(&["eval", "--model", "mixture-pl"]).status.code(), Some(1));
    let out = trichonet(&["eval", "--model", "trichotomy", "--L", "2", "--U", "8", "--gamma", "5"]);
    assert_eq!(out.status.code(), Some(1));
}

fn integrate(extra: &[&str]) -> Vec<(u64, Vec<f64>)> {
    let base = ["integrate", "--L", "1", "--U", "1", "--t-end", "40", "--residential-case", "small-u"];
    rows(&ok(&[&base[..], extra].concat()))
}

#[test]
fn integrate_constant_weight_is_geometric() {
    let r = integrate(&[]);
    let tv: f64 = 0.5
        * r.iter()
            .map(|(k, v)| (v[0] - 0.5f64.powi(*k as i32)).abs())
            .sum::<f64>();
    assert!(tv <= 0.005, "tv {tv}");

    // trapezoid error is O(dt²): ~3e-4 at the default step, under 1e-5 here
    let coarse = integrate(&["--dt", "0.008"]);
    let fine = integrate(&["--dt", "0.004"]);
    for ((_, a), (_, b)) in coarse.iter().zip(&fine) {
        assert!((a[0] - b[0]).abs() < 1e-5);
    }
}

#[test]
fn integrate_reports_leak_and_stability() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("me.csv");
    let run = trichonet(&[
        "integrate", "--L", "1", "--U", "inf", "--residential-case", "ba", "--out", s(&out),
    ]);
    assert!(run.status.success());
    assert!(String::from_utf8_lossy(&run.stderr).contains("warning:"));
    let manifest = json(&dir.path().join("me.csv.manifest.json"));
    assert!(manifest["results"]["leak"].as_f64().unwrap() > 1e-6);
    assert_eq!(manifest["warnings"].as_array().unwrap().len(), 1);

    let unstable = trichonet(&["integrate", "--L", "1", "--U", "1", "--dt", "1"]);
    assert_eq!(unstable.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unstable.stderr).contains("0.1"));
}

#[test]
fn compare_reports() {
    let dir = tempfile::tempdir().unwrap();
    let hist = dir.path().join("h.csv");
    std::fs::write(
        &hist,
        "degree,count\n1,5000\n2,2000\n3,900\n4,500\n5,300\n6,200\n8,100\n10,60\n14,30\n20,12\n30,4\n",
    )
    .unwrap();
    let report = dir.path().join("h.json");
    ok(&["fit", "--hist", s(&hist), "--dataset", "toy", "--out", s(&report)]);
    let table = ok(&["compare", s(&report)]);
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "dataset,L,U,exponent,rmse_ours,rmse_pl");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("toy,"));

    assert_eq!(trichonet(&["compare"]).status.code(), Some(1));
    let missing = dir.path().join("gone.json");
    let out = trichonet(&["compare", s(&report), s(&missing)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gone.json"));
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(trichonet(&["--help"]).status.code(), Some(0));
    assert_eq!(trichonet(&["simulate", "--bogus"]).status.code(), Some(1));
}
