//! CLI behavior: exit codes, report shape, reproducibility (the
//! determinism acceptance criterion), and the integrator-comparison
//! command.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quadnn-cli"))
}

fn tmpdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("quadnn-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Strips the wall-time column (the last CSV field) from every line.
fn strip_wall_time(csv: &str) -> String {
    csv.lines()
        .map(|l| match l.rsplit_once(',') {
            Some((head, _)) => head.to_string(),
            None => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn unknown_suite_exits_one_and_lists_ids() {
    let out = bin().args(["run", "--suite", "nosuch"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("t3r1"), "stderr should list valid ids:\n{stderr}");
}

#[test]
fn run_produces_one_row_with_populated_mae() {
    let dir = tmpdir();
    let path = dir.join("r.csv");
    let out = bin()
        .args([
            "run",
            "--suite",
            "t3r1",
            "--n",
            "30",
            "--epochs-lbfgs",
            "100",
            "--lr",
            "0.1",
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("suite_id,n_train,widths,"));
    let row = lines.next().expect("one data row");
    assert!(row.starts_with("t3r1,30,1-10-10-1,0,100,"), "row: {row}");
    let mae_field = row.split(',').nth(8).unwrap();
    let mae: f64 = mae_field.parse().unwrap();
    assert!(mae.is_finite() && mae < 1e-2, "mae column: {mae_field}");
    assert!(lines.next().is_none());
}

/// Acceptance criterion 12: identical flags give byte-identical reports
/// modulo the wall-time column.
#[test]
fn criterion_12_reports_are_deterministic() {
    let dir = tmpdir();
    let (p1, p2) = (dir.join("a.csv"), dir.join("b.csv"));
    for p in [&p1, &p2] {
        let out = bin()
            .args([
                "run",
                "--suite",
                "inv-ex5",
                "--epochs-adam",
                "100",
                "--epochs-lbfgs",
                "60",
                "--seed",
                "11",
                "--seeds",
                "2",
                "--out",
                p.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    let a = strip_wall_time(&std::fs::read_to_string(&p1).unwrap());
    let b = strip_wall_time(&std::fs::read_to_string(&p2).unwrap());
    assert_eq!(a, b, "reports differ beyond the wall-time column");
    println!("criterion 12 PASS: repeated runs are byte-identical modulo wall_time_ms");

    // JSON mirrors the same rows
    let pj = dir.join("a.json");
    let out = bin()
        .args([
            "run",
            "--suite",
            "inv-ex5",
            "--epochs-adam",
            "100",
            "--epochs-lbfgs",
            "60",
            "--seed",
            "11",
            "--seeds",
            "2",
            "--format",
            "json",
            "--out",
            pj.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let rows: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&pj).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
    assert!(rows[0]["final_loss"].is_number());
}

#[test]
fn quad_compare_orders_the_integrators() {
    let out = bin()
        .args(["quad-compare", "--function", "exp", "--n-list", "16"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    let gauss: f64 = fields[4].parse().unwrap();
    let trap: f64 = fields[5].parse().unwrap();
    let mc: f64 = fields[6].parse().unwrap();
    assert!(gauss < 1e-13, "gauss error {gauss:e}");
    assert!(trap > 1e-5 && trap < 1e-2, "trapezoid error {trap:e}");
    assert!(mc > 1e-3, "monte carlo error {mc:e}");

    // constant-like check: sin over a symmetric interval is ~0 for all
    let out = bin()
        .args(["quad-compare", "--function", "sin", "--a", "-1", "--b", "1", "--n-list", "8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    let out = bin().args(["quad-compare", "--function", "nosuch"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn quad_compare_monte_carlo_is_reproducible() {
    let run = || {
        let out = bin()
            .args(["quad-compare", "--function", "runge", "--n-list", "8,16", "--seed", "3"])
            .output()
            .unwrap();
        String::from_utf8(out.stdout).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn sweep_covers_the_grid_and_matches_single_runs() {
    let dir = tmpdir();
    let path = dir.join("sweep.csv");
    let out = bin()
        .args([
            "sweep",
            "--suite",
            "ex1",
            "--n-list",
            "5,10,20",
            "--epochs-lbfgs",
            "80",
            "--seed",
            "5",
            "--out",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    let mae_at = |row: &str| -> f64 { row.split(',').nth(8).unwrap().parse().unwrap() };
    let mae10 = mae_at(rows[1]);
    let mae20 = mae_at(rows[2]);
    assert!(
        mae10 <= 10.0 * mae20,
        "n=10 should be within 10x of n=20: {mae10:e} vs {mae20:e}"
    );

    // a single-cell sweep equals the corresponding run row
    let single = dir.join("single.csv");
    let sweep1 = dir.join("sweep1.csv");
    bin()
        .args([
            "run", "--suite", "ex1", "--n", "10", "--epochs-lbfgs", "80", "--lr", "0.1",
            "--seed", "5", "--out",
            single.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    bin()
        .args([
            "sweep", "--suite", "ex1", "--n-list", "10", "--lr-list", "0.1", "--epochs-lbfgs",
            "80", "--seed", "5", "--out",
            sweep1.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    let a = strip_wall_time(&std::fs::read_to_string(&single).unwrap());
    let b = strip_wall_time(&std::fs::read_to_string(&sweep1).unwrap());
    assert_eq!(a, b);
}

/// CSV rows round-trip: every configuration and result field parses back
/// to exactly the values the JSON mirror carries.
#[test]
fn csv_rows_roundtrip_against_json() {
    let dir = tmpdir();
    let (pc, pj) = (dir.join("rt.csv"), dir.join("rt.json"));
    for (path, fmt) in [(&pc, "csv"), (&pj, "json")] {
        let out = bin()
            .args([
                "run", "--suite", "ex1", "--n", "12", "--epochs-lbfgs", "60", "--seed", "3",
                "--format", fmt, "--out",
                path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    let csv = std::fs::read_to_string(&pc).unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&pj).unwrap()).unwrap();
    let row = csv.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    let j = &json[0];
    assert_eq!(fields[0], j["suite_id"].as_str().unwrap());
    assert_eq!(fields[1].parse::<u64>().unwrap(), j["n_train"].as_u64().unwrap());
    assert_eq!(fields[2], j["widths"].as_str().unwrap());
    assert_eq!(fields[3].parse::<u64>().unwrap(), j["adam_epochs"].as_u64().unwrap());
    assert_eq!(fields[4].parse::<u64>().unwrap(), j["lbfgs_epochs"].as_u64().unwrap());
    assert_eq!(fields[5].parse::<f64>().unwrap(), j["lr"].as_f64().unwrap());
    assert_eq!(fields[6].parse::<u64>().unwrap(), j["seed"].as_u64().unwrap());
    // 17 significant digits make the float fields lossless
    assert_eq!(
        fields[7].parse::<f64>().unwrap().to_bits(),
        j["final_loss"].as_f64().unwrap().to_bits()
    );
    assert_eq!(
        fields[8].parse::<f64>().unwrap().to_bits(),
        j["mae"].as_f64().unwrap().to_bits()
    );
}

/// Suites carry no global state: rows are the same whether suites run
/// together or separately, in any order.
#[test]
fn suite_rows_do_not_depend_on_run_order() {
    let dir = tmpdir();
    let run_sel = |sel: &str, name: &str| -> String {
        let p = dir.join(name);
        let out = bin()
            .args([
                "run", "--suite", sel, "--epochs-lbfgs", "40", "--seed", "2", "--out",
                p.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        strip_wall_time(&std::fs::read_to_string(&p).unwrap())
    };
    let both = run_sel("ex1", "a.csv") + "\n" + &run_sel("ex2", "b.csv");
    let ex2_first = run_sel("ex2", "c.csv") + "\n" + &run_sel("ex1", "d.csv");
    let rows = |s: &str| -> Vec<String> {
        s.lines().filter(|l| l.starts_with("ex")).map(|l| l.to_string()).collect()
    };
    let mut a = rows(&both);
    let mut b = rows(&ex2_first);
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

/// Depth sweep on EX.2 completes without non-finite losses.
#[test]
fn depth_sweep_stays_finite() {
    let dir = tmpdir();
    let p = dir.join("depth.csv");
    let out = bin()
        .args([
            "sweep", "--suite", "ex2", "--n-list", "10", "--hidden-list",
            "10,10;10,10,10;10,10,10,10;10,10,10,10,10;10,10,10,10,10,10",
            "--epochs-lbfgs", "60", "--out",
            p.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&p).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let loss: f64 = row.split(',').nth(7).unwrap().parse().unwrap();
        assert!(loss.is_finite(), "non-finite loss in {row}");
    }
}

#[test]
fn list_prints_registry() {
    let out = bin().args(["list"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["t3r1", "t3r13", "t8s5", "oc-ex7", "inv-frac"] {
        assert!(text.contains(id), "missing {id} in list output");
    }
}

#[test]
fn out_dir_env_var_sets_default_directory() {
    let dir = tmpdir().join("envout");
    std::fs::create_dir_all(&dir).unwrap();
    let out = bin()
        .env("QUADNN_OUT_DIR", &dir)
        .args([
            "quad-compare", "--function", "exp", "--n-list", "4", "--out", "q.csv",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.join("q.csv").exists());
}
