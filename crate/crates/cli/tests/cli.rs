use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bea(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bea")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn three_node_partition_function() {
    let o = bea(&["tables", "--n", "3", "--which", "pf"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    for row in [
        "1|2|3,3,0,0",
        "12|3,12,1,1",
        "1|23,23,3/4,0.75",
        "13|2,2,1/4,0.25",
        "123,123,1,1",
    ] {
        assert!(text.contains(row), "{row} missing from\n{text}");
    }
}

#[test]
fn five_node_utility_grid() {
    let text = stdout(&bea(&["tables", "--n", "5", "--which", "utility"]));
    let row = text.lines().find(|l| l.starts_with("123|4|5,")).unwrap();
    let u: Vec<f64> = row.split(',').skip(1).map(|x| x.parse().unwrap()).collect();
    for (got, want) in u.iter().zip([0.198, 0.101, 0.052, 0.052, 0.0]) {
        assert!((got - want).abs() < 5e-4, "{row}");
    }
    assert_eq!(text.lines().count(), 11);
}

#[test]
fn power_table_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("power.csv");
    let o = bea(&[
        "tables",
        "--n",
        "3",
        "--which",
        "power",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(path).unwrap();
    assert!(text.contains("13|2,1/16,1,1,"));
}

#[test]
fn solve_values() {
    let text = stdout(&bea(&["solve", "mv", "--n", "3"]));
    assert!(text.contains("MS1,11/24,0.458333"));
    let cmv0 = stdout(&bea(&["solve", "cmv", "--n", "3", "--lambda", "0"]));
    let row: Vec<f64> = cmv0
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((row[1] - 11.0 / 24.0).abs() < 1e-12 && (row[3] - 1.0 / 12.0).abs() < 1e-12);
    let sweep = stdout(&bea(&["solve", "cmv", "--n", "3", "--sweep", "0:4:0.05"]));
    let rows: Vec<Vec<f64>> = sweep
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 81);
    for w in rows.windows(2) {
        assert!(w[1][1] >= w[0][1] && w[1][2] <= w[0][2] && w[1][3] <= w[0][3]);
    }
    assert_eq!(code(&bea(&["solve", "cmv", "--n", "5", "--lambda", "1"])), 0);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&bea(&["solve", "cmv", "--lambda", "-0.5"])), 2);
    assert_eq!(code(&bea(&["tables", "--n", "4", "--which", "pf"])), 2);
    assert_eq!(code(&bea(&["stability", "--rho", "1.5"])), 2);
    assert_eq!(code(&bea(&["frobnicate"])), 2);
}

#[test]
fn stability_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let o = bea(&["stability", "--n", "3", "--rho", "0.5", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let table = fs::read_to_string(csv).unwrap();
    assert!(table.contains("\n12|3,yes,yes,"));
    assert!(table.contains("\n1|23,yes,no,"));
    let five = stdout(&bea(&["stability", "--n", "5"]));
    assert!(five.contains("[123|45]"));
    assert!(five.contains("[12|3|45] dominated by 123 forming a coalition, rest react with 45 (residual core)"));
    assert_eq!(code(&bea(&["stability", "--n", "3", "--rho", "0.01"])), 0);
}

fn run_small(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["montecarlo", "--set", "realizations=4", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    bea(&args)
}

#[test]
fn montecarlo_writes_manifest_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested").join("run");
    let o = run_small(
        &out,
        &["--sweep", "ring_width_delta", "--values", "-1/16,-1/32,0,1/32,1/16"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("sweep_ring_width_delta.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 6);
    let inner: Vec<f64> = rows[1..]
        .iter()
        .map(|r| r.split(',').nth(5).unwrap().parse().unwrap())
        .collect();
    for (got, want) in inner.iter().zip([114.583, 98.958, 83.333, 67.708, 52.083]) {
        assert!((got - want).abs() < 1e-3);
    }
    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("seed=20110"));
    assert!(manifest.contains("output.sweep_ring_width_delta.csv=sha256:"));

    let m = out.join("manifest.txt");
    let o = bea(&["montecarlo", "--replay", m.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("reproduced"));

    let again = dir.path().join("again");
    let o = bea(&[
        "montecarlo",
        "--replay",
        m.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        fs::read(again.join("sweep_ring_width_delta.csv")).unwrap(),
        csv.as_bytes()
    );

    let tampered = manifest
        .replace("config.seed=20110", "config.seed=1")
        .replace("seed=20110\n", "seed=1\n");
    fs::write(&m, tampered).unwrap();
    assert_eq!(code(&bea(&["montecarlo", "--replay", m.to_str().unwrap()])), 1);
}

#[test]
fn config_file_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# small run\nnode_count=20\nrealizations=3\nseed=5\n").unwrap();
    let out = dir.path().join("out");
    let o = bea(&[
        "montecarlo",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "node_count=30",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(out.join("montecarlo.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("none,,3,30,"));

    assert_eq!(code(&run_small(&out, &["--set", "realizations=0"])), 3);
    assert_eq!(code(&run_small(&out, &["--set", "colour=blue"])), 3);
    assert_eq!(
        code(&run_small(&out, &["--sweep", "node_count", "--values", "40.5"])),
        3
    );
    assert_eq!(code(&run_small(&out, &["--sweep", "nodes", "--values", "40"])), 3);
    assert_eq!(code(&run_small(&out, &["--set", "node_count"])), 2);
}
