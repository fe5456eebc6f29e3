use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use netshare::cli::output::{from_csv, to_csv, AnalyzeRow, ProfileRow, SimulateRow, TableRow};
use proptest::prelude::*;

const BUNDLED: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/urban_two_ball.toml");

fn netshare(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netshare"))
        .args(args)
        .env_remove("NETSHARE_THREADS")
        .output()
        .unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Bundled config with `edits` applied as whole-line replacements.
fn variant(dir: &Path, name: &str, edits: &[(&str, &str)]) -> PathBuf {
    let mut text = std::fs::read_to_string(BUNDLED).unwrap();
    for (from, to) in edits {
        assert!(text.contains(from), "{from}");
        text = text.replace(from, to);
    }
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_bundled_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rates.csv");
    let run = netshare(&["analyze", BUNDLED, "--out", s(&out)]);
    assert!(run.status.success(), "{}", stderr(&run));
    let rows: Vec<AnalyzeRow> = from_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let names: Vec<&str> = rows.iter().map(|r| r.quantity.as_str()).collect();
    assert_eq!(names, ["r_bar_1", "r_bar_2", "r_tilde_1", "r_tilde_2", "r_nsh", "r_sh"]);
    assert!(rows.iter().all(|r| r.value.is_finite() && r.value > 0.0));
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.contains("r_sh"));
    assert!(netshare::cli::manifest_path(&out).exists());
}

#[test]
fn degenerate_second_operator_collapses_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = variant(
        dir.path(),
        "single.toml",
        &[
            ("operator2.density_per_km2 = 30.0", "operator2.density_per_km2 = 0.0"),
            ("operator2.bandwidth_hz = 2.0e7", "operator2.bandwidth_hz = 0.0"),
        ],
    );
    let run = netshare(&["analyze", s(&cfg)]);
    assert!(run.status.success(), "{}", stderr(&run));
    let rows: Vec<AnalyzeRow> = from_csv(&String::from_utf8(run.stdout).unwrap()).unwrap();
    let get = |q: &str| rows.iter().find(|r| r.quantity == q).unwrap().value;
    assert_eq!(get("r_nsh"), 2.0e7 * get("r_bar_1"));
    assert_eq!(get("r_bar_2"), 0.0);
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let typo = variant(dir.path(), "typo.toml", &[("linkstate.d_meters", "linkstate.d_meter")]);
    let run = netshare(&["analyze", s(&typo)]);
    assert_eq!(run.status.code(), Some(2));
    assert!(stderr(&run).contains("d_meter"), "{}", stderr(&run));

    let bad = variant(dir.path(), "bad.toml", &[("linkstate.q_los_inner = 0.7195", "linkstate.q_los_inner = 1.5")]);
    let run = netshare(&["analyze", s(&bad)]);
    assert_eq!(run.status.code(), Some(2));
    assert!(stderr(&run).contains("q_los_inner"), "{}", stderr(&run));

    let run = netshare(&["optimize", BUNDLED, "--lambda-range", "5"]);
    assert_eq!(run.status.code(), Some(2));
    let run = netshare(&["analyze"]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn io_and_numerical_errors() {
    let run = netshare(&["analyze", "/nonexistent/config.toml"]);
    assert_eq!(run.status.code(), Some(4));

    let dir = tempfile::tempdir().unwrap();
    let cfg = variant(
        dir.path(),
        "starved.toml",
        &[("simulation.seed = 20240601", "simulation.seed = 20240601\nquadrature.max_subdivisions = 1")],
    );
    let run = netshare(&["analyze", s(&cfg)]);
    assert_eq!(run.status.code(), Some(3), "{}", stderr(&run));
    assert!(stderr(&run).contains("r_"), "{}", stderr(&run));

    let run = netshare(&["table", s(&cfg), "--w-ratios", "1", "--p-ratios", "1", "--lambda-range", "30,30"]);
    assert_eq!(run.status.code(), Some(3), "{}", stderr(&run));
}

#[test]
fn replay_reproduces_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("sim.csv");
    let run = netshare(&["simulate", BUNDLED, "--realizations", "300", "--seed", "4", "--out", s(&first), "--threads", "2"]);
    assert!(run.status.success(), "{}", stderr(&run));
    let manifest = netshare::cli::manifest_path(&first);
    let text = std::fs::read_to_string(&manifest).unwrap();
    assert!(text.contains("\"seed\": 4"));

    let second = dir.path().join("replayed.csv");
    let run = netshare(&["replay", s(&manifest), "--out", s(&second)]);
    assert!(run.status.success(), "{}", stderr(&run));
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());

    let analyzed = dir.path().join("a.csv");
    assert!(netshare(&["analyze", BUNDLED, "--out", s(&analyzed)]).status.success());
    let again = dir.path().join("b.csv");
    let m = netshare::cli::manifest_path(&analyzed);
    assert!(netshare(&["replay", s(&m), "--out", s(&again)]).status.success());
    assert_eq!(std::fs::read(&analyzed).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn simulate_is_seed_deterministic() {
    let a = netshare(&["simulate", BUNDLED, "--realizations", "200", "--seed", "9"]);
    let b = Command::new(env!("CARGO_BIN_EXE_netshare"))
        .args(["simulate", BUNDLED, "--realizations", "200", "--seed", "9"])
        .env("NETSHARE_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let rows: Vec<SimulateRow> = from_csv(&String::from_utf8(a.stdout).unwrap()).unwrap();
    assert_eq!(rows.len(), 3);

    let one = netshare(&["simulate", BUNDLED, "--realizations", "1"]);
    assert!(one.status.success(), "{}", stderr(&one));
}

#[test]
fn optimize_writes_profile() {
    let run = netshare(&["optimize", BUNDLED, "--objective", "sharing", "--lambda-range", "5,50"]);
    assert!(run.status.success(), "{}", stderr(&run));
    let csv = String::from_utf8(run.stdout.clone()).unwrap();
    assert!(csv.starts_with("lambda,rate_bit_s\n"));
    let rows: Vec<ProfileRow> = from_csv(&csv).unwrap();
    assert_eq!(rows.len(), 16);
    assert!(stderr(&run).contains("interior"));
}

#[test]
fn single_cell_table_matches_analyze() {
    let table = netshare(&["table", BUNDLED, "--w-ratios", "1", "--p-ratios", "1", "--lambda-range", "30,30"]);
    assert!(table.status.success(), "{}", stderr(&table));
    let rows: Vec<TableRow> = from_csv(&String::from_utf8(table.stdout).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);

    let analyze = netshare(&["analyze", BUNDLED]);
    let report: Vec<AnalyzeRow> = from_csv(&String::from_utf8(analyze.stdout).unwrap()).unwrap();
    let get = |q: &str| report.iter().find(|r| r.quantity == q).unwrap().value / 1e6;
    assert!((rows[0].r_nsh_mbit_s.unwrap() - get("r_nsh")).abs() < 1e-9 * get("r_nsh"));
    assert!((rows[0].r_sh_mbit_s.unwrap() - get("r_sh")).abs() < 1e-9 * get("r_sh"));
    let text = String::from_utf8(table.stderr).unwrap();
    assert!(text.contains("Non-sharing") && text.contains("W2/W1=1"));
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![any::<f64>().prop_filter("finite", |v| v.is_finite()), Just(0.0), Just(-0.0)]
}

proptest! {
    #[test]
    fn analyze_rows_round_trip(name in "[a-z_0-9]{1,12}", value in finite(), err in finite(),
                               lo in proptest::option::of(finite()), n in proptest::option::of(0usize..1_000_000)) {
        let rows = vec![AnalyzeRow {
            quantity: name,
            unit: "bit/s".into(),
            value,
            abs_error: err,
            x_lower: lo,
            x_upper: None,
            evaluations: n,
        }];
        let back: Vec<AnalyzeRow> = from_csv(&to_csv(&rows).unwrap()).unwrap();
        prop_assert_eq!(back, rows);
    }

    #[test]
    fn table_rows_round_trip(w in finite(), p in finite(), a in proptest::option::of(finite()), b in proptest::option::of(finite())) {
        let rows = vec![TableRow { w_ratio: w, p_ratio: p, r_nsh_mbit_s: a, r_sh_mbit_s: b, ratio: a.zip(b).map(|(x, y)| y / x) }];
        let back: Vec<TableRow> = from_csv(&to_csv(&rows).unwrap()).unwrap();
        prop_assert_eq!(back.len(), 1);
        prop_assert_eq!(back[0].w_ratio, w);
        prop_assert_eq!(back[0].r_sh_mbit_s, b);
    }

    #[test]
    fn other_rows_round_trip(l in finite(), r in finite(), m in "[a-z_]{1,10}") {
        let profile = vec![ProfileRow { lambda: l, rate_bit_s: r }];
        prop_assert_eq!(from_csv::<ProfileRow>(&to_csv(&profile).unwrap()).unwrap(), profile);
        let sim = vec![SimulateRow { mode: m, analytic: l, mc_mean: r, mc_stderr: 0.5, rel_gap: -l, no_coverage_fraction: 0.0 }];
        prop_assert_eq!(from_csv::<SimulateRow>(&to_csv(&sim).unwrap()).unwrap(), sim);
    }
}
