//! Behavior tests for app `goldbach`: golden outputs, exit codes, config
//! handling, and the cache path.

use std::process::{Command, Output};

fn goldbach(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_goldbach"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_ok(args: &[&str]) -> String {
    let out = goldbach(args);
    assert!(
        out.status.success(),
        "expected success for {args:?}, stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 output")
}

fn exit_code(args: &[&str]) -> i32 {
    goldbach(args).status.code().expect("exit code")
}

#[test]
fn golden_count_json() {
    let out = stdout_ok(&["count", "--n", "21", "--y", "8", "--u", "5"]);
    assert_eq!(
        out,
        "{\"N\":21,\"y\":8,\"U\":5,\"unweighted\":1,\"weighted\":5.1262224382503163e0}\n"
    );
}

#[test]
fn golden_count_csv() {
    let out = stdout_ok(&[
        "count", "--n", "21", "--y", "8", "--u", "5", "--format", "csv",
    ]);
    assert_eq!(
        out,
        "N,y,U,unweighted,weighted\n21,8,5,1,5.1262224382503163e0\n"
    );
}

#[test]
fn count_lists_triples_on_request() {
    let out = stdout_ok(&[
        "count",
        "--n",
        "21",
        "--y",
        "8",
        "--u",
        "5",
        "--emit-triples",
    ]);
    assert!(out.contains("\"triples\":[[7,11,3]]"), "got: {out}");
}

#[test]
fn singular_even_n_is_exactly_zero() {
    let out = stdout_ok(&[
        "singular", "--n", "4", "--route", "euler", "--cutoff", "1000",
    ]);
    assert!(out.contains("\"value\":0.0000000000000000e0"), "got: {out}");
}

#[test]
fn singular_scan_reports_slope() {
    let out = stdout_ok(&["singular", "--n", "21", "--scan", "100,1000"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines.len(),
        4,
        "two series rows, euler reference, summary: {out}"
    );
    assert!(
        lines[3].contains("\"slope\":-"),
        "decay slope should be negative: {out}"
    );
}

#[test]
fn arcs_enumeration_and_disjointness() {
    let out = stdout_ok(&["arcs", "--p", "3", "--q", "10"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(
        lines[0],
        "{\"a\":1,\"q\":1,\"radius_num\":1,\"radius_den\":10}"
    );
    assert_eq!(lines[4], "{\"arcs\":4,\"disjoint\":true}");
}

#[test]
fn expsum_matches_known_value_at_one_half() {
    let out = stdout_ok(&["expsum", "--x", "10", "--h", "10", "--a", "1", "--q", "2"]);
    let re: f64 = out
        .split("\"re\":")
        .nth(1)
        .and_then(|s| s.split(',').next())
        .unwrap()
        .parse()
        .unwrap();
    assert!((re - -3.960813169597578).abs() < 1e-12, "re = {re}");
}

#[test]
fn primes_count_only_summarizes() {
    let out = stdout_ok(&["primes", "--lo", "0", "--hi", "30", "--count-only"]);
    assert_eq!(out, "{\"lo\":0,\"hi\":30,\"count\":10}\n");
}

#[test]
fn primes_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("primes.bin");
    let cache_s = cache.to_str().unwrap();
    let first = stdout_ok(&[
        "primes",
        "--lo",
        "0",
        "--hi",
        "100",
        "--sieve-cache",
        cache_s,
    ]);
    assert!(cache.exists(), "cache file written");
    let second = stdout_ok(&[
        "primes",
        "--lo",
        "0",
        "--hi",
        "100",
        "--sieve-cache",
        cache_s,
    ]);
    assert_eq!(first, second);
    assert!(first.contains("\"count\":25"));
}

#[test]
fn sieve_cap_env_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_goldbach"))
        .args(["primes", "--lo", "0", "--hi", "1000"])
        .env("GOLDBACH_SIEVE_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn unknown_flag_is_usage_error() {
    assert_eq!(exit_code(&["count", "--n", "21", "--badflag", "1"]), 2);
}

#[test]
fn module_errors_exit_one_with_message() {
    let out = goldbach(&["count", "--n", "21", "--y", "11", "--u", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("window order"));
}

#[test]
fn series_cutoff_out_of_range_is_usage_error() {
    assert_eq!(
        exit_code(&["singular", "--n", "21", "--route", "series", "--cutoff", "0.5"]),
        2
    );
}

#[test]
fn sweep_without_grid_is_usage_error() {
    assert_eq!(
        exit_code(&["ratio-sweep", "--y-rule", "N/3", "--u-rule", "y/2"]),
        2
    );
}

#[test]
fn sweep_config_file_unknown_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    std::fs::write(&cfg, "n_grid = 21\ny_rule = N/3\nu_rule = y/2\nbogus = 1\n").unwrap();
    let out = goldbach(&["ratio-sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
}

#[test]
fn sweep_config_file_drives_run_and_writes_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    let csv_path = dir.path().join("rows.csv");
    std::fs::write(
        &cfg,
        format!(
            "# desk-scale smoke grid\nn_grid = 21, 101\ny_rule = N/3\nu_rule = y^0.6\noutput = {}\n",
            csv_path.display()
        ),
    )
    .unwrap();
    let stdout_csv = stdout_ok(&[
        "ratio-sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    let file_csv = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(stdout_csv, file_csv);
    assert!(stdout_csv.starts_with("N,y,U,unweighted,weighted,main_term,ratio,weighted_ratio,ms\n"));
    assert_eq!(stdout_csv.lines().count(), 3);
}

#[test]
fn sweep_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    std::fs::write(&cfg, "n_grid = 21\ny_rule = N/3\nu_rule = y/2\n").unwrap();
    let out = stdout_ok(&[
        "ratio-sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--n-grid",
        "101",
        "--format",
        "csv",
    ]);
    assert!(out.contains("\n101,"), "flag grid wins: {out}");
    assert!(!out.contains("\n21,"));
}

#[test]
fn gap_scan_single_n() {
    let out = stdout_ok(&["gap-scan", "--lo", "21", "--hi", "21", "--format", "csv"]);
    assert_eq!(out, "N,min_p3\n21,2\n");
}

#[test]
fn gap_scan_json_summary() {
    let out = stdout_ok(&["gap-scan", "--lo", "100001", "--hi", "100011"]);
    assert_eq!(
        out,
        "{\"n_lo\":100001,\"n_hi\":100011,\"count\":6,\"max_min_p3\":3,\"argmax_n\":100001,\
         \"violations\":[],\"unrepresented\":[]}\n"
    );
}

#[test]
fn human_format_is_labelled() {
    let out = stdout_ok(&[
        "count", "--n", "21", "--y", "8", "--u", "5", "--format", "human",
    ]);
    assert!(
        out.contains("N = 21") && out.contains("unweighted = 1"),
        "got: {out}"
    );
}
