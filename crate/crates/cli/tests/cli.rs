//! End-to-end tests of the `permcode` binary.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_permcode"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write_temp(name: &str, content: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("permcode-test-{name}-{}", std::process::id()));
    std::fs::write(&path, content).unwrap();
    path
}

#[test]
fn dist_reports_worked_examples() {
    let input = write_temp("dist", "1 5 4 2 3\n3 4 5 1 2\n");
    let path = input.to_str().unwrap();
    assert_eq!(stdout_of(&["dist", "--metric", "tau", "--input", path]).trim(), "7");
    assert_eq!(stdout_of(&["dist", "--metric", "invl1", "--input", path]).trim(), "3");
    assert_eq!(stdout_of(&["dist", "--metric", "footrule", "--input", path]).trim(), "6");
    assert_eq!(stdout_of(&["dist", "--metric", "chebyshev", "--input", path]).trim(), "2");
    std::fs::remove_file(input).ok();
}

#[test]
fn dist_identical_pair_is_zero() {
    let input = write_temp("dist-same", "2 1 3\n2 1 3\n");
    let path = input.to_str().unwrap();
    assert_eq!(stdout_of(&["dist", "--metric", "footrule", "--input", path]).trim(), "0");
    std::fs::remove_file(input).ok();
}

#[test]
fn dist_parse_error_names_the_line() {
    let input = write_temp("dist-bad", "1 2 3\n1 2 2\n");
    let path = input.to_str().unwrap();
    let out = run(&["dist", "--metric", "tau", "--input", path]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "stderr was: {err}");
    std::fs::remove_file(input).ok();
}

#[test]
fn dist_rejects_odd_line_count() {
    let input = write_temp("dist-odd", "1 2 3\n3 2 1\n2 1 3\n");
    let path = input.to_str().unwrap();
    let out = run(&["dist", "--metric", "tau", "--input", path]);
    assert!(!out.status.success());
    std::fs::remove_file(input).ok();
}

#[test]
fn quantize_is_deterministic_and_respects_chebyshev_bound() {
    let args = [
        "quantize", "--space", "chebyshev", "--moderate", "--delta", "0.5",
        "--n", "100", "--count", "20", "--seed", "42",
    ];
    let first = stdout_of(&args);
    let second = stdout_of(&args);
    assert_eq!(first, second, "same seed must give identical output");
    let summary = first.lines().last().unwrap();
    assert!(summary.starts_with("# scheme=block-sort-inverse"), "summary: {summary}");
    let worst: f64 = field(summary, "observed_worst=");
    let guaranteed: f64 = field(summary, "guaranteed_distortion=");
    assert!(worst <= guaranteed);
}

fn field(summary: &str, key: &str) -> f64 {
    let start = summary.find(key).unwrap() + key.len();
    summary[start..]
        .split(|c: char| c.is_whitespace())
        .next()
        .unwrap()
        .trim_end_matches(|c: char| !c.is_ascii_digit())
        .parse()
        .unwrap()
}

#[test]
fn quantize_large_regime_codebook_matches_leading_term() {
    let out = stdout_of(&[
        "quantize", "--space", "tau", "--large", "--b", "0.25",
        "--n", "1000", "--count", "1",
    ]);
    let summary = out.lines().last().unwrap();
    let log2_size: f64 = field(summary, "log_codebook=");
    // Leading term n·log2(ceil(1/(2b))) = 1000·log2(2) = 1000 bits, with a
    // lower-order remainder from the leftover block.
    assert!((log2_size - 1000.0).abs() < 0.15 * 1000.0, "log2|C| = {log2_size}");
}

#[test]
fn quantize_small_regime_inv_l1_meets_target() {
    let out = stdout_of(&[
        "quantize", "--space", "invl1", "--small", "--a", "0.5", "--delta", "1",
        "--n", "64", "--count", "50", "--seed", "3",
    ]);
    let summary = out.lines().last().unwrap();
    let worst: f64 = field(summary, "observed_worst=");
    assert!(worst <= 32.0, "total distortion {worst} above a·n = 32");
}

#[test]
fn quantize_rejects_unsupported_combination() {
    let out = run(&[
        "quantize", "--space", "footrule", "--small", "--a", "1", "--delta", "0.5", "--n", "50",
    ]);
    assert!(!out.status.success());
}

#[test]
fn mallows_entropy_uniform_case() {
    let out = stdout_of(&["mallows", "entropy", "--n", "3", "--q", "1"]);
    let total: f64 = out
        .lines()
        .find(|l| l.starts_with("total"))
        .unwrap()
        .split_whitespace()
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((total - 6f64.log2()).abs() < 1e-9);
}

#[test]
fn mallows_pmf_of_reference_is_inverse_normalizer() {
    let out = stdout_of(&["mallows", "pmf", "--q", "0.5", "--perm", "1 2 3 4"]);
    let p: f64 = out.trim().parse().unwrap();
    // normalizer = 1 · (1+q) · (1+q+q²) · (1+q+q²+q³) at q = 1/2.
    let z = 1.5 * 1.75 * 1.875;
    assert!((p - 1.0 / z).abs() < 1e-12, "pmf {p} vs 1/Z {}", 1.0 / z);
}

#[test]
fn mallows_sampling_is_deterministic() {
    let args = ["mallows", "sample", "--n", "6", "--q", "0.5", "--count", "5", "--seed", "7"];
    assert_eq!(stdout_of(&args), stdout_of(&args));
    // And a different seed changes the draw.
    let other = stdout_of(&["mallows", "sample", "--n", "6", "--q", "0.5", "--count", "5", "--seed", "8"]);
    assert_ne!(stdout_of(&args), other);
}

#[test]
fn rdcurve_rate_decreases_with_delta() {
    let out = stdout_of(&[
        "rdcurve", "--space", "tau", "--n", "200",
        "--deltas", "0.1,0.3,0.5,0.7,0.9", "--trials", "20",
    ]);
    let mut lines = out.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("schema_version,space,scheme,"));
    assert!(header.ends_with(",rate"));
    let rates: Vec<f64> = lines
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(rates.len(), 5);
    assert!(rates.windows(2).all(|w| w[1] < w[0]), "rates not decreasing: {rates:?}");
    assert!(rates[0] > 0.8 && rates[4] < 0.2);
}

#[test]
fn rdcurve_accepts_json_config() {
    let config = write_temp(
        "sweep",
        r#"{"experiments":[
            {"space":"tau","n":100,"regime":"moderate","delta":0.5,"trials":10},
            {"space":"invl1","n":100,"regime":"large","b":0.1,"trials":10,"mallows_q":0.8}
        ]}"#,
    );
    let out = stdout_of(&["rdcurve", "--config", config.to_str().unwrap()]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3, "header plus one row per experiment");
    assert!(lines[1].starts_with("1,tau,"));
    assert!(lines[2].starts_with("1,invl1,"));
    std::fs::remove_file(config).ok();
}

#[test]
fn ballsize_matches_cumulative_counts() {
    let out = stdout_of(&["ballsize", "--n", "5", "--metric", "tau", "--dmax", "10"]);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "schema_version,n,metric,d,count");
    let counts: Vec<u64> = lines
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(counts, vec![1, 5, 14, 29, 49, 71, 91, 106, 115, 119, 120]);
}

#[test]
fn moments_csv_reports_reference_values() {
    let out = stdout_of(&["moments", "--metric", "tau", "--n", "20", "--trials", "4000", "--seed", "1"]);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "schema_version,metric,n,trials,seed,emp_mean,emp_var,ref_mean,ref_mean_kind,ref_var,ref_var_kind"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..5], &["1", "tau", "20", "4000", "1"]);
    let emp_mean: f64 = row[5].parse().unwrap();
    let ref_mean: f64 = row[7].parse().unwrap();
    assert_eq!(ref_mean, 95.0); // n(n-1)/4 at n = 20
    assert!((emp_mean - ref_mean).abs() / ref_mean < 0.03);
    assert_eq!(row[8], "exact");
}

#[test]
fn out_flag_writes_file_instead_of_stdout() {
    let target = std::env::temp_dir().join(format!("permcode-out-{}", std::process::id()));
    let out = stdout_of(&[
        "ballsize", "--n", "4", "--metric", "tau", "--dmax", "2",
        "--out", target.to_str().unwrap(),
    ]);
    assert!(out.trim().is_empty(), "stdout should be empty with --out");
    let written = std::fs::read_to_string(&target).unwrap();
    assert!(written.starts_with("schema_version,n,metric,d,count"));
    std::fs::remove_file(target).ok();
}
