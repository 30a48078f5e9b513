use std::path::Path;
use std::process::{Command, Output};

const SUBCOMMANDS: [&str; 11] = [
    "rank-prob",
    "exhaustive",
    "decay-fit",
    "lcd",
    "ao-extract",
    "round-demo",
    "qgt-audit",
    "qgt-adversarial",
    "kernel-probe",
    "bounds-eval",
    "concentration-audit",
];

fn ranklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ranklab")).args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all = args.to_vec();
    all.extend(["--out-dir", dir.to_str().unwrap()]);
    ranklab(&all)
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    let mut rows = vec![header];
    rows.extend(rdr.records().map(|r| r.unwrap().iter().map(String::from).collect()));
    rows
}

fn col(rows: &[Vec<String>], name: &str) -> usize {
    rows[0].iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn help_lists_every_option_with_default() {
    for sub in SUBCOMMANDS {
        let out = ranklab(&[sub, "-h"]);
        assert!(out.status.success(), "{sub} -h failed");
        let text = String::from_utf8(out.stdout).unwrap();
        let options: Vec<&str> =
            text.lines().map(str::trim_start).filter(|l| l.starts_with("--") && l.contains('<')).collect();
        assert!(options.len() >= 5, "{sub}: parsed only {} options", options.len());
        for line in options {
            assert!(line.contains("[default:") || line.contains("(optional)"), "{sub}: option without default: {line}");
        }
    }
}

#[test]
fn top_level_help_names_all_subcommands() {
    let text = String::from_utf8(ranklab(&["--help"]).stdout).unwrap();
    for sub in SUBCOMMANDS {
        assert!(text.contains(sub), "{sub} missing from help");
    }
}

#[test]
fn unknown_flag_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = run_in(&out_dir, &["rank-prob", "--no-such-flag", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_dir.exists(), "output directory was created");
}

#[test]
fn invalid_parameter_exits_2_and_runtime_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["exhaustive", "--n", "9"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8(out.stderr).unwrap();
    assert!(msg.contains("n <= 4"), "{msg}");
    // A fit with a single usable point cannot be computed.
    let out = run_in(dir.path(), &["decay-fit", "--n", "3", "--k-max", "1", "--trials", "100"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn exhaustive_rank_prob_n2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["rank-prob", "--dist", "rademacher", "--n", "2", "--k-max", "1", "--exhaustive"]);
    assert!(out.status.success());
    let rows = csv_rows(&dir.path().join("rank-prob.csv"));
    assert_eq!(rows[0], ["n", "k", "trials", "successes", "p_hat", "wilson_lo", "wilson_hi"]);
    assert_eq!(rows.len(), 2);
    let p: f64 = rows[1][col(&rows, "p_hat")].parse().unwrap();
    assert_eq!(p, 0.5);
}

#[test]
fn lcd_of_normalized_ones() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["lcd", "--vector", "ones", "--n", "100", "--L", "2", "--alpha", "0.25", "--bound", "20"]);
    assert!(out.status.success());
    let rows = csv_rows(&dir.path().join("lcd.csv"));
    let upper: f64 = rows[1][col(&rows, "upper")].parse().unwrap();
    assert!(upper > 9.0 && upper < 9.5, "upper = {upper}");
}

#[test]
fn summary_echoes_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["exhaustive", "--n", "2"]);
    assert!(out.status.success());
    let s: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("exhaustive.summary.json")).unwrap()).unwrap();
    assert_eq!(s["subcommand"], "exhaustive");
    assert_eq!(s["config"]["n"], 2);
    assert_eq!(s["config"]["dist"], "rademacher");
    assert_eq!(s["config"]["format"], "both");
    assert!(s["seed"].is_u64());
    assert!(s["elapsed_s"].is_f64());
    assert!(s["started"].is_f64());
    assert_eq!(s["outputs"].as_array().unwrap().len(), 3);
    assert!(s["versions"]["ranklab"].is_string());
    // No stray temporaries.
    for e in std::fs::read_dir(dir.path()).unwrap() {
        assert!(!e.unwrap().file_name().to_string_lossy().ends_with(".tmp"));
    }
}

#[test]
fn format_selects_result_files() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_in(dir.path(), &["exhaustive", "--n", "2", "--format", "json"]).status.success());
    assert!(dir.path().join("exhaustive.json").exists());
    assert!(!dir.path().join("exhaustive.csv").exists());
    assert!(dir.path().join("exhaustive.summary.json").exists());
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "# rank-prob settings\ndist = rademacher\nn = 3\nk_max = 2\nexhaustive = true\n").unwrap();
    let out_dir = dir.path().join("out");
    let conf_s = conf.to_str().unwrap();
    assert!(run_in(&out_dir, &["rank-prob", "--config", conf_s]).status.success());
    let rows = csv_rows(&out_dir.join("rank-prob.csv"));
    assert_eq!(rows[1][col(&rows, "n")], "3");
    assert_eq!(rows[1][col(&rows, "trials")], "512");

    assert!(run_in(&out_dir, &["rank-prob", "--config", conf_s, "--n", "2", "--k-max", "1"]).status.success());
    let rows = csv_rows(&out_dir.join("rank-prob.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][col(&rows, "n")], "2");
    assert_eq!(rows[1][col(&rows, "p_hat")], "0.5");
}

#[test]
fn malformed_config_exits_2_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    std::fs::write(&conf, "n = 3\n\nnot a pair\n").unwrap();
    let out = run_in(&dir.path().join("out"), &["rank-prob", "--config", conf.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 3"));
    assert!(!dir.path().join("out").exists());
}

/// Small but non-trivial invocations of every subcommand.
fn reproducibility_cases() -> Vec<Vec<&'static str>> {
    vec![
        vec!["rank-prob", "--n", "5", "--trials", "3000"],
        vec!["exhaustive", "--n", "3", "--dist", "bernoulli(0.5)"],
        vec!["decay-fit", "--n", "4", "--trials", "20000"],
        vec!["lcd", "--vector", "random", "--n", "12"],
        vec!["ao-extract", "--count", "60", "--theta-samples", "64"],
        vec!["round-demo", "--n", "8", "--draws", "500", "--mode", "sparse"],
        vec!["qgt-audit", "--m", "6", "--n", "20", "--samples", "200"],
        vec!["qgt-adversarial", "--m", "6", "--n", "100", "--k", "3", "--matrices", "20"],
        vec!["kernel-probe", "--n", "12", "--k", "2", "--trials", "3", "--samples", "2"],
        vec!["bounds-eval", "--formula", "net", "--n", "20", "--d", "1,2"],
        vec!["concentration-audit", "--n", "6", "--trials", "500"],
    ]
}

#[test]
fn csv_bodies_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cases = reproducibility_cases();
    assert_eq!(cases.len(), SUBCOMMANDS.len());
    for case in cases {
        let stem = case[0];
        let a = dir.path().join(format!("{stem}-a"));
        let b = dir.path().join(format!("{stem}-b"));
        assert!(run_in(&a, &case).status.success(), "{case:?}");
        let mut with_threads = case.clone();
        with_threads.extend(["--threads", "1"]);
        assert!(run_in(&b, &with_threads).status.success(), "{case:?}");
        let ca = std::fs::read(a.join(format!("{stem}.csv"))).unwrap();
        let cb = std::fs::read(b.join(format!("{stem}.csv"))).unwrap();
        assert!(!ca.is_empty());
        assert_eq!(ca, cb, "{stem}: CSV differs between runs");
    }
}
