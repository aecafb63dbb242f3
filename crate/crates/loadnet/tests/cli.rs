use std::fs;
use std::path::Path;
use std::process::Command;

use loadnet::cli::{self, InjectionFile, ModelBundle};
use loadnet::io;
use loadnet::report::read_provenance;
use loadnet_core::ingest::ContinuityReport;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_loadnet"))
}

fn run(args: &[&str]) -> i32 {
    cli::main(std::iter::once("loadnet").chain(args.iter().copied()))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn no_arguments_prints_usage_and_exits_2() {
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn unknown_subcommand_or_flag_exits_2() {
    assert_eq!(
        bin().arg("frobnicate").output().unwrap().status.code(),
        Some(2)
    );
    assert_eq!(
        bin()
            .args(["sweep", "--speed", "3"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn data_errors_exit_1_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    let out = bin()
        .args(["train", "--data", s(&missing), "--out", "m.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.trim_end().lines().count(), 1, "{stderr}");
    assert!(stderr.contains("missing.csv"));
}

#[test]
fn ingest_report_matches_the_injection_log() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d");
    let r = dir.path().join("r.json");
    assert_eq!(
        run(&[
            "synth",
            "--out",
            s(&d),
            "--seed",
            "3",
            "--gap-rate",
            "0.01",
            "--outages",
            "2"
        ]),
        0
    );
    assert_eq!(run(&["ingest", "--in", s(&d), "--report", s(&r)]), 0);

    let report: ContinuityReport = io::read_json(&r).unwrap();
    let injected: InjectionFile = io::read_json(&d.join(cli::INJECTIONS_FILE)).unwrap();
    assert_eq!(report.missing_hours(), injected.log.missing_hours());
    let mut hits = report.sentinel_hits.clone();
    hits.sort();
    let mut logged = injected.log.sentinels.clone();
    logged.sort();
    assert_eq!(hits, logged);
    assert!(!report.block_gaps.is_empty());
}

/// Synthesizes two clean years and ingests them; returns the series path and
/// the holiday path.
fn prepared(dir: &Path) -> (String, String) {
    let d = dir.join("d");
    let clean = dir.join("clean.csv");
    assert_eq!(run(&["synth", "--out", s(&d)]), 0);
    assert_eq!(run(&["ingest", "--in", s(&d), "--out", s(&clean)]), 0);
    (
        s(&clean).to_string(),
        s(&d.join(cli::HOLIDAYS_FILE)).to_string(),
    )
}

#[test]
fn weekly_sweep_has_rows_for_lags_zero_to_five() {
    let dir = tempfile::tempdir().unwrap();
    let (data, holidays) = prepared(dir.path());
    let out = dir.path().join("sweep");
    let args = [
        "sweep",
        "--data",
        &data,
        "--holidays",
        &holidays,
        "--scale",
        "weekly",
        "--repeats",
        "2",
        "--epochs",
        "100",
        "--out",
        s(&out),
    ];
    assert_eq!(run(&args), 0);
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], loadnet::report::SWEEP_HEADER);
    let on: Vec<&str> = body[1..]
        .iter()
        .filter(|l| l.split(',').nth(1) == Some("true"))
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(on, ["0", "1", "2", "3", "4", "5"]);
    assert_eq!(read_provenance(&csv)["scale"], "weekly");
}

#[test]
fn identical_invocations_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let (data, holidays) = prepared(dir.path());
    let out = dir.path().join("ablate");
    let args = [
        "ablate",
        "--data",
        &data,
        "--holidays",
        &holidays,
        "--scale",
        "monthly",
        "--lags",
        "2",
        "--repeats",
        "3",
        "--epochs",
        "50",
        "--out",
        s(&out),
    ];
    let mut snapshots = Vec::new();
    for _ in 0..2 {
        assert_eq!(run(&args), 0);
        snapshots.push((
            fs::read(out.join("ablation.csv")).unwrap(),
            fs::read(out.join("ablation.json")).unwrap(),
        ));
    }
    assert_eq!(snapshots[0], snapshots[1]);

    // thread count changes nothing but the recorded `jobs` value
    let parallel = dir.path().join("parallel");
    let mut wide = args.to_vec();
    let out_at = wide.len() - 1;
    wide[out_at] = s(&parallel);
    wide.extend(["--jobs", "4"]);
    assert_eq!(run(&wide), 0);
    let strip = |bytes: &[u8]| -> Vec<String> {
        String::from_utf8_lossy(bytes)
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(String::from)
            .collect()
    };
    assert_eq!(
        strip(&snapshots[0].0),
        strip(&fs::read(parallel.join("ablation.csv")).unwrap())
    );
}

#[test]
fn train_then_predict() {
    let dir = tempfile::tempdir().unwrap();
    let (data, holidays) = prepared(dir.path());
    let model = dir.path().join("model.json");
    let preds = dir.path().join("pred.csv");
    let args = [
        "train",
        "--data",
        &data,
        "--holidays",
        &holidays,
        "--epochs",
        "200",
        "--out",
        s(&model),
    ];
    assert_eq!(run(&args), 0);
    let bundle: ModelBundle = io::read_json(&model).unwrap();
    assert_eq!(bundle.feature_names.len(), 15);
    assert_eq!(bundle.network.topology().to_string(), "15-15-1");
    assert!(bundle.epochs_run <= 200);

    assert_eq!(
        run(&[
            "predict",
            "--model",
            s(&model),
            "--data",
            &data,
            "--holidays",
            &holidays,
            "--out",
            s(&preds)
        ]),
        0
    );
    let csv = fs::read_to_string(&preds).unwrap();
    let rows: Vec<&str> = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect();
    assert_eq!(rows.len(), 731 - 7);
    assert_eq!(rows[0].split(',').next(), Some("2016-01-08T00:00"));
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let (data, holidays) = prepared(dir.path());
    let conf = dir.path().join("run.conf");
    let text = format!(
        "data = {data}\nholidays = {holidays}\nscale = monthly\nlags = 1\nrepeats = 1\nepochs = 20\nout = from-config\n"
    );
    io::write_text(&conf, &text).unwrap();
    let out = dir.path().join("hidden");
    let args = [
        "search-hidden",
        "--config",
        s(&conf),
        "--lags",
        "2",
        "--candidates",
        "2,3",
        "--out",
        s(&out),
    ];
    assert_eq!(run(&args), 0);
    let csv = fs::read_to_string(out.join("hidden.csv")).unwrap();
    let config = read_provenance(&csv);
    assert_eq!(config["lags"], "2");
    assert_eq!(config["scale"], "monthly");
    assert_eq!(config["out"], s(&out));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 3);
}
