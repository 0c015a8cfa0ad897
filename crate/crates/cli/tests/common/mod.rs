#![allow(dead_code)]

pub mod oracle;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use normprobe_core::{Metric, ProbeResult};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn normprobe<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_normprobe"))
        .args(args)
        .env_remove("NORMPROBE_WORKERS")
        .output()
        .expect("binary runs")
}

/// Runs the binary and panics with its stderr unless it exits 0.
pub fn normprobe_ok<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let out = normprobe(args);
    assert!(
        out.status.success(),
        "normprobe failed with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

/// `normprobe run` on the planted norms with the given embeddings.
pub fn run_planted(model: &str, output: &Path, extra: &[&str]) -> Output {
    let mut args: Vec<String> = vec![
        "run".into(),
        "--embeddings".into(),
        fixture(model).display().to_string(),
        "--dataset".into(),
        fixture("planted.csv").display().to_string(),
        "--output".into(),
        output.display().to_string(),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    normprobe_ok(args)
}

/// Mean over attributes of the fold-averaged metric.
pub fn model_mean(result: &ProbeResult, metric: Metric) -> f64 {
    let per = normprobe_core::metrics::aggregate_by_attribute(result, metric).expect("aggregate");
    per.values().sum::<f64>() / per.len() as f64
}

/// Parses a CSV report into a header and rows.
pub fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader
        .headers()
        .expect("header")
        .iter()
        .map(str::to_owned)
        .collect();
    let rows = reader
        .records()
        .map(|r| r.expect("row").iter().map(str::to_owned).collect())
        .collect();
    (header, rows)
}
