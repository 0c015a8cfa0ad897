//! Results CSV: one row per (attribute, repeat, fold) with full-precision
//! metrics and empty cells for the other task's metrics.

use std::path::Path;

use normprobe_core::{AttributeId, FoldMetrics, FoldRecord, ProbeResult, Task};

use crate::error::{CliError, Result};
use crate::output::exact;

pub const RESULTS_HEADER: [&str; 14] = [
    "model",
    "dataset",
    "task",
    "attribute",
    "attribute_type",
    "repeat",
    "fold",
    "test_positive_rate",
    "precision",
    "recall",
    "f1",
    "f1_selectivity",
    "rmse",
    "mae",
];

pub fn results_csv(result: &ProbeResult) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(RESULTS_HEADER).expect("in-memory write");
    for r in &result.records {
        let q = r.test_positive_rate.map(exact).unwrap_or_default();
        let (p, rc, f1, sel, rmse, mae) = match r.metrics {
            FoldMetrics::Classification {
                precision,
                recall,
                f1,
                f1_selectivity,
            } => (
                exact(precision),
                exact(recall),
                exact(f1),
                exact(f1_selectivity),
                String::new(),
                String::new(),
            ),
            FoldMetrics::Regression { rmse, mae } => (
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                exact(rmse),
                exact(mae),
            ),
        };
        w.write_record([
            result.model_name.as_str(),
            result.dataset_name.as_str(),
            result.task.as_str(),
            r.attribute.name(),
            r.attribute.type_label(),
            &r.repeat_index.to_string(),
            &r.fold_index.to_string(),
            &q,
            &p,
            &rc,
            &f1,
            &sel,
            &rmse,
            &mae,
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Reads a results file back. Skipped attributes are not part of the file
/// (they are listed in the run's sidecar).
pub fn read_results(path: &Path) -> Result<ProbeResult> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CliError::io(path, std::io::Error::other(e)))?;
    let header = reader
        .headers()
        .map_err(|e| CliError::format(path, Some(1), e.to_string()))?
        .clone();
    if header.iter().ne(RESULTS_HEADER) {
        return Err(CliError::format(
            path,
            Some(1),
            format!(
                "header is not the results schema `{}`",
                RESULTS_HEADER.join(",")
            ),
        ));
    }
    let mut identity: Option<(String, String, Task)> = None;
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize);
            CliError::format(path, line, e.to_string())
        })?;
        let line = row.position().map(|p| p.line() as usize);
        let bad = |msg: String| CliError::format(path, line, msg);
        let task: Task = row[2].parse().map_err(|e| bad(format!("{e}")))?;
        let key = (row[0].to_owned(), row[1].to_owned(), task);
        match &identity {
            None => identity = Some(key),
            Some(first) if *first != key => {
                return Err(bad(format!(
                    "row is ({}, {}, {}) but the file started with ({}, {}, {})",
                    key.0,
                    key.1,
                    key.2.as_str(),
                    first.0,
                    first.1,
                    first.2.as_str()
                )))
            }
            Some(_) => {}
        }
        let attribute = AttributeId::new(&row[3], &row[4]).map_err(|e| bad(e.to_string()))?;
        let index = |k: usize| -> Result<usize> {
            row[k].parse().map_err(|_| {
                bad(format!(
                    "{} `{}` is not an index",
                    RESULTS_HEADER[k], &row[k]
                ))
            })
        };
        let number = |k: usize| -> Result<f64> {
            row[k]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    bad(format!(
                        "{} `{}` is not a finite number",
                        RESULTS_HEADER[k], &row[k]
                    ))
                })
        };
        let empty = |ks: &[usize]| -> Result<()> {
            match ks.iter().find(|&&k| !row[k].is_empty()) {
                Some(&k) => Err(bad(format!(
                    "{} must be empty for {} results",
                    RESULTS_HEADER[k],
                    task.as_str()
                ))),
                None => Ok(()),
            }
        };
        let (q, metrics) = match task {
            Task::Classification => {
                empty(&[12, 13])?;
                (
                    Some(number(7)?),
                    FoldMetrics::Classification {
                        precision: number(8)?,
                        recall: number(9)?,
                        f1: number(10)?,
                        f1_selectivity: number(11)?,
                    },
                )
            }
            Task::Regression => {
                empty(&[7, 8, 9, 10, 11])?;
                (
                    None,
                    FoldMetrics::Regression {
                        rmse: number(12)?,
                        mae: number(13)?,
                    },
                )
            }
        };
        let record = FoldRecord::new(attribute, index(5)?, index(6)?, q, metrics)
            .map_err(|e| bad(e.to_string()))?;
        records.push(record);
    }
    let (model_name, dataset_name, task) =
        identity.ok_or_else(|| CliError::format(path, None, "results file has no rows"))?;
    Ok(ProbeResult {
        model_name,
        dataset_name,
        task,
        records,
        skipped: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result() -> ProbeResult {
        let a = AttributeId::new("is red", "colour").unwrap();
        let records = (0..2)
            .map(|fold| {
                FoldRecord::new(
                    a.clone(),
                    0,
                    fold,
                    Some(0.2),
                    FoldMetrics::Classification {
                        precision: 1.0 / 3.0,
                        recall: 0.5,
                        f1: 0.4,
                        f1_selectivity: 0.4 - 0.2,
                    },
                )
                .unwrap()
            })
            .collect();
        ProbeResult {
            model_name: "m, quoted".into(),
            dataset_name: "d".into(),
            task: Task::Classification,
            records,
            skipped: vec![],
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        let r = result();
        std::fs::write(&p, results_csv(&r)).unwrap();
        assert_eq!(read_results(&p).unwrap(), r);
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with(&RESULTS_HEADER.join(",")));
        assert!(text.contains("0.3333333333333333,0.5,0.4,0.2,,"));
    }

    #[test]
    fn mixed_identity_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        let mut text = String::from_utf8(results_csv(&result())).unwrap();
        text.push_str("other,d,classification,is red,colour,1,0,0.2,0.5,0.5,0.5,0.3,,\n");
        std::fs::write(&p, text).unwrap();
        assert!(matches!(
            read_results(&p),
            Err(CliError::Format { line: Some(4), .. })
        ));
    }
}
