use std::path::Path;

use normprobe_core::probe::{
    run_probe_suite, AlignmentMode, LogisticConfig, ProbeData, RunOptions, SelectivityBaseline,
    SplitSpec,
};
use normprobe_core::{RatingScale, Task};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::cli::{BaselineArg, RunArgs, ScaleArgs, TaskArg};
use crate::datasets::{self, DatasetKind};
use crate::error::{CliError, Result};
use crate::output::{appended, write_atomic};
use crate::{nprb, results};

#[derive(Debug, Serialize)]
struct ConfigEcho<'a> {
    embeddings: &'a Path,
    dataset: &'a Path,
    attributes: &'a Path,
    dataset_name: &'a str,
    task: Task,
    folds: usize,
    repeats: usize,
    seed: u64,
    max_iterations: usize,
    gradient_tolerance: f64,
    alignment: AlignmentMode,
    baseline: SelectivityBaseline,
    workers: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    rating_scale: Option<RatingScale>,
}

#[derive(Debug, Serialize)]
struct InputDigest<'a> {
    path: &'a Path,
    bytes: u64,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct SkipEntry<'a> {
    attribute: &'a str,
    attribute_type: &'a str,
    reason: &'a str,
}

#[derive(Debug, Serialize)]
struct Sidecar<'a> {
    tool: &'static str,
    version: &'static str,
    config: ConfigEcho<'a>,
    inputs: Vec<InputDigest<'a>>,
    model: &'a str,
    records: usize,
    attributes_evaluated: usize,
    skipped: Vec<SkipEntry<'a>>,
    dropped_concepts: Vec<&'a str>,
}

fn digest(path: &Path) -> Result<InputDigest<'_>> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let hash = Sha256::digest(&bytes);
    Ok(InputDigest {
        path,
        bytes: bytes.len() as u64,
        sha256: hash.iter().map(|b| format!("{b:02x}")).collect(),
    })
}

pub(crate) fn scale(args: &ScaleArgs) -> RatingScale {
    RatingScale {
        low: args.scale_low,
        high: args.scale_high,
    }
}

pub fn execute(args: &RunArgs) -> Result<()> {
    let options = RunOptions {
        split: SplitSpec::new(args.folds, args.repeats, args.seed)
            .map_err(|e| CliError::Usage(e.to_string()))?,
        logistic: LogisticConfig {
            max_iterations: args.max_iterations,
            gradient_tolerance: args.gradient_tolerance,
        },
        alignment: if args.lenient {
            AlignmentMode::Lenient
        } else {
            AlignmentMode::Strict
        },
        baseline: match args.baseline {
            BaselineArg::ClosedForm => SelectivityBaseline::ClosedForm,
            BaselineArg::MonteCarlo => SelectivityBaseline::MonteCarlo {
                trials: args.baseline_trials,
            },
        },
        workers: args.workers,
    };
    if options.logistic.max_iterations == 0 {
        return Err(CliError::Usage(
            "--max-iterations must be at least 1".into(),
        ));
    }
    let tolerance = options.logistic.gradient_tolerance;
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(CliError::Usage(
            "--gradient-tolerance must be positive".into(),
        ));
    }
    if matches!(
        options.baseline,
        SelectivityBaseline::MonteCarlo { trials: 0 }
    ) {
        return Err(CliError::Usage(
            "--baseline-trials must be at least 1".into(),
        ));
    }

    let kind = datasets::detect_kind(&args.dataset)?;
    let task = match kind {
        DatasetKind::Norms => Task::Classification,
        DatasetKind::Ratings => Task::Regression,
    };
    if let Some(expected) = args.task {
        let expected = match expected {
            TaskArg::Classification => Task::Classification,
            TaskArg::Regression => Task::Regression,
        };
        if expected != task {
            return Err(CliError::Usage(format!(
                "--task {expected} given but {} holds {task} data",
                args.dataset.display()
            )));
        }
    }
    let attributes_path = datasets::companion_path(&args.dataset, args.attributes.as_deref())?;
    let table = nprb::read(&args.embeddings)?;
    let dataset_name = match &args.dataset_name {
        Some(n) => n.clone(),
        None => args
            .dataset
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into()),
    };

    let rating_scale = scale(&args.scale);
    let (norms, ratings);
    let data = match kind {
        DatasetKind::Norms => {
            norms = datasets::read_norms(&args.dataset, &attributes_path)?;
            ProbeData::Norms(&norms)
        }
        DatasetKind::Ratings => {
            ratings = datasets::read_ratings(&args.dataset, &attributes_path, rating_scale)?;
            ProbeData::Ratings(&ratings)
        }
    };
    let alignment = data.alignment(&table);
    let result = run_probe_suite(&table, data, &dataset_name, &options)?;

    write_atomic(&args.output, &results::results_csv(&result))?;
    let sidecar = Sidecar {
        tool: "normprobe",
        version: env!("CARGO_PKG_VERSION"),
        config: ConfigEcho {
            embeddings: &args.embeddings,
            dataset: &args.dataset,
            attributes: &attributes_path,
            dataset_name: &dataset_name,
            task,
            folds: options.split.n_folds,
            repeats: options.split.n_repeats,
            seed: options.split.seed,
            max_iterations: options.logistic.max_iterations,
            gradient_tolerance: options.logistic.gradient_tolerance,
            alignment: options.alignment,
            baseline: options.baseline,
            workers: options.workers,
            rating_scale: (task == Task::Regression).then_some(rating_scale),
        },
        inputs: vec![
            digest(&args.embeddings)?,
            digest(&args.dataset)?,
            digest(&attributes_path)?,
        ],
        model: &result.model_name,
        records: result.records.len(),
        attributes_evaluated: data.attributes().len() - result.skipped.len(),
        skipped: result
            .skipped
            .iter()
            .map(|s| SkipEntry {
                attribute: s.attribute.name(),
                attribute_type: s.attribute.type_label(),
                reason: &s.reason,
            })
            .collect(),
        dropped_concepts: alignment.dataset_only.iter().map(|c| c.as_str()).collect(),
    };
    let mut json = serde_json::to_vec_pretty(&sidecar).expect("sidecar serialises");
    json.push(b'\n');
    write_atomic(&appended(&args.output, ".meta.json"), &json)?;
    log::info!(
        "{} records for {} attributes ({} skipped) written to {}",
        result.records.len(),
        sidecar.attributes_evaluated,
        result.skipped.len(),
        args.output.display()
    );
    Ok(())
}
