use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use normprobe_core::metrics::{
    aggregate_by_attribute, aggregate_by_type, model_correlations, purity_table, rank_models,
    PurityVariant,
};
use normprobe_core::{Metric, ProbeResult, Task};

use crate::cli::{PurityVariantArg, ReportArgs, ReportMode};
use crate::datasets;
use crate::error::{CliError, Result};
use crate::output::{sig6, write_atomic};
use crate::results::read_results;

/// A rendered CSV report.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

fn metric_for(args: &ReportArgs, task: Task) -> Result<Metric> {
    match &args.metric {
        None => Ok(task.headline_metric()),
        Some(name) => {
            let m: Metric = name
                .parse()
                .map_err(|_| CliError::Usage(format!("unknown metric `{name}`")))?;
            if m.task() != task {
                return Err(CliError::Usage(format!(
                    "metric `{name}` does not apply to {task} results"
                )));
            }
            Ok(m)
        }
    }
}

fn metrics_of(task: Task) -> &'static [Metric] {
    match task {
        Task::Classification => &Metric::CLASSIFICATION,
        Task::Regression => &Metric::REGRESSION,
    }
}

fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values
        .into_iter()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

/// Mean over attributes of the per-attribute (fold-averaged) metric.
pub fn model_mean(result: &ProbeResult, metric: Metric) -> Result<f64> {
    let per_attribute = aggregate_by_attribute(result, metric)?;
    Ok(mean(per_attribute.values().copied()))
}

fn first_appearance<'a>(items: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut seen = BTreeSet::new();
    items.filter(|s| seen.insert(*s)).collect()
}

fn check_unique(results: &[ProbeResult]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for r in results {
        if !seen.insert((&r.model_name, &r.dataset_name)) {
            return Err(CliError::Usage(format!(
                "more than one results file for model `{}` on dataset `{}`",
                r.model_name, r.dataset_name
            )));
        }
    }
    Ok(())
}

/// One row per model; for each dataset a block with every metric of its
/// task, averaged over attributes.
pub fn summary(results: &[ProbeResult]) -> Result<Table> {
    check_unique(results)?;
    let models = first_appearance(results.iter().map(|r| r.model_name.as_str()));
    let mut dataset_tasks: Vec<(&str, Task)> = Vec::new();
    for r in results {
        match dataset_tasks.iter().find(|(d, _)| *d == r.dataset_name) {
            Some((_, t)) if *t != r.task => {
                return Err(CliError::MismatchedAttributeAxes(format!(
                    "dataset `{}` appears with both tasks",
                    r.dataset_name
                )))
            }
            Some(_) => {}
            None => dataset_tasks.push((&r.dataset_name, r.task)),
        }
    }
    let mut header = vec!["model".to_owned()];
    for (dataset, task) in &dataset_tasks {
        header.extend(
            metrics_of(*task)
                .iter()
                .map(|m| format!("{dataset}:{}", m.name())),
        );
    }
    let mut table = Table::new(header);
    for model in models {
        let mut row = vec![model.to_owned()];
        for (dataset, task) in &dataset_tasks {
            let found = results
                .iter()
                .find(|r| r.model_name == model && r.dataset_name == *dataset);
            for &metric in metrics_of(*task) {
                row.push(match found {
                    Some(r) => sig6(model_mean(r, metric)?),
                    None => String::new(),
                });
            }
        }
        table.rows.push(row);
    }
    Ok(table)
}

pub fn by_type(results: &[ProbeResult], args: &ReportArgs) -> Result<Table> {
    if args.n_bootstrap == 0 {
        return Err(CliError::Usage("--n-bootstrap must be at least 1".into()));
    }
    let mut table = Table::new([
        "model",
        "dataset",
        "metric",
        "type",
        "n_attributes",
        "mean",
        "ci_low",
        "ci_high",
    ]);
    for r in results {
        let metric = metric_for(args, r.task)?;
        let per_attribute = aggregate_by_attribute(r, metric)?;
        let types: HashMap<String, String> = r
            .records
            .iter()
            .map(|rec| {
                (
                    rec.attribute.name().to_owned(),
                    rec.attribute.type_label().to_owned(),
                )
            })
            .collect();
        for agg in aggregate_by_type(&per_attribute, &types, args.n_bootstrap, args.seed)? {
            table.rows.push(vec![
                r.model_name.clone(),
                r.dataset_name.clone(),
                metric.name().to_owned(),
                agg.type_label,
                agg.n_attributes.to_string(),
                sig6(agg.mean),
                sig6(agg.ci_low),
                sig6(agg.ci_high),
            ]);
        }
    }
    Ok(table)
}

pub fn correlate(results: &[ProbeResult], args: &ReportArgs) -> Result<Table> {
    check_unique(results)?;
    let first = &results[0];
    for r in results {
        if r.dataset_name != first.dataset_name || r.task != first.task {
            return Err(CliError::MismatchedAttributeAxes(format!(
                "`{}` is on dataset `{}` but `{}` is on `{}`",
                r.model_name, r.dataset_name, first.model_name, first.dataset_name
            )));
        }
    }
    let metric = metric_for(args, first.task)?;
    let per_model: Vec<(String, BTreeMap<String, f64>)> = results
        .iter()
        .map(|r| Ok((r.model_name.clone(), aggregate_by_attribute(r, metric)?)))
        .collect::<Result<_>>()?;
    let axis: Vec<&String> = per_model[0].1.keys().collect();
    for (model, scores) in &per_model[1..] {
        if !scores.keys().eq(axis.iter().copied()) {
            let theirs: BTreeSet<&String> = scores.keys().collect();
            let ours: BTreeSet<&String> = axis.iter().copied().collect();
            let example = ours
                .symmetric_difference(&theirs)
                .next()
                .map(|a| a.as_str())
                .unwrap_or("");
            return Err(CliError::MismatchedAttributeAxes(format!(
                "`{model}` and `{}` were scored on different attributes, e.g. `{example}`",
                per_model[0].0
            )));
        }
    }
    let vectors: Vec<(String, Vec<f64>)> = per_model
        .into_iter()
        .map(|(m, s)| (m, s.into_values().collect()))
        .collect();
    let matrix = model_correlations(&vectors)?;
    let mut table =
        Table::new(std::iter::once("model".to_owned()).chain(matrix.model_names.iter().cloned()));
    for (name, row) in matrix.model_names.iter().zip(&matrix.values) {
        table.rows.push(
            std::iter::once(name.clone())
                .chain(row.iter().map(|&v| sig6(v)))
                .collect(),
        );
    }
    Ok(table)
}

pub fn rank(results: &[ProbeResult], args: &ReportArgs) -> Result<Table> {
    check_unique(results)?;
    let mut table = Table::new(["dataset", "metric", "rank", "model", "value"]);
    for dataset in first_appearance(results.iter().map(|r| r.dataset_name.as_str())) {
        let group: Vec<&ProbeResult> = results
            .iter()
            .filter(|r| r.dataset_name == dataset)
            .collect();
        let metric = metric_for(args, group[0].task)?;
        let scores = group
            .iter()
            .map(|r| {
                if r.task != group[0].task {
                    return Err(CliError::MismatchedAttributeAxes(format!(
                        "dataset `{dataset}` appears with both tasks"
                    )));
                }
                Ok((r.model_name.clone(), model_mean(r, metric)?))
            })
            .collect::<Result<Vec<_>>>()?;
        for ranked in rank_models(&scores, metric.higher_is_better()) {
            table.rows.push(vec![
                dataset.to_owned(),
                metric.name().to_owned(),
                ranked.rank.to_string(),
                ranked.model,
                sig6(ranked.value),
            ]);
        }
    }
    Ok(table)
}

pub fn purity(results: &[ProbeResult], args: &ReportArgs) -> Result<(Table, Table)> {
    let norms_path = args
        .norms
        .as_deref()
        .ok_or_else(|| CliError::Usage("purity needs --norms".into()))?;
    let supercategories_path = args
        .supercategories
        .as_deref()
        .ok_or_else(|| CliError::Usage("purity needs --supercategories".into()))?;
    let attributes_path = datasets::companion_path(norms_path, args.attributes.as_deref())?;
    let norms = datasets::read_norms(norms_path, &attributes_path)?;
    let supercategories = datasets::read_supercategories(supercategories_path)?;
    let variant = match args.variant {
        PurityVariantArg::ExtensionShare => PurityVariant::ExtensionShare,
        PurityVariantArg::CategoryCoverage => PurityVariant::CategoryCoverage,
    };
    let mut summary = Table::new(["model", "dataset", "n_attributes", "purity_correlation"]);
    let mut detail = Table::new(["model", "dataset", "attribute", "purity", "f1_selectivity"]);
    for r in results {
        if r.task != Task::Classification {
            return Err(CliError::Usage(format!(
                "purity needs classification results; `{}` is {}",
                r.model_name, r.task
            )));
        }
        let rows = purity_table(r, &supercategories, &norms, variant)?;
        let x: Vec<f64> = rows.iter().map(|p| p.purity).collect();
        let y: Vec<f64> = rows.iter().map(|p| p.score).collect();
        let corr = normprobe_core::metrics::pearson_named(&x, &y, ("purity", "f1_selectivity"))?;
        summary.rows.push(vec![
            r.model_name.clone(),
            r.dataset_name.clone(),
            rows.len().to_string(),
            sig6(corr),
        ]);
        for p in rows {
            detail.rows.push(vec![
                r.model_name.clone(),
                r.dataset_name.clone(),
                p.attribute,
                sig6(p.purity),
                sig6(p.score),
            ]);
        }
    }
    Ok((summary, detail))
}

fn emit(table: &Table, output: Option<&Path>) -> Result<()> {
    let bytes = table.to_csv();
    match output {
        Some(p) => write_atomic(p, &bytes),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

pub fn execute(args: &ReportArgs) -> Result<()> {
    let results = args
        .results
        .iter()
        .map(|p| read_results(p))
        .collect::<Result<Vec<_>>>()?;
    let table = match args.mode {
        ReportMode::Summary => summary(&results)?,
        ReportMode::ByType => by_type(&results, args)?,
        ReportMode::Correlate => correlate(&results, args)?,
        ReportMode::Rank => rank(&results, args)?,
        ReportMode::Purity => {
            let (summary, detail) = purity(&results, args)?;
            if let Some(p) = &args.per_attribute {
                write_atomic(p, &detail.to_csv())?;
            }
            summary
        }
    };
    emit(&table, args.output.as_deref())
}
