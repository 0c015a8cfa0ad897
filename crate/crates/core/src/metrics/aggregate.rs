//! Averaging over folds and attributes, with percentile-bootstrap intervals
//! over the attributes of each type.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::datamodel::{Metric, ProbeResult};
use crate::rng;

/// Mean of `metric` over every (repeat, fold) record of each attribute,
/// keyed by attribute name. Skipped attributes have no records and are
/// therefore absent.
pub fn aggregate_by_attribute(
    result: &ProbeResult,
    metric: Metric,
) -> Result<BTreeMap<String, f64>, MetricsError> {
    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for record in &result.records {
        let value = record
            .metric(metric)
            .ok_or_else(|| MetricsError::UnknownMetric {
                metric: metric.name().to_owned(),
                task: record.task().as_str(),
            })?;
        let entry = sums
            .entry(record.attribute.name().to_owned())
            .or_insert((0.0, 0));
        entry.0 += value;
        entry.1 += 1;
    }
    Ok(sums
        .into_iter()
        .map(|(name, (sum, count))| (name, sum / count as f64))
        .collect())
}

/// Attribute name to type label, for every attribute in the result.
pub fn attribute_types(result: &ProbeResult) -> HashMap<String, String> {
    result
        .records
        .iter()
        .map(|r| {
            (
                r.attribute.name().to_owned(),
                r.attribute.type_label().to_owned(),
            )
        })
        .chain(result.skipped.iter().map(|s| {
            (
                s.attribute.name().to_owned(),
                s.attribute.type_label().to_owned(),
            )
        }))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeAggregate {
    pub type_label: String,
    pub n_attributes: usize,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_bootstrap: usize,
}

/// Linear-interpolated percentile (`q` in [0, 100]) of sorted data.
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty data");
    let rank = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Percentile bootstrap interval for the mean of `scores`.
///
/// Resample `b` draws from stream `b` under `key`, so each resample is
/// reproducible on its own. The interval is widened, if needed, to contain
/// the sample mean.
pub fn bootstrap_mean_ci(scores: &[f64], n_bootstrap: usize, level: f64, key: u64) -> (f64, f64) {
    let m = scores.len();
    let center = mean(scores);
    let mut means: Vec<f64> = (0..n_bootstrap)
        .map(|b| {
            let mut stream = rng::substream(key, b as u64);
            (0..m)
                .map(|_| scores[stream.random_range(0..m)])
                .sum::<f64>()
                / m as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0 * 100.0;
    let low = percentile_sorted(&means, tail).min(center);
    let high = percentile_sorted(&means, 100.0 - tail).max(center);
    (low, high)
}

/// Mean per attribute type with a 95% percentile-bootstrap interval, where
/// the resampling unit is the attribute. Output is sorted by type label.
pub fn aggregate_by_type(
    per_attribute: &BTreeMap<String, f64>,
    types: &HashMap<String, String>,
    n_bootstrap: usize,
    seed: u64,
) -> Result<Vec<TypeAggregate>, MetricsError> {
    if n_bootstrap == 0 {
        return Err(MetricsError::InvalidParameter(
            "n_bootstrap must be at least 1".into(),
        ));
    }
    let mut groups: BTreeMap<&str, Vec<f64>> =
        types.values().map(|t| (t.as_str(), Vec::new())).collect();
    for (name, &score) in per_attribute {
        let t = types
            .get(name)
            .ok_or_else(|| MetricsError::MissingType(name.clone()))?;
        groups
            .get_mut(t.as_str())
            .expect("seeded above")
            .push(score);
    }
    groups
        .into_iter()
        .map(|(type_label, scores)| {
            if scores.is_empty() {
                return Err(MetricsError::EmptyType(type_label.to_owned()));
            }
            let key = rng::mix(seed, rng::tag_of(type_label));
            let (ci_low, ci_high) = bootstrap_mean_ci(&scores, n_bootstrap, 0.95, key);
            Ok(TypeAggregate {
                type_label: type_label.to_owned(),
                n_attributes: scores.len(),
                mean: mean(&scores),
                ci_low,
                ci_high,
                n_bootstrap,
            })
        })
        .collect()
}
