use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::DatasetError;
use crate::datamodel::{DatasetRows, NormDataset, RatingDataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinarizeRule {
    #[default]
    StrictlyAboveMedian,
    AtOrAboveMedian,
}

impl BinarizeRule {
    fn positive(self, rating: f64, median: f64) -> bool {
        match self {
            BinarizeRule::StrictlyAboveMedian => rating > median,
            BinarizeRule::AtOrAboveMedian => rating >= median,
        }
    }
}

impl FromStr for BinarizeRule {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strictly_above_median" | "strict" => Ok(BinarizeRule::StrictlyAboveMedian),
            "at_or_above_median" | "at-or-above" => Ok(BinarizeRule::AtOrAboveMedian),
            other => Err(DatasetError::InvalidParameter(format!(
                "unknown binarisation rule `{other}`"
            ))),
        }
    }
}

/// Middle value, or the mean of the two middle values for even lengths.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty column");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    }
}

/// Thresholds every attribute at its own median rating.
pub fn binarize_ratings(
    ratings: &RatingDataset,
    rule: BinarizeRule,
) -> Result<NormDataset, DatasetError> {
    let mut columns = Vec::with_capacity(ratings.n_attributes());
    for (j, attr) in ratings.attributes().iter().enumerate() {
        let column = ratings.column(j);
        if column.iter().all(|&v| v == column[0]) {
            return Err(DatasetError::ConstantColumn(attr.name().to_owned()));
        }
        let m = median(&column);
        let labels = column.iter().map(|&v| rule.positive(v, m)).collect();
        columns.push((attr.clone(), labels));
    }
    Ok(NormDataset::from_columns(
        ratings.concepts().to_vec(),
        columns,
    )?)
}
