use super::DatasetError;
use crate::datamodel::NormDataset;

/// Keeps attributes with at least `min_positive` positive concepts, in their
/// original column order.
pub fn filter_rare_attributes(
    dataset: &NormDataset,
    min_positive: usize,
) -> Result<NormDataset, DatasetError> {
    if min_positive == 0 {
        return Err(DatasetError::InvalidParameter(
            "min_positive must be at least 1".into(),
        ));
    }
    let keep: Vec<usize> = (0..dataset.n_attributes())
        .filter(|&j| dataset.positive_count(j) >= min_positive)
        .collect();
    if keep.is_empty() {
        return Err(DatasetError::EmptyResult(format!(
            "no attribute has at least {min_positive} positive concepts"
        )));
    }
    Ok(dataset.select_columns(&keep)?)
}
