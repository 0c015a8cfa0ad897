use std::collections::HashSet;

use super::DatasetError;
use crate::datamodel::{ConceptId, DatasetRows};

/// Keeps the rows whose concept is in `keep`, preserving dataset order.
///
/// For norm datasets, an attribute left without positives is an error.
pub fn restrict_concepts<D: DatasetRows>(
    dataset: &D,
    keep: &HashSet<ConceptId>,
) -> Result<D, DatasetError> {
    let rows: Vec<usize> = dataset
        .concepts()
        .iter()
        .enumerate()
        .filter(|(_, c)| keep.contains(*c))
        .map(|(i, _)| i)
        .collect();
    if rows.is_empty() {
        return Err(DatasetError::EmptyIntersection);
    }
    Ok(dataset.select_rows(&rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::{AttributeId, NormDataset, RatingDataset, RatingScale};

    fn ids(names: &[&str]) -> Vec<ConceptId> {
        names.iter().map(|n| ConceptId::new(n).unwrap()).collect()
    }

    fn ratings() -> RatingDataset {
        RatingDataset::new(
            ids(&["apple", "bear", "car", "drum"]),
            vec![AttributeId::new("sound", "audition").unwrap()],
            vec![0.5, 3.0, 4.5, 6.0],
            RatingScale::default(),
        )
        .unwrap()
    }

    #[test]
    fn keeps_overlap_in_dataset_order() {
        let keep: HashSet<_> = ids(&["drum", "apple", "zebra"]).into_iter().collect();
        let r = restrict_concepts(&ratings(), &keep).unwrap();
        assert_eq!(r.concepts(), ids(&["apple", "drum"]).as_slice());
        assert_eq!(r.column(0), vec![0.5, 6.0]);
    }

    #[test]
    fn superset_is_identity() {
        let keep: HashSet<_> = ids(&["apple", "bear", "car", "drum", "egg"])
            .into_iter()
            .collect();
        assert_eq!(restrict_concepts(&ratings(), &keep).unwrap(), ratings());
    }

    #[test]
    fn disjoint_is_an_error() {
        let keep: HashSet<_> = ids(&["zebra"]).into_iter().collect();
        assert!(matches!(
            restrict_concepts(&ratings(), &keep),
            Err(DatasetError::EmptyIntersection)
        ));
    }

    #[test]
    fn works_for_norms() {
        let d = NormDataset::new(
            ids(&["a", "b", "c"]),
            vec![AttributeId::new("x", "t").unwrap()],
            vec![1, 0, 1],
        )
        .unwrap();
        let keep: HashSet<_> = ids(&["c", "b"]).into_iter().collect();
        let r = restrict_concepts(&d, &keep).unwrap();
        assert_eq!(r.concepts(), ids(&["b", "c"]).as_slice());
        assert_eq!(r.positive_count(0), 1);
    }
}
