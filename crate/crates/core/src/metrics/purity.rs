//! Supercategory purity of attribute extensions and its correlation with
//! probe selectivity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{aggregate_by_attribute, pearson_named, MetricsError};
use crate::datamodel::{
    ConceptId, DatasetRows, Metric, NormDataset, ProbeResult, SupercategoryMap,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PurityVariant {
    /// Largest share of the extension inside one supercategory.
    #[default]
    ExtensionShare,
    /// Diagnostic: largest share of a supercategory covered by the
    /// extension, max over c of |extension ∩ c| / |c|.
    CategoryCoverage,
}

pub fn supercategory_purity(
    extension: &[&ConceptId],
    supercategories: &SupercategoryMap,
) -> Result<f64, MetricsError> {
    supercategory_purity_with(extension, supercategories, PurityVariant::ExtensionShare)
}

pub fn supercategory_purity_with(
    extension: &[&ConceptId],
    supercategories: &SupercategoryMap,
    variant: PurityVariant,
) -> Result<f64, MetricsError> {
    if extension.is_empty() {
        return Err(MetricsError::Empty("extension"));
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for c in extension {
        let category = supercategories
            .get(c)
            .ok_or_else(|| MetricsError::UnmappedConcept(c.to_string()))?;
        *counts.entry(category).or_insert(0) += 1;
    }
    let purity = match variant {
        PurityVariant::ExtensionShare => {
            let best = counts.values().copied().max().unwrap_or(0);
            best as f64 / extension.len() as f64
        }
        PurityVariant::CategoryCoverage => {
            let sizes = supercategories.category_sizes();
            counts
                .iter()
                .map(|(cat, &k)| k as f64 / sizes[cat] as f64)
                .fold(0.0, f64::max)
        }
    };
    Ok(purity)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurityRow {
    pub attribute: String,
    pub purity: f64,
    pub score: f64,
}

/// Per-attribute purity next to the mean F1 selectivity, for every evaluated
/// attribute, in attribute-name order.
pub fn purity_table(
    result: &ProbeResult,
    supercategories: &SupercategoryMap,
    norms: &NormDataset,
    variant: PurityVariant,
) -> Result<Vec<PurityRow>, MetricsError> {
    let scores = aggregate_by_attribute(result, Metric::F1Selectivity)?;
    let mut rows = Vec::with_capacity(scores.len());
    for (attribute, score) in scores {
        let j = norms
            .attribute_index(&attribute)
            .ok_or_else(|| MetricsError::UnknownAttribute(attribute.clone()))?;
        let extension = norms.extension(j);
        let purity = supercategory_purity_with(&extension, supercategories, variant)?;
        rows.push(PurityRow {
            attribute,
            purity,
            score,
        });
    }
    Ok(rows)
}

/// Pearson r between per-attribute purity and mean F1 selectivity.
pub fn purity_score_correlation(
    result: &ProbeResult,
    supercategories: &SupercategoryMap,
    norms: &NormDataset,
) -> Result<f64, MetricsError> {
    let rows = purity_table(
        result,
        supercategories,
        norms,
        PurityVariant::ExtensionShare,
    )?;
    let purity: Vec<f64> = rows.iter().map(|r| r.purity).collect();
    let score: Vec<f64> = rows.iter().map(|r| r.score).collect();
    pearson_named(&purity, &score, ("purity", "f1_selectivity"))
}

/// Concepts of `norms` without a supercategory.
pub fn unmapped_concepts<'a>(
    norms: &'a NormDataset,
    supercategories: &SupercategoryMap,
) -> Vec<&'a ConceptId> {
    norms
        .concepts()
        .iter()
        .filter(|c| supercategories.get(c).is_none())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::{AttributeId, FoldMetrics, FoldRecord, Task};

    fn c(name: &str) -> ConceptId {
        ConceptId::new(name).unwrap()
    }

    fn supercats() -> SupercategoryMap {
        SupercategoryMap::new(
            [
                ("apple", "food"),
                ("bread", "food"),
                ("cheese", "food"),
                ("dog", "animal"),
                ("eel", "animal"),
                ("fork", "tool"),
            ]
            .into_iter()
            .map(|(a, b)| (c(a), b.to_string())),
        )
        .unwrap()
    }

    #[test]
    fn direct_formula() {
        let s = supercats();
        let (a, b, d, e) = (c("apple"), c("bread"), c("dog"), c("eel"));
        assert_eq!(supercategory_purity(&[&a, &b], &s).unwrap(), 1.0);
        assert_eq!(supercategory_purity(&[&a, &d], &s).unwrap(), 0.5);
        let p = supercategory_purity(&[&a, &b, &d], &s).unwrap();
        assert!((p - 2.0 / 3.0).abs() < 1e-15);
        // Coverage variant: 2 of 2 animals covered.
        let cov =
            supercategory_purity_with(&[&a, &d, &e], &s, PurityVariant::CategoryCoverage).unwrap();
        assert_eq!(cov, 1.0);
    }

    #[test]
    fn unmapped_and_empty_are_errors() {
        let s = supercats();
        let z = c("zebra");
        assert!(matches!(
            supercategory_purity(&[&z], &s),
            Err(MetricsError::UnmappedConcept(n)) if n == "zebra"
        ));
        assert!(supercategory_purity(&[], &s).is_err());
    }

    proptest::proptest! {
        #[test]
        fn purity_lower_bound(mask in 1u8..64) {
            let s = supercats();
            let all: Vec<ConceptId> = s.iter().map(|(c, _)| c.clone()).collect();
            let ext: Vec<&ConceptId> = all.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, c)| c).collect();
            let present: std::collections::BTreeSet<_> = ext.iter().map(|c| s.get(c).unwrap()).collect();
            let p = supercategory_purity(&ext, &s).unwrap();
            proptest::prop_assert!(p >= 1.0 / present.len() as f64 && p <= 1.0);
        }
    }

    fn norms(columns: &[(&str, &[&str])]) -> NormDataset {
        let names = ["apple", "bread", "cheese", "dog", "eel", "fork"];
        let concepts = names.iter().map(|n| c(n)).collect();
        let cols = columns
            .iter()
            .map(|(a, ext)| {
                (
                    AttributeId::new(a, "t").unwrap(),
                    names.iter().map(|n| ext.contains(n)).collect(),
                )
            })
            .collect();
        NormDataset::from_columns(concepts, cols).unwrap()
    }

    fn result_with(scores: &[(&str, f64)]) -> ProbeResult {
        let records = scores
            .iter()
            .flat_map(|(a, s)| {
                (0..2).map(move |fold| {
                    FoldRecord::new(
                        AttributeId::new(a, "t").unwrap(),
                        0,
                        fold,
                        Some(0.3),
                        FoldMetrics::Classification {
                            precision: 0.5,
                            recall: 0.5,
                            f1: 0.5,
                            f1_selectivity: *s,
                        },
                    )
                    .unwrap()
                })
            })
            .collect();
        ProbeResult {
            model_name: "m".into(),
            dataset_name: "d".into(),
            task: Task::Classification,
            records,
            skipped: vec![],
        }
    }

    #[test]
    fn correlation_with_hand_summed_pearson() {
        // Purities: a = 1, b = 2/3, c = 1/2, d = 1/3.
        let n = norms(&[
            ("a", &["apple", "bread"]),
            ("b", &["apple", "bread", "dog"]),
            ("c", &["apple", "dog"]),
            ("d", &["apple", "dog", "fork"]),
        ]);
        let s = supercats();
        let r = result_with(&[("a", 0.6), ("b", 0.2), ("c", 0.4), ("d", 0.1)]);
        let got = purity_score_correlation(&r, &s, &n).unwrap();
        // x = (1, 2/3, 1/2, 1/3), mean 5/8; y = (.6, .2, .4, .1), mean .325
        // dx = (3/8, 1/24, -1/8, -7/24); dy = (.275, -.125, .075, -.225)
        let dx = [3.0 / 8.0, 1.0 / 24.0, -1.0 / 8.0, -7.0 / 24.0];
        let dy = [0.275, -0.125, 0.075, -0.225];
        let sxy: f64 = dx.iter().zip(&dy).map(|(a, b)| a * b).sum();
        let sxx: f64 = dx.iter().map(|a| a * a).sum();
        let syy: f64 = dy.iter().map(|b| b * b).sum();
        assert!((got - sxy / (sxx * syy).sqrt()).abs() < 1e-12);

        let same = result_with(&[("a", 1.0), ("b", 2.0 / 3.0), ("c", 0.5), ("d", 1.0 / 3.0)]);
        assert!((purity_score_correlation(&same, &s, &n).unwrap() - 1.0).abs() < 1e-12);

        let flat = result_with(&[("a", 0.2), ("b", 0.2), ("c", 0.2), ("d", 0.2)]);
        assert!(matches!(
            purity_score_correlation(&flat, &s, &n),
            Err(MetricsError::ConstantVector(v)) if v == "f1_selectivity"
        ));
    }
}
