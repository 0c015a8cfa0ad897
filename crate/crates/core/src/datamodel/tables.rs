use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{AttributeId, ConceptId, DataError};

/// Dense per-concept vectors produced by one model.
///
/// Rows keep their insertion order; lookups by concept go through an index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EmbeddingTableRepr", into = "EmbeddingTableRepr")]
pub struct EmbeddingTable {
    model_name: String,
    dim: usize,
    ids: Vec<ConceptId>,
    values: Vec<f64>,
    index: HashMap<ConceptId, usize>,
}

#[derive(Clone, Serialize, Deserialize)]
struct EmbeddingTableRepr {
    model_name: String,
    dim: usize,
    rows: Vec<(ConceptId, Vec<f64>)>,
}

impl EmbeddingTable {
    pub fn new(
        model_name: impl Into<String>,
        dim: usize,
        rows: Vec<(ConceptId, Vec<f64>)>,
    ) -> Result<Self, DataError> {
        let mut ids = Vec::with_capacity(rows.len());
        let mut values = Vec::with_capacity(rows.len() * dim);
        for (id, row) in rows {
            if row.len() != dim {
                return Err(DataError::RowLength {
                    row: id.to_string(),
                    expected: dim,
                    found: row.len(),
                });
            }
            ids.push(id);
            values.extend(row);
        }
        Self::from_flat(model_name, dim, ids, values)
    }

    /// Builds a table from a row-major buffer of `ids.len() * dim` values.
    pub fn from_flat(
        model_name: impl Into<String>,
        dim: usize,
        ids: Vec<ConceptId>,
        values: Vec<f64>,
    ) -> Result<Self, DataError> {
        if dim == 0 {
            return Err(DataError::ZeroDimension);
        }
        if ids.is_empty() {
            return Err(DataError::EmptyTable);
        }
        if values.len() != ids.len() * dim {
            return Err(DataError::Shape {
                field: "embedding values",
                expected: ids.len() * dim,
                found: values.len(),
            });
        }
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(DataError::DuplicateConcept(id.to_string()));
            }
            let row = &values[i * dim..(i + 1) * dim];
            if let Some(col) = row.iter().position(|v| !v.is_finite()) {
                return Err(DataError::NonFinite {
                    field: "embedding",
                    row: id.to_string(),
                    col,
                });
            }
        }
        Ok(EmbeddingTable {
            model_name: model_name.into(),
            dim,
            ids,
            values,
            index,
        })
    }

    pub fn model_name(&self) -> &str {
        &self.model_name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[ConceptId] {
        &self.ids
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get(&self, id: &ConceptId) -> Option<&[f64]> {
        self.index.get(id).map(|&i| self.row(i))
    }

    pub fn contains(&self, id: &ConceptId) -> bool {
        self.index.contains_key(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ConceptId, &[f64])> {
        self.ids.iter().enumerate().map(|(i, id)| (id, self.row(i)))
    }
}

impl TryFrom<EmbeddingTableRepr> for EmbeddingTable {
    type Error = DataError;

    fn try_from(repr: EmbeddingTableRepr) -> Result<Self, Self::Error> {
        EmbeddingTable::new(repr.model_name, repr.dim, repr.rows)
    }
}

impl From<EmbeddingTable> for EmbeddingTableRepr {
    fn from(table: EmbeddingTable) -> Self {
        let rows = table
            .iter()
            .map(|(id, row)| (id.clone(), row.to_vec()))
            .collect();
        EmbeddingTableRepr {
            model_name: table.model_name,
            dim: table.dim,
            rows,
        }
    }
}

/// Row access shared by the two dataset kinds.
pub trait DatasetRows: Sized {
    fn concepts(&self) -> &[ConceptId];
    fn attributes(&self) -> &[AttributeId];
    /// A new dataset holding only the given rows, in the given order.
    fn select_rows(&self, rows: &[usize]) -> Result<Self, DataError>;
}

fn check_unique_ids(concepts: &[ConceptId], attributes: &[AttributeId]) -> Result<(), DataError> {
    let mut seen = HashSet::with_capacity(concepts.len());
    for c in concepts {
        if !seen.insert(c) {
            return Err(DataError::DuplicateConcept(c.to_string()));
        }
    }
    let mut seen = HashSet::with_capacity(attributes.len());
    for a in attributes {
        if !seen.insert(a.name()) {
            return Err(DataError::DuplicateAttribute(a.name().to_owned()));
        }
    }
    if concepts.is_empty() {
        return Err(DataError::EmptyDataset { field: "concepts" });
    }
    if attributes.is_empty() {
        return Err(DataError::EmptyDataset {
            field: "attributes",
        });
    }
    Ok(())
}

/// Dense binary concept x attribute matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "NormDatasetRepr", into = "NormDatasetRepr")]
pub struct NormDataset {
    concepts: Vec<ConceptId>,
    attributes: Vec<AttributeId>,
    labels: Vec<u8>,
    positive_counts: Vec<usize>,
}

#[derive(Clone, Serialize, Deserialize)]
struct NormDatasetRepr {
    concepts: Vec<ConceptId>,
    attributes: Vec<AttributeId>,
    labels: Vec<u8>,
}

impl NormDataset {
    /// `labels` is row-major with one row per concept.
    pub fn new(
        concepts: Vec<ConceptId>,
        attributes: Vec<AttributeId>,
        labels: Vec<u8>,
    ) -> Result<Self, DataError> {
        check_unique_ids(&concepts, &attributes)?;
        let width = attributes.len();
        if labels.len() != concepts.len() * width {
            return Err(DataError::Shape {
                field: "labels",
                expected: concepts.len() * width,
                found: labels.len(),
            });
        }
        let mut positive_counts = vec![0usize; width];
        for (i, row) in labels.chunks_exact(width).enumerate() {
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => positive_counts[j] += 1,
                    other => {
                        return Err(DataError::InvalidLabel {
                            concept: concepts[i].to_string(),
                            attribute: attributes[j].name().to_owned(),
                            value: other,
                        })
                    }
                }
            }
        }
        if let Some(j) = positive_counts.iter().position(|&c| c == 0) {
            return Err(DataError::NoPositives {
                attribute: attributes[j].name().to_owned(),
            });
        }
        Ok(NormDataset {
            concepts,
            attributes,
            labels,
            positive_counts,
        })
    }

    /// Builds a dataset from per-attribute boolean columns.
    pub fn from_columns(
        concepts: Vec<ConceptId>,
        columns: Vec<(AttributeId, Vec<bool>)>,
    ) -> Result<Self, DataError> {
        let n = concepts.len();
        let width = columns.len();
        let mut labels = vec![0u8; n * width];
        let mut attributes = Vec::with_capacity(width);
        for (j, (attr, col)) in columns.into_iter().enumerate() {
            if col.len() != n {
                return Err(DataError::RowLength {
                    row: attr.name().to_owned(),
                    expected: n,
                    found: col.len(),
                });
            }
            for (i, v) in col.into_iter().enumerate() {
                labels[i * width + j] = u8::from(v);
            }
            attributes.push(attr);
        }
        NormDataset::new(concepts, attributes, labels)
    }

    pub fn n_concepts(&self) -> usize {
        self.concepts.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn label(&self, concept: usize, attribute: usize) -> bool {
        self.labels[concept * self.attributes.len() + attribute] == 1
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn column(&self, attribute: usize) -> Vec<bool> {
        (0..self.concepts.len())
            .map(|i| self.label(i, attribute))
            .collect()
    }

    pub fn positive_count(&self, attribute: usize) -> usize {
        self.positive_counts[attribute]
    }

    pub fn positive_counts(&self) -> &[usize] {
        &self.positive_counts
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name() == name)
    }

    /// Concepts for which the attribute is positive.
    pub fn extension(&self, attribute: usize) -> Vec<&ConceptId> {
        self.concepts
            .iter()
            .enumerate()
            .filter(|&(i, _)| self.label(i, attribute))
            .map(|(_, c)| c)
            .collect()
    }

    /// Distinct attribute type labels, sorted.
    pub fn type_labels(&self) -> BTreeSet<&str> {
        self.attributes.iter().map(|a| a.type_label()).collect()
    }

    /// A new dataset holding only the given columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> Result<Self, DataError> {
        let cols = columns
            .iter()
            .map(|&j| (self.attributes[j].clone(), self.column(j)))
            .collect();
        NormDataset::from_columns(self.concepts.clone(), cols)
    }
}

impl DatasetRows for NormDataset {
    fn concepts(&self) -> &[ConceptId] {
        &self.concepts
    }

    fn attributes(&self) -> &[AttributeId] {
        &self.attributes
    }

    /// Fails with `NoPositives` when a column loses all of its positives.
    fn select_rows(&self, rows: &[usize]) -> Result<Self, DataError> {
        let width = self.attributes.len();
        let mut labels = Vec::with_capacity(rows.len() * width);
        for &i in rows {
            labels.extend_from_slice(&self.labels[i * width..(i + 1) * width]);
        }
        let concepts = rows.iter().map(|&i| self.concepts[i].clone()).collect();
        NormDataset::new(concepts, self.attributes.clone(), labels)
    }
}

impl TryFrom<NormDatasetRepr> for NormDataset {
    type Error = DataError;

    fn try_from(repr: NormDatasetRepr) -> Result<Self, Self::Error> {
        NormDataset::new(repr.concepts, repr.attributes, repr.labels)
    }
}

impl From<NormDataset> for NormDatasetRepr {
    fn from(d: NormDataset) -> Self {
        NormDatasetRepr {
            concepts: d.concepts,
            attributes: d.attributes,
            labels: d.labels,
        }
    }
}

/// Inclusive bounds of a rating scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatingScale {
    pub low: f64,
    pub high: f64,
}

impl Default for RatingScale {
    /// Seven-level scale encoded as 0..=6.
    fn default() -> Self {
        RatingScale {
            low: 0.0,
            high: 6.0,
        }
    }
}

impl RatingScale {
    pub fn contains(&self, v: f64) -> bool {
        v >= self.low && v <= self.high
    }
}

/// Dense concept x attribute matrix of mean participant ratings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RatingDatasetRepr", into = "RatingDatasetRepr")]
pub struct RatingDataset {
    concepts: Vec<ConceptId>,
    attributes: Vec<AttributeId>,
    ratings: Vec<f64>,
    scale: RatingScale,
}

#[derive(Clone, Serialize, Deserialize)]
struct RatingDatasetRepr {
    concepts: Vec<ConceptId>,
    attributes: Vec<AttributeId>,
    ratings: Vec<f64>,
    scale: RatingScale,
}

impl RatingDataset {
    pub fn new(
        concepts: Vec<ConceptId>,
        attributes: Vec<AttributeId>,
        ratings: Vec<f64>,
        scale: RatingScale,
    ) -> Result<Self, DataError> {
        check_unique_ids(&concepts, &attributes)?;
        if !(scale.low.is_finite() && scale.high.is_finite() && scale.low < scale.high) {
            return Err(DataError::InvalidScale {
                low: scale.low,
                high: scale.high,
            });
        }
        let width = attributes.len();
        if ratings.len() != concepts.len() * width {
            return Err(DataError::Shape {
                field: "ratings",
                expected: concepts.len() * width,
                found: ratings.len(),
            });
        }
        for (k, &v) in ratings.iter().enumerate() {
            let (i, j) = (k / width, k % width);
            if !v.is_finite() {
                return Err(DataError::NonFinite {
                    field: "rating",
                    row: concepts[i].to_string(),
                    col: j,
                });
            }
            if !scale.contains(v) {
                return Err(DataError::RatingOutOfRange {
                    concept: concepts[i].to_string(),
                    attribute: attributes[j].name().to_owned(),
                    value: v,
                    low: scale.low,
                    high: scale.high,
                });
            }
        }
        Ok(RatingDataset {
            concepts,
            attributes,
            ratings,
            scale,
        })
    }

    pub fn n_concepts(&self) -> usize {
        self.concepts.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn scale(&self) -> RatingScale {
        self.scale
    }

    pub fn rating(&self, concept: usize, attribute: usize) -> f64 {
        self.ratings[concept * self.attributes.len() + attribute]
    }

    pub fn ratings(&self) -> &[f64] {
        &self.ratings
    }

    pub fn column(&self, attribute: usize) -> Vec<f64> {
        (0..self.concepts.len())
            .map(|i| self.rating(i, attribute))
            .collect()
    }
}

impl DatasetRows for RatingDataset {
    fn concepts(&self) -> &[ConceptId] {
        &self.concepts
    }

    fn attributes(&self) -> &[AttributeId] {
        &self.attributes
    }

    fn select_rows(&self, rows: &[usize]) -> Result<Self, DataError> {
        let width = self.attributes.len();
        let mut ratings = Vec::with_capacity(rows.len() * width);
        for &i in rows {
            ratings.extend_from_slice(&self.ratings[i * width..(i + 1) * width]);
        }
        let concepts = rows.iter().map(|&i| self.concepts[i].clone()).collect();
        RatingDataset::new(concepts, self.attributes.clone(), ratings, self.scale)
    }
}

impl TryFrom<RatingDatasetRepr> for RatingDataset {
    type Error = DataError;

    fn try_from(repr: RatingDatasetRepr) -> Result<Self, Self::Error> {
        RatingDataset::new(repr.concepts, repr.attributes, repr.ratings, repr.scale)
    }
}

impl From<RatingDataset> for RatingDatasetRepr {
    fn from(d: RatingDataset) -> Self {
        RatingDatasetRepr {
            concepts: d.concepts,
            attributes: d.attributes,
            ratings: d.ratings,
            scale: d.scale,
        }
    }
}

/// Assignment of every concept to exactly one supercategory.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(
    try_from = "Vec<(ConceptId, String)>",
    into = "Vec<(ConceptId, String)>"
)]
pub struct SupercategoryMap {
    assignment: BTreeMap<ConceptId, String>,
}

impl SupercategoryMap {
    /// Repeated pairs are accepted; a concept assigned to two different
    /// supercategories is rejected.
    pub fn new(pairs: impl IntoIterator<Item = (ConceptId, String)>) -> Result<Self, DataError> {
        let mut assignment: BTreeMap<ConceptId, String> = BTreeMap::new();
        for (concept, category) in pairs {
            let category = category.trim().to_owned();
            if category.is_empty() {
                return Err(DataError::EmptyName {
                    field: "supercategory",
                });
            }
            if let Some(previous) = assignment.get(&concept) {
                if previous != &category {
                    return Err(DataError::ConflictingSupercategory {
                        concept: concept.to_string(),
                        first: previous.clone(),
                        second: category,
                    });
                }
                continue;
            }
            assignment.insert(concept, category);
        }
        Ok(SupercategoryMap { assignment })
    }

    pub fn get(&self, concept: &ConceptId) -> Option<&str> {
        self.assignment.get(concept).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ConceptId, &str)> {
        self.assignment.iter().map(|(c, s)| (c, s.as_str()))
    }

    /// Number of concepts assigned to each supercategory.
    pub fn category_sizes(&self) -> BTreeMap<&str, usize> {
        let mut sizes = BTreeMap::new();
        for category in self.assignment.values() {
            *sizes.entry(category.as_str()).or_insert(0) += 1;
        }
        sizes
    }
}

impl TryFrom<Vec<(ConceptId, String)>> for SupercategoryMap {
    type Error = DataError;

    fn try_from(pairs: Vec<(ConceptId, String)>) -> Result<Self, Self::Error> {
        SupercategoryMap::new(pairs)
    }
}

impl From<SupercategoryMap> for Vec<(ConceptId, String)> {
    fn from(map: SupercategoryMap) -> Self {
        map.assignment.into_iter().collect()
    }
}

/// Concept overlap between an embedding table and a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentReport {
    /// Concepts present in both, in dataset order.
    pub matched: Vec<ConceptId>,
    /// Table rows the dataset does not mention, in table order.
    pub embedding_only: Vec<ConceptId>,
    /// Dataset concepts missing from the table, in dataset order.
    pub dataset_only: Vec<ConceptId>,
}

impl AlignmentReport {
    pub fn is_complete(&self) -> bool {
        self.dataset_only.is_empty()
    }
}

pub fn validate_alignment<D: DatasetRows>(table: &EmbeddingTable, dataset: &D) -> AlignmentReport {
    let mut matched = Vec::new();
    let mut dataset_only = Vec::new();
    for c in dataset.concepts() {
        if table.contains(c) {
            matched.push(c.clone());
        } else {
            dataset_only.push(c.clone());
        }
    }
    let in_dataset: HashSet<&ConceptId> = dataset.concepts().iter().collect();
    let embedding_only = table
        .ids()
        .iter()
        .filter(|c| !in_dataset.contains(c))
        .cloned()
        .collect();
    AlignmentReport {
        matched,
        embedding_only,
        dataset_only,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(names: &[&str]) -> Vec<ConceptId> {
        names.iter().map(|n| ConceptId::new(n).unwrap()).collect()
    }

    fn attr(name: &str) -> AttributeId {
        AttributeId::new(name, "taxonomic").unwrap()
    }

    fn table(names: &[&str]) -> EmbeddingTable {
        let rows = ids(names)
            .into_iter()
            .map(|c| (c, vec![1.0, 0.0]))
            .collect();
        EmbeddingTable::new("m", 2, rows).unwrap()
    }

    fn norms(names: &[&str]) -> NormDataset {
        let n = names.len();
        NormDataset::new(ids(names), vec![attr("is_food")], vec![1; n]).unwrap()
    }

    #[test]
    fn alignment_reports_extras_on_both_sides() {
        let report = validate_alignment(&table(&["a", "b", "c"]), &norms(&["a", "b"]));
        assert_eq!(report.matched, ids(&["a", "b"]));
        assert_eq!(report.embedding_only, ids(&["c"]));
        assert!(report.dataset_only.is_empty());

        let report = validate_alignment(&table(&["a"]), &norms(&["a"]));
        assert_eq!(report.matched.len(), 1);
        assert!(report.embedding_only.is_empty() && report.dataset_only.is_empty());

        let report = validate_alignment(&table(&["b", "a"]), &norms(&["a", "z", "b"]));
        assert_eq!(report.matched, ids(&["a", "b"]));
        assert_eq!(report.dataset_only, ids(&["z"]));
    }

    #[test]
    fn empty_table_rejected() {
        assert!(matches!(
            EmbeddingTable::new("m", 2, vec![]),
            Err(DataError::EmptyTable)
        ));
        assert!(matches!(
            EmbeddingTable::new("m", 0, vec![(ConceptId::new("a").unwrap(), vec![])]),
            Err(DataError::ZeroDimension)
        ));
    }

    #[test]
    fn embedding_diagnostics_name_row_and_column() {
        let rows = vec![
            (ConceptId::new("a").unwrap(), vec![0.0, 1.0]),
            (ConceptId::new("b").unwrap(), vec![0.0, f64::NAN]),
        ];
        let err = EmbeddingTable::new("m", 2, rows).unwrap_err();
        assert_eq!(
            err,
            DataError::NonFinite {
                field: "embedding",
                row: "b".into(),
                col: 1
            }
        );
        let rows = vec![(ConceptId::new("a").unwrap(), vec![0.0])];
        assert!(matches!(
            EmbeddingTable::new("m", 2, rows),
            Err(DataError::RowLength { .. })
        ));
        let rows = vec![
            (ConceptId::new("a").unwrap(), vec![0.0]),
            (ConceptId::new("a").unwrap(), vec![1.0]),
        ];
        assert!(matches!(
            EmbeddingTable::new("m", 1, rows),
            Err(DataError::DuplicateConcept(_))
        ));
    }

    #[test]
    fn norm_dataset_validates_labels_and_counts() {
        let err = NormDataset::new(ids(&["a", "b"]), vec![attr("x")], vec![1, 2]).unwrap_err();
        assert_eq!(
            err,
            DataError::InvalidLabel {
                concept: "b".into(),
                attribute: "x".into(),
                value: 2
            }
        );
        let err = NormDataset::new(ids(&["a", "b"]), vec![attr("x")], vec![0, 0]).unwrap_err();
        assert!(matches!(err, DataError::NoPositives { .. }));
        let d = NormDataset::new(
            ids(&["a", "b", "c"]),
            vec![attr("x"), attr("y")],
            vec![1, 0, 1, 1, 0, 1],
        )
        .unwrap();
        assert_eq!(d.positive_counts(), &[2, 2]);
        assert_eq!(d.column(1), vec![false, true, true]);
        assert_eq!(d.extension(0), vec![&d.concepts()[0], &d.concepts()[1]]);
        assert!(matches!(
            NormDataset::new(ids(&["a"]), vec![attr("x"), attr("x")], vec![1, 1]),
            Err(DataError::DuplicateAttribute(_))
        ));
    }

    #[test]
    fn ratings_outside_scale_rejected() {
        let err = RatingDataset::new(
            ids(&["a", "b"]),
            vec![attr("vision")],
            vec![3.0, 6.5],
            RatingScale::default(),
        )
        .unwrap_err();
        assert!(matches!(err, DataError::RatingOutOfRange { value, .. } if value == 6.5));
        let ok = RatingDataset::new(
            ids(&["a", "b"]),
            vec![attr("vision")],
            vec![1.0, 7.0],
            RatingScale {
                low: 1.0,
                high: 7.0,
            },
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn supercategory_conflicts_rejected() {
        let c = ConceptId::new("apple").unwrap();
        let ok =
            SupercategoryMap::new(vec![(c.clone(), "food".into()), (c.clone(), "food".into())]);
        assert_eq!(ok.unwrap().len(), 1);
        let err = SupercategoryMap::new(vec![(c.clone(), "food".into()), (c, "plant".into())]);
        assert!(matches!(
            err,
            Err(DataError::ConflictingSupercategory { .. })
        ));
    }
}
