//! Grouping of near-duplicate attributes by embedding similarity.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::DatasetError;
use crate::datamodel::{AttributeId, DatasetRows, EmbeddingTable, NormDataset};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeCluster {
    pub representative: String,
    pub members: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergePlan {
    /// Sorted by representative name.
    pub clusters: Vec<MergeCluster>,
    pub threshold: f64,
}

impl MergePlan {
    pub fn cluster_of(&self, attribute: &str) -> Option<&MergeCluster> {
        self.clusters.iter().find(|c| c.members.contains(attribute))
    }

    pub fn n_merged(&self) -> usize {
        self.clusters.iter().filter(|c| c.members.len() > 1).count()
    }
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Clusters attributes whose embeddings have cosine similarity strictly
/// above `threshold`, closing transitively (connected components).
///
/// The rows of `attribute_embeddings` are keyed by attribute name. The
/// representative of each cluster is the member with the largest count in
/// `positive_counts` (missing counts as 0), ties broken by the
/// lexicographically smallest name.
pub fn plan_attribute_merge(
    attribute_embeddings: &EmbeddingTable,
    threshold: f64,
    positive_counts: &HashMap<String, usize>,
) -> Result<MergePlan, DatasetError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(DatasetError::InvalidParameter(format!(
            "merge threshold {threshold} outside (0, 1)"
        )));
    }
    let n = attribute_embeddings.len();
    let mut unit = Vec::with_capacity(n);
    for (id, row) in attribute_embeddings.iter() {
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(DatasetError::ZeroNormVector(id.to_string()));
        }
        unit.push(row.iter().map(|v| v / norm).collect::<Vec<f64>>());
    }
    let mut sets = DisjointSet::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let cos: f64 = unit[i].iter().zip(&unit[j]).map(|(a, b)| a * b).sum();
            if cos > threshold {
                sets.union(i, j);
            }
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (i, id) in attribute_embeddings.ids().iter().enumerate() {
        groups
            .entry(sets.find(i))
            .or_default()
            .insert(id.as_str().to_owned());
    }
    let mut clusters: Vec<MergeCluster> = groups
        .into_values()
        .map(|members| {
            let count = |name: &String| positive_counts.get(name).copied().unwrap_or(0);
            // BTreeSet iterates in name order, so max_by keeps the last of
            // equal counts; reverse to prefer the smallest name.
            let representative = members
                .iter()
                .rev()
                .max_by_key(|name| count(name))
                .expect("non-empty component")
                .clone();
            MergeCluster {
                representative,
                members,
            }
        })
        .collect();
    clusters.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(MergePlan {
        clusters,
        threshold,
    })
}

/// Replaces each cluster's member columns by their element-wise OR, named
/// and typed after the representative.
///
/// A merged column sits at the position of its earliest member in the
/// input. Every dataset attribute must belong to some cluster; clusters may
/// name attributes the dataset lacks.
pub fn apply_merge(dataset: &NormDataset, plan: &MergePlan) -> Result<NormDataset, DatasetError> {
    let cluster_of: HashMap<&str, usize> = plan
        .clusters
        .iter()
        .enumerate()
        .flat_map(|(k, c)| c.members.iter().map(move |m| (m.as_str(), k)))
        .collect();
    let mut order: Vec<usize> = Vec::new();
    let mut columns: HashMap<usize, Vec<bool>> = HashMap::new();
    for (j, attr) in dataset.attributes().iter().enumerate() {
        let &k = cluster_of
            .get(attr.name())
            .ok_or_else(|| DatasetError::UnplannedAttribute(attr.name().to_owned()))?;
        let column = dataset.column(j);
        match columns.get_mut(&k) {
            Some(merged) => merged.iter_mut().zip(column).for_each(|(m, v)| *m |= v),
            None => {
                order.push(k);
                columns.insert(k, column);
            }
        }
    }
    let by_name: HashMap<&str, &AttributeId> =
        dataset.attributes().iter().map(|a| (a.name(), a)).collect();
    let mut out = Vec::with_capacity(order.len());
    for k in order {
        let cluster = &plan.clusters[k];
        let attribute = match by_name.get(cluster.representative.as_str()) {
            Some(a) => (*a).clone(),
            None => {
                return Err(DatasetError::UnplannedAttribute(format!(
                    "representative `{}` is not a dataset attribute",
                    cluster.representative
                )))
            }
        };
        out.push((attribute, columns.remove(&k).expect("column built above")));
    }
    Ok(NormDataset::from_columns(dataset.concepts().to_vec(), out)?)
}
