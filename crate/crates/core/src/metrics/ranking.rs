use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedModel {
    /// Dense rank starting at 1; tied values share a rank.
    pub rank: usize,
    pub model: String,
    pub value: f64,
}

/// Dense ranking of models by a per-model score. Within a tie, models are
/// listed by name.
pub fn rank_models(per_model: &[(String, f64)], higher_is_better: bool) -> Vec<RankedModel> {
    let mut sorted: Vec<&(String, f64)> = per_model.iter().collect();
    sorted.sort_by(|a, b| {
        let by_value = if higher_is_better {
            b.1.total_cmp(&a.1)
        } else {
            a.1.total_cmp(&b.1)
        };
        by_value.then_with(|| a.0.cmp(&b.0))
    });
    let mut out: Vec<RankedModel> = Vec::with_capacity(sorted.len());
    for (model, value) in sorted {
        let rank = match out.last() {
            Some(prev) if prev.value == *value => prev.rank,
            Some(prev) => prev.rank + 1,
            None => 1,
        };
        out.push(RankedModel {
            rank,
            model: model.clone(),
            value: *value,
        });
    }
    out
}
