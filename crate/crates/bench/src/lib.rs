//! Synthetic inputs shared by the benchmarks.

use normprobe_core::datamodel::{AttributeId, ConceptId, EmbeddingTable, NormDataset};
use normprobe_core::probe::Matrix;
use normprobe_core::rng;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// `n x dim` standard normal rows.
pub fn gaussian_matrix(n: usize, dim: usize, seed: u64) -> Matrix {
    let mut stream = rng::substream(seed, 0);
    let data = (0..n * dim)
        .map(|_| StandardNormal.sample(&mut stream))
        .collect();
    Matrix::new(n, dim, data)
}

/// Labels thresholded along a random direction with 5% of them flipped.
pub fn planted_labels(x: &Matrix, positive_rate: f64, seed: u64) -> Vec<bool> {
    let mut stream = rng::substream(seed, 1);
    let w: Vec<f64> = (0..x.cols())
        .map(|_| StandardNormal.sample(&mut stream))
        .collect();
    let scores: Vec<f64> = (0..x.rows())
        .map(|i| x.row(i).iter().zip(&w).map(|(a, b)| a * b).sum())
        .collect();
    let mut sorted = scores.clone();
    sorted.sort_by(f64::total_cmp);
    let cut = sorted[((1.0 - positive_rate) * x.rows() as f64) as usize];
    scores
        .iter()
        .map(|&s| (s >= cut) ^ stream.random_bool(0.05))
        .collect()
}

/// An embedding table and a norms dataset with `k` planted attributes.
pub fn suite(n: usize, dim: usize, k: usize, seed: u64) -> (EmbeddingTable, NormDataset) {
    let x = gaussian_matrix(n, dim, seed);
    let ids: Vec<ConceptId> = (0..n)
        .map(|i| ConceptId::new(format!("c{i:04}")).unwrap())
        .collect();
    let rows = ids
        .iter()
        .cloned()
        .zip((0..n).map(|i| x.row(i).to_vec()))
        .collect();
    let table = EmbeddingTable::new("bench", dim, rows).unwrap();
    let columns = (0..k)
        .map(|j| {
            let labels = planted_labels(&x, 0.2, seed.wrapping_add(j as u64 + 1));
            (AttributeId::new(format!("a{j}"), "t").unwrap(), labels)
        })
        .collect();
    (table, NormDataset::from_columns(ids, columns).unwrap())
}
