//! Writes the planted-signal fixtures used by the integration tests.
//!
//! cargo run -p normprobe-cli --example make_fixtures -- crates/cli/tests/fixtures
//!
//! Concepts get i.i.d. standard normal embeddings (dim 16, seed 13). Each of
//! the 8 attributes is positive when the embedding lies beyond a threshold
//! along a random direction, chosen so the positive rate is 28% to 34%,
//! after which every label is flipped independently with probability 0.05. A second model
//! sees a noisy linear image of the same embeddings. Ratings are a clamped
//! linear function of the embedding plus noise.

use std::path::{Path, PathBuf};

use normprobe_cli::{datasets, nprb};
use normprobe_core::rng;
use normprobe_core::{
    AttributeId, ConceptId, EmbeddingTable, NormDataset, RatingDataset, RatingScale,
};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

const SEED: u64 = 13;
const N_CONCEPTS: usize = 200;
const DIM: usize = 16;
const FLIP_RATE: f64 = 0.05;
const TYPES: [&str; 4] = ["colour", "function", "taxonomic", "visual"];

fn gaussian(stream: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(stream)).collect()
}

/// Rounds through `f32` so labels are computed from the stored values.
fn stored(values: Vec<f64>) -> Vec<f64> {
    values.into_iter().map(|v| f64::from(v as f32)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "crates/cli/tests/fixtures".into())
        .into();
    std::fs::create_dir_all(&out)?;

    let concepts: Vec<ConceptId> = (0..N_CONCEPTS)
        .map(|i| ConceptId::new(format!("concept_{i:03}")))
        .collect::<Result<_, _>>()?;

    let mut stream = rng::substream(SEED, 0);
    let a = stored(gaussian(&mut stream, N_CONCEPTS * DIM));
    let table_a = EmbeddingTable::from_flat("planted-a", DIM, concepts.clone(), a.clone())?;

    // Second model: random mixing matrix plus isotropic noise.
    let mut stream = rng::substream(SEED, 1);
    let mixing = gaussian(&mut stream, DIM * DIM);
    let b: Vec<f64> = (0..N_CONCEPTS)
        .flat_map(|i| {
            let row = &a[i * DIM..(i + 1) * DIM];
            (0..DIM)
                .map(|k| dot(&mixing[k * DIM..(k + 1) * DIM], row) / (DIM as f64).sqrt())
                .collect::<Vec<_>>()
        })
        .collect();
    let noise = gaussian(&mut stream, N_CONCEPTS * DIM);
    let b = stored(b.iter().zip(&noise).map(|(x, e)| x + 0.3 * e).collect());
    let table_b = EmbeddingTable::from_flat("planted-b", DIM, concepts.clone(), b)?;

    let mut stream = rng::substream(SEED, 2);
    let mut columns = Vec::new();
    for j in 0..8 {
        let direction = gaussian(&mut stream, DIM);
        let scores: Vec<f64> = (0..N_CONCEPTS)
            .map(|i| dot(&a[i * DIM..(i + 1) * DIM], &direction))
            .collect();
        let rate = 0.28 + 0.02 * (j % 4) as f64;
        let mut sorted = scores.clone();
        sorted.sort_by(f64::total_cmp);
        let cut = sorted[N_CONCEPTS - (rate * N_CONCEPTS as f64) as usize];
        let labels: Vec<bool> = scores
            .iter()
            .map(|&s| (s >= cut) ^ stream.random_bool(FLIP_RATE))
            .collect();
        let attribute = AttributeId::new(format!("planted_{j}"), TYPES[j / 2])?;
        columns.push((attribute, labels));
    }
    let norms = NormDataset::from_columns(concepts.clone(), columns)?;

    let mut stream = rng::substream(SEED, 3);
    let mut rating_attributes = Vec::new();
    let mut ratings = vec![0.0; N_CONCEPTS * 4];
    for j in 0..4 {
        let direction = gaussian(&mut stream, DIM);
        let norm = dot(&direction, &direction).sqrt();
        for i in 0..N_CONCEPTS {
            let signal = dot(&a[i * DIM..(i + 1) * DIM], &direction) / norm;
            let e: f64 = StandardNormal.sample(&mut stream);
            ratings[i * 4 + j] = (3.0 + 0.8 * signal + 0.3 * e).clamp(0.0, 6.0);
        }
        rating_attributes.push(AttributeId::new(format!("rated_{j}"), TYPES[j])?);
    }
    let ratings = RatingDataset::new(
        concepts.clone(),
        rating_attributes,
        ratings,
        RatingScale::default(),
    )?;

    // Supercategory by quadrant of the first two embedding coordinates.
    let mut supercategories = String::from("concept,supercategory\n");
    for (i, c) in concepts.iter().enumerate() {
        let quadrant = match (a[i * DIM] >= 0.0, a[i * DIM + 1] >= 0.0) {
            (true, true) => "animal",
            (true, false) => "food",
            (false, true) => "tool",
            (false, false) => "vehicle",
        };
        supercategories.push_str(&format!("{c},{quadrant}\n"));
    }

    let at = |name: &str| -> PathBuf { out.join(name) };
    nprb::write(&at("planted_a.nprb"), &table_a)?;
    nprb::write(&at("planted_b.nprb"), &table_b)?;
    datasets::write_norms(&at("planted.csv"), &norms)?;
    datasets::write_ratings(&at("planted_ratings.csv"), &ratings)?;
    std::fs::write(at("planted.supercategories.csv"), supercategories)?;
    report(&out, &norms);
    Ok(())
}

fn report(out: &Path, norms: &NormDataset) {
    let counts: Vec<String> = norms
        .positive_counts()
        .iter()
        .map(|c| c.to_string())
        .collect();
    eprintln!(
        "fixtures written to {}; positive counts {}",
        out.display(),
        counts.join(" ")
    );
}
