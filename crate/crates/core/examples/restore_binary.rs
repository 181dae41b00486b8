//! Binary restoration: with labels {0, 1} and L = 1 both models are the
//! same single min-cut problem.
//!
//!     cargo run --example restore_binary

use levelcut::classify::{classify_boolean, classify_gauss};
use levelcut::imageio::{grid_edges, Connectivity, GridDims};
use levelcut::model::{FeatureField, Instance, LabelSet, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn show(w: usize, v: &[i64]) {
    for row in v.chunks(w) {
        println!("  {}", row.iter().map(|&b| if b == 1 { '#' } else { '.' }).collect::<String>());
    }
}

fn main() -> levelcut::Result<()> {
    let (w, h) = (32, 12);
    let truth: Vec<i64> = (0..w * h).map(|p| ((p % w) / 8 + (p / w) / 4) as i64 % 2).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let noisy: Vec<i64> = truth.iter().map(|&b| if rng.random_bool(0.15) { 1 - b } else { b }).collect();

    let inst = Instance::new(
        FeatureField::uniform(noisy.clone(), Rational::from(1))?,
        LabelSet::new(vec![0, 1], 1)?,
        grid_edges(GridDims::planar(w, h), Connectivity::Four, Rational::new(1, 3))?,
    )?;
    let r = classify_boolean(&inst)?;
    assert_eq!(r.labeling, classify_gauss(&inst)?.labeling);

    let errors = |v: &[i64]| v.iter().zip(&truth).filter(|(a, b)| a != b).count();
    println!("noisy ({} flipped)", errors(&noisy));
    show(w, &noisy);
    println!("restored ({} wrong, energy {})", errors(r.labeling.values()), r.energy);
    show(w, r.labeling.values());
    Ok(())
}
