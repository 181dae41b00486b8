//! 3D: a noisy two-phase ball in a 24^3 volume, 6-connected.
//!
//!     cargo run --release --example volume_segmentation

use levelcut::classify::classify_exp;
use levelcut::imageio::{add_gaussian_noise, grid_edges, quantize, write_raw_volume, Connectivity, RasterImage};
use levelcut::model::{FeatureField, Instance, LabelSet, Rational};

fn main() -> levelcut::Result<()> {
    let n = 24;
    let c = n as f64 / 2.0;
    let mut clean = Vec::with_capacity(n * n * n);
    for z in 0..n {
        for y in 0..n {
            for x in 0..n {
                let r2 = (x as f64 - c).powi(2) + (y as f64 - c).powi(2) + (z as f64 - c).powi(2);
                clean.push(if r2 < 64.0 { 200 } else { 60 });
            }
        }
    }
    let clean = RasterImage::new(n, n, n, 255, clean)?;
    let noisy = add_gaussian_noise(&clean, 60.0, 3)?;

    let inst = Instance::new(
        FeatureField::uniform(quantize(&noisy, 255)?, Rational::from(1))?,
        LabelSet::new(vec![60, 200], 255)?,
        grid_edges(noisy.dims(), Connectivity::Six, Rational::new(1, 4))?,
    )?;
    let r = classify_exp(&inst)?;

    let wrong = |v: &[i64]| v.iter().zip(&clean.samples).filter(|(&a, &b)| a != b as i64).count();
    let nearest: Vec<i64> = inst.field().features().iter().map(|&f| if f < 130 { 60 } else { 200 }).collect();
    println!("{} voxels", clean.len());
    println!("thresholding alone  {} wrong", wrong(&nearest));
    println!("exact MAP           {} wrong, energy {}", wrong(r.labeling.values()), r.energy);

    let out = RasterImage::new(n, n, n, 255, r.labeling.values().iter().map(|&v| v as u16).collect())?;
    std::fs::write("ball_labels.raw", write_raw_volume(&out)?)?;
    println!("wrote ball_labels.raw ({n}x{n}x{n})");
    Ok(())
}
