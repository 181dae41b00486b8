//! Segment a PGM into k+1 evenly spaced gray levels.
//!
//!     cargo run --release --example segment_pgm -- [input.pgm] [k] [out.pgm]
//!
//! Without an input a noisy synthetic pattern is generated.

use std::time::Instant;

use levelcut::classify::{classify, Model};
use levelcut::imageio::{grid_edges, labeling_to_image, quantize, read_pnm, write_pgm, Connectivity};
use levelcut::model::{FeatureField, Instance, LabelSet, Rational};

fn main() -> levelcut::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let k: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let image = match args.first() {
        Some(path) => read_pnm(&std::fs::read(path)?)?,
        None => levelcut::cli::synthetic_image(96, k, 35.0, 1)?,
    };
    let labels = LabelSet::uniform(k, 255)?;
    let field = FeatureField::uniform(quantize(&image, 255)?, Rational::from(1))?;
    let edges = grid_edges(image.dims(), Connectivity::Eight, Rational::new(1, 2))?;
    let inst = Instance::new(field, labels.clone(), edges)?;
    println!("{}x{} pixels, labels {:?}", image.width, image.height, labels.levels());

    for model in [Model::Exp, Model::Gauss] {
        let t = Instant::now();
        let r = classify(&inst, model)?;
        let mut hist = vec![0usize; labels.levels().len()];
        for v in r.labeling.values() {
            hist[labels.levels().iter().position(|l| l == v).unwrap()] += 1;
        }
        println!(
            "{model:<5} energy {:>10}  {} network nodes  {:.1?}  histogram {hist:?}",
            r.energy.to_string(),
            r.diagnostics.nodes,
            t.elapsed()
        );
        if model == Model::Exp {
            let out = args.get(2).cloned().unwrap_or_else(|| "segmented.pgm".into());
            std::fs::write(&out, write_pgm(&labeling_to_image(&r.labeling, image.dims(), 255)?)?)?;
            println!("      wrote {out}");
        }
    }
    Ok(())
}
