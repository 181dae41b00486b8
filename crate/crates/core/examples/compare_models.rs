//! Both classifiers on a five-pixel chain, checked against brute force.
//!
//!     cargo run --example compare_models

use levelcut::classify::{classify, Model};
use levelcut::model::{EdgeSet, FeatureField, Instance, LabelSet};
use levelcut::oracle::{brute_min_u1, brute_min_u2, OracleConfig};

fn main() -> levelcut::Result<()> {
    let features = vec![0, 1, 5, 6, 2];
    let field = FeatureField::with_integer_weights(features.clone(), &[2, 2, 2, 2, 1])?;
    let labels = LabelSet::new(vec![0, 3, 6], 6)?;
    let chain = (0..4).flat_map(|i| [(i, i + 1, 1), (i + 1, i, 1)]);
    let inst = Instance::new(field, labels, EdgeSet::from_integer_arcs(chain))?;

    println!("features {features:?}");
    let cfg = OracleConfig::default();
    for model in [Model::Exp, Model::Gauss] {
        let r = classify(&inst, model)?;
        let truth = match model {
            Model::Exp => brute_min_u1(&inst, &cfg)?,
            Model::Gauss => brute_min_u2(&inst, &cfg)?,
        };
        println!(
            "{model:<5} labels {:?}  energy {}  brute force {} ({} minimizers)",
            r.labeling.values(),
            r.energy,
            truth.energy,
            truth.minimizers.len()
        );
        for (l, field) in r.per_level.iter().enumerate() {
            let bits: String = field.bits().iter().map(|&b| if b { '1' } else { '0' }).collect();
            println!("      x({}) = {bits}", l + 1);
        }
    }
    Ok(())
}
