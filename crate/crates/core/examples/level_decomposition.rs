//! What the exponential classifier does internally: threshold a labeling
//! into nested Boolean fields, one cut problem per level, and the energy
//! identity that ties them together.
//!
//!     cargo run --example level_decomposition

use levelcut::levelset::{boundary_offset, decompose_labeling, u_level, z_vectors};
use levelcut::maxflow::max_flow;
use levelcut::model::{energy_u1, EdgeSet, FeatureField, Instance, LabelSet, Labeling, Rational};
use levelcut::netbuild::build_level_network;

fn main() -> levelcut::Result<()> {
    let labels = LabelSet::new(vec![1, 4, 6, 9], 10)?;
    let inst = Instance::new(
        FeatureField::with_integer_weights(vec![0, 3, 5, 10], &[1, 2, 1, 3])?,
        labels.clone(),
        EdgeSet::from_integer_arcs([(0, 1, 1), (1, 2, 2), (2, 3, 1), (3, 0, 1)]),
    )?;

    let labeling = Labeling::new(vec![1, 4, 6, 9]);
    let fields = decompose_labeling(&labels, &labeling);
    let zs = z_vectors(inst.field().features(), &labels);
    let mut total = boundary_offset(&inst)?;
    println!("offset {total}");
    for (z, x) in zs.iter().zip(&fields) {
        let u = u_level(&inst, z, x)?;
        let z_str: Vec<String> = (0..z.len()).map(|i| z.value(i).to_string()).collect();
        println!("level {} gap {}  z = [{}]  x = {:?}  u = {u}", z.level(), z.gap(), z_str.join(", "), x.bits());
        total += Rational::from(z.gap()) * u;

        let map = build_level_network(&inst, z)?;
        let cut = max_flow(&map.network)?;
        println!("        best x = {:?}  u = {}", map.decode(&cut.source_side).bits(), map.energy_of_cut(cut.flow_value as i128)?);
    }
    println!("sum {total} = U1 {}", energy_u1(&inst, &labeling)?);
    Ok(())
}
