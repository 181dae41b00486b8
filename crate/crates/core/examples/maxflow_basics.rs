//! The max-flow solver on its own: flow value, both extreme minimum cuts,
//! and the plain-text network dump.
//!
//!     cargo run --example maxflow_basics

use levelcut::maxflow::{solve, CutSide, FlowNetwork};

fn main() -> levelcut::Result<()> {
    // s=0, t=3; two equally cheap cuts
    let mut net = FlowNetwork::new(4, 0, 3)?;
    net.add_arc(0, 1, 3)?;
    net.add_arc(0, 2, 2)?;
    net.add_arc(1, 2, 1)?;
    net.add_arc(1, 3, 2)?;
    net.add_arc(2, 3, 3)?;
    net.add_arc(2, 1, 1)?;

    let sol = solve(&net)?;
    println!("max flow {}", sol.flow_value());
    for (arc, f) in net.arcs().iter().zip(sol.arc_flows()) {
        println!("  {} -> {}  {f}/{}", arc.from, arc.to, arc.capacity);
    }
    for side in [CutSide::Minimal, CutSide::Maximal] {
        let cut = sol.cut(side);
        let nodes: Vec<usize> = (0..cut.len()).filter(|&v| cut[v]).collect();
        println!("{side:?} source side {nodes:?}, capacity {}", net.cut_capacity(&cut));
    }

    let text = net.to_text();
    print!("dump:\n{text}");
    let back = FlowNetwork::from_text(&text)?;
    assert_eq!(solve(&back)?.flow_value(), sol.flow_value());
    Ok(())
}
