// The probability that s uniform vertices (with repetition) are independent,
// exact and sampled, on small graphs and a geometric graph.

use ramsey_geo::graph::Graph;
use ramsey_geo::independence::{independence_probability, QMode};
use ramsey_geo::sphere::GeometricGraph;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for (name, g) in [("C5", Graph::cycle(5)), ("Petersen", Graph::petersen())] {
        for s in 1..=4 {
            let q = independence_probability(&g, s, QMode::Exact)?;
            println!("{name:<9} s = {s}  q = {:.6}  ratio = {:?}", q.value, q.exact_ratio);
        }
    }
    let geo = GeometricGraph::sample(30, 20, 0.455, 3)?;
    let exact = independence_probability(&geo.graph, 4, QMode::Exact)?;
    let mc = independence_probability(&geo.graph, 4, QMode::MonteCarlo { trials: 100_000, seed: 1 })?;
    println!(
        "H(30, 20, 0.455) with {} edges: exact {:.6}, sampled {:.6} +- {:.6}",
        geo.graph.edge_count(),
        exact.value,
        mc.value,
        mc.std_error
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("independence_functional example failed");
}
