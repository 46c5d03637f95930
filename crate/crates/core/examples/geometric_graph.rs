// Sample H(M, d, p), look for cliques, and round-trip it through the graph
// and point-cloud file formats.

use ramsey_geo::graph::contains_clique;
use ramsey_geo::io::{read_cloud, read_graph, write_cloud, write_graph, GraphFile};
use ramsey_geo::sphere::{GeometricGraph, SpherePointCloud};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cloud = SpherePointCloud::sample(400, 50, 11)?;
    let g = GeometricGraph::build(&cloud, 0.455)?;
    println!("tau = {:+.6}, density = {:.4}", g.tau, g.graph.density());
    for t in 3..=12 {
        match contains_clique(&g.graph, t) {
            Some(w) => println!("K_{t}: {w:?}"),
            None => {
                println!("no K_{t}");
                break;
            }
        }
    }

    let mut text = Vec::new();
    write_graph(&mut text, &GraphFile::from(g.clone()))?;
    let back = read_graph(text.as_slice())?;
    let mut bin = Vec::new();
    write_cloud(&mut bin, &cloud)?;
    let cloud_back = read_cloud(bin.as_slice(), cloud.seed())?;
    let rebuilt = GeometricGraph::with_tau(&cloud_back, back.p, back.tau);
    println!(
        "graph file {} bytes, cloud file {} bytes, rebuilt adjacency identical: {}",
        text.len(),
        bin.len(),
        rebuilt.graph == back.graph
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("geometric_graph example failed");
}
