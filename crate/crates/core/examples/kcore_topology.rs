//! Connected components and k-core decomposition of a synthetic interaction
//! graph.
//!
//!     cargo run --release --example kcore_topology

use cascadekit::graph::{BaseGroup, InteractionMultigraph, SimpleDigraph, UndirectedGraph};
use cascadekit::synth::{generate, ScenarioParams};
use cascadekit::topology::{connected_components, k_core_decomposition, largest_component};

fn main() -> cascadekit::Result<()> {
    let s = generate(&ScenarioParams { n_real: 20_000, background_events: 120_000, ..Default::default() })?;
    let g = InteractionMultigraph::build(&s.events, &s.registry);
    let und = UndirectedGraph::from_simple(&SimpleDigraph::from_multigraph(&g));

    let comps = connected_components(&und);
    println!("{} nodes in {} components", und.node_count(), comps.count());
    for (size, count) in comps.histogram().iter().rev().take(5) {
        println!("  size {size}: {count}");
    }
    let lcc = largest_component(&und, &comps);
    println!("largest component: {} nodes, {} edges", lcc.graph.node_count(), lcc.graph.edge_count());

    let core = k_core_decomposition(&und);
    let members = core.max_core_members();
    let trolls = members.iter().filter(|&&v| g.nodes().label(v).base == BaseGroup::Troll).count();
    println!("max coreness {} with {} members ({} trolls)", core.max(), members.len(), trolls);
    Ok(())
}
