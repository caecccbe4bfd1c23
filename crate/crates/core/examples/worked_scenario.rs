//! Cascade inference on the four-user fixture, before and after removing
//! the troll.
//!
//!     cargo run --example worked_scenario

use std::collections::BTreeSet;

use cascadekit::cascades::{ablate_trolls, build_diffusion_lists, extract_trees, infer_all, influence_degree};
use cascadekit::graph::{InteractionMultigraph, SimpleDigraph};
use cascadekit::influence::extract_troll_urls;
use cascadekit::synth::worked_scenario;

fn main() {
    let (events, registry) = worked_scenario();
    let g = InteractionMultigraph::build(&events, &registry);
    let simple = SimpleDigraph::from_multigraph(&g);
    let name = |v| g.nodes().id(v);

    let urls: BTreeSet<_> = extract_troll_urls(&events, &registry).urls.into_keys().collect();
    let lists = build_diffusion_lists(&events, g.nodes(), &urls);
    let refs: Vec<_> = lists.values().collect();
    let forests = infer_all(&refs, &simple);

    for f in &forests {
        println!("{}", f.url);
        for (p, c) in f.influence_edges() {
            println!("  {} -> {}", name(p), name(c));
        }
        println!("  roots: {:?}", f.roots().map(name).collect::<Vec<_>>());
        for t in extract_trees(f) {
            println!("  tree rooted at {} with {} nodes", name(t.root()), t.size());
        }
    }
    let infl = influence_degree(&forests, g.node_count());
    for v in 0..g.node_count() as u32 {
        println!("influence-degree {} = {}", name(v), infl[v as usize]);
    }

    let ablation = ablate_trolls(&refs, &simple, g.nodes(), &forests);
    println!("without trolls:");
    for f in &ablation.forests {
        for (p, c) in f.influence_edges() {
            println!("  {} -> {}", name(p), name(c));
        }
        println!("  roots: {:?}", f.roots().map(name).collect::<Vec<_>>());
    }
}
