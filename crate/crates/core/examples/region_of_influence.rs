//! Troll-URLs, spreaders and the induced region of influence.
//!
//!     cargo run --release --example region_of_influence

use cascadekit::graph::{BaseGroup, InteractionMultigraph, SimpleDigraph};
use cascadekit::influence::{extract_troll_urls, identify_spreaders, induced_subgraph};
use cascadekit::synth::{generate, ScenarioParams};

fn main() -> cascadekit::Result<()> {
    let s = generate(&ScenarioParams::default())?;
    let mut g = InteractionMultigraph::build(&s.events, &s.registry);
    let troll_urls = extract_troll_urls(&s.events, &s.registry);
    let flags = identify_spreaders(&s.events, &troll_urls, g.nodes());
    g.nodes_mut().set_spreaders(&flags);

    println!("{} troll-URLs", troll_urls.len());
    for (url, st) in troll_urls.iter().take(3) {
        println!("  {url}: {} troll shares, first at {}", st.troll_share_count, st.first_troll_ts);
    }
    let region = induced_subgraph(&SimpleDigraph::from_multigraph(&g), &flags);
    println!("region: {} spreaders, {} edges", region.node_count(), region.edge_count());
    for (b, c) in BaseGroup::ALL.iter().zip(region.group_counts(g.nodes())) {
        println!("  {:>8}: {c}", b.as_str());
    }
    Ok(())
}
