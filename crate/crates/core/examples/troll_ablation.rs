//! Re-infer cascades with trolls removed and compare virality.
//!
//!     cargo run --release --example troll_ablation

use std::collections::BTreeSet;

use cascadekit::cascades::{ablate_trolls, build_diffusion_lists, infer_all};
use cascadekit::graph::{InteractionMultigraph, SimpleDigraph};
use cascadekit::influence::extract_troll_urls;
use cascadekit::synth::{generate, ScenarioParams};

fn main() -> cascadekit::Result<()> {
    let s = generate(&ScenarioParams::default())?;
    let g = InteractionMultigraph::build(&s.events, &s.registry);
    let simple = SimpleDigraph::from_multigraph(&g);
    let urls: BTreeSet<_> = extract_troll_urls(&s.events, &s.registry).urls.into_keys().collect();
    let lists = build_diffusion_lists(&s.events, g.nodes(), &urls);
    let refs: Vec<_> = lists.values().collect();
    let forests = infer_all(&refs, &simple);

    let ablation = ablate_trolls(&refs, &simple, g.nodes(), &forests);
    let r = &ablation.report;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    println!("trees: {} -> {}", r.trees_before, r.trees_after);
    println!("mean virality: {:.3} -> {:.3}", mean(&r.virality_before), mean(&r.virality_after));
    match r.max_cdf_gap {
        Some(gap) => println!("max CDF gap: {gap:.3}"),
        None => println!("max CDF gap undefined (no trees on one side)"),
    }
    Ok(())
}
