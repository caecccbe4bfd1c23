//! Correlate per-user scores with influence-degree on a scenario whose
//! scores were planted to fall as influence grows.
//!
//!     cargo run --release --example score_correlation

use std::collections::BTreeSet;

use cascadekit::cascades::{build_diffusion_lists, infer_all, influence_degree};
use cascadekit::graph::{InteractionMultigraph, SimpleDigraph};
use cascadekit::stats::{correlate_scores, permutation_p_value, CorrelationMethod, ScoreTable};
use cascadekit::synth::{generate, ScenarioParams};

fn main() -> cascadekit::Result<()> {
    let s = generate(&ScenarioParams { score_slope: -0.5, ..Default::default() })?;
    let g = InteractionMultigraph::build(&s.events, &s.registry);
    let simple = SimpleDigraph::from_multigraph(&g);
    let urls: BTreeSet<_> = s.planted_urls.iter().cloned().collect();
    let lists = build_diffusion_lists(&s.events, g.nodes(), &urls);
    let forests = infer_all(&lists.values().collect::<Vec<_>>(), &simple);
    let infl = influence_degree(&forests, g.node_count());

    let scores = ScoreTable { scores: s.scores.iter().cloned().collect() };
    let candidates = (0..g.node_count() as u32).map(|v| (g.nodes().id(v), infl[v as usize]));
    let report = correlate_scores(&scores, candidates, 1)?;
    let p = report.pearson?;
    let r = report.spearman?;
    println!("{} users with influence-degree > 1", report.n);
    println!("pearson  r = {:+.3} (p = {:.2e})", p.coefficient, p.p_value);
    println!("spearman r = {:+.3} (p = {:.2e})", r.coefficient, r.p_value);

    let (x, y): (Vec<f64>, Vec<f64>) = report.pairs.iter().map(|(_, s, i)| (*s, *i as f64)).unzip();
    let perm = permutation_p_value(&x, &y, CorrelationMethod::Spearman, 2_000, 7)?;
    println!("spearman permutation p = {perm:.4}");
    Ok(())
}
