//! Per-group degree distributions as empirical CCDFs.
//!
//!     cargo run --release --example degree_ccdf

use cascadekit::graph::{degree_profile, BaseGroup, InteractionMultigraph, SimpleDigraph};
use cascadekit::stats::{distribution_compare, CcdfConvention, EmpiricalDistribution};
use cascadekit::synth::{generate, ScenarioParams};

fn main() -> cascadekit::Result<()> {
    let s = generate(&ScenarioParams::default())?;
    let g = InteractionMultigraph::build(&s.events, &s.registry);
    let degrees = degree_profile(&g, &SimpleDigraph::from_multigraph(&g));

    let mut dists = Vec::new();
    for base in BaseGroup::ALL {
        let values: Vec<f64> = degrees
            .iter()
            .filter(|r| g.nodes().label(r.node).base == base)
            .map(|r| r.in_multi as f64)
            .collect();
        let Ok(d) = EmpiricalDistribution::new(values) else { continue };
        println!("{} ({} users): in-degree CCDF", base.as_str(), d.len());
        for x in [1.0, 2.0, 5.0, 10.0, 20.0, 50.0] {
            println!("  P(X >= {x:>3}) = {:.4}", d.ccdf(x, CcdfConvention::Geq));
        }
        dists.push((base, d));
    }
    if let [(a, da), (b, db), ..] = dists.as_slice() {
        println!("sup CDF gap {} vs {}: {:.3}", a.as_str(), b.as_str(), distribution_compare(da, db));
    }
    Ok(())
}
