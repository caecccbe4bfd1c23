//! Save an interaction graph to the binary snapshot format and load it back.
//!
//!     cargo run --release --example snapshot_roundtrip

use cascadekit::graph::{snapshot_load_file, snapshot_save_file, InteractionMultigraph};
use cascadekit::synth::{generate, ScenarioParams};

fn main() -> cascadekit::Result<()> {
    let s = generate(&ScenarioParams::default())?;
    let g = InteractionMultigraph::build(&s.events, &s.registry);
    let dir = std::env::temp_dir().join("cascadekit-snapshot-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("graph.igr");

    snapshot_save_file(&g, &path)?;
    let loaded = snapshot_load_file(&path)?;
    println!("{} bytes on disk", std::fs::metadata(&path)?.len());
    println!("nodes {} / {}", g.node_count(), loaded.node_count());
    println!("edges {} / {}", g.edge_count(), loaded.edge_count());
    println!("digest {:016x} / {:016x}", g.structural_digest(), loaded.structural_digest());
    assert_eq!(g, loaded);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
