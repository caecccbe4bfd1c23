//! Run the file-based pipeline end to end in a scratch directory, the same
//! stages the `cascadekit` binary exposes.
//!
//!     cargo run --release --example file_pipeline

use cascadekit::pipeline::{run, PipelineConfig, Stage, SynthOptions};

fn main() -> cascadekit::Result<()> {
    let dir = std::env::temp_dir().join("cascadekit-pipeline-example");
    let cfg = PipelineConfig {
        events: Some(dir.join("events.tsv")),
        registry: Some(dir.join("registry.txt")),
        scores: Some(dir.join("scores.csv")),
        out: dir.clone(),
        min_distinct_sharers: 20,
        influence_threshold: 2,
        degree_threshold: 50,
        synth: SynthOptions { users: 3_000, urls: 30, background_events: 20_000, ..Default::default() },
        ..PipelineConfig::default()
    };
    for stage in [Stage::Synth, Stage::Build, Stage::Report] {
        run(stage, &cfg)?;
    }
    let mut names: Vec<_> = std::fs::read_dir(&dir)?.map(|e| e.map(|e| e.file_name())).collect::<Result<_, _>>()?;
    names.sort();
    println!("artifacts in {}:", dir.display());
    for n in names {
        println!("  {}", n.to_string_lossy());
    }
    Ok(())
}
