//! Parse an event log in chunks and build the graph without keeping the
//! parsed events around.
//!
//!     cargo run --example streaming_ingest

use std::io::Cursor;

use cascadekit::graph::{BuiltGraph, GraphBuilder};
use cascadekit::influence::ShareTracker;
use cascadekit::ingest::{EventStream, ParseOptions, TrollRegistry};

const LOG: &str = "\
e1\tbob\t100\talice\t\t
e2\tcarol\t110\t\tbob,alice\thttps://News.Example/a#top
e3\talice\t120\t\t\thttps://news.example/a
this line is broken
e4\tdave\t130\tcarol\t\thttps://news.example/a
";

fn main() -> cascadekit::Result<()> {
    let registry = TrollRegistry::new(["alice"]);
    let mut stream = EventStream::new(Cursor::new(LOG), ParseOptions::default());
    let mut builder = GraphBuilder::new(&registry);
    let mut shares = ShareTracker::new();
    while let Some(chunk) = stream.next_chunk()? {
        for e in &chunk {
            let author = builder.push(e);
            shares.push(author, registry.contains(&e.author), e);
        }
    }
    for err in stream.errors() {
        println!("skipped {err}");
    }
    let BuiltGraph { mut graph, remap, summary } = builder.finish();
    let (troll_urls, spreaders) = shares.finish(&remap);
    graph.nodes_mut().set_spreaders(&spreaders);

    println!("{} nodes, {} edges", graph.node_count(), graph.edge_count());
    for v in 0..graph.node_count() as u32 {
        let l = graph.nodes().label(v);
        println!("  {:<6} {:<8} spreader={}", graph.nodes().id(v), l.base.as_str(), l.spreader);
    }
    for (url, _) in troll_urls.iter() {
        println!("troll-URL {url}");
    }
    println!("troll events {}, real events {}", summary.troll_events, summary.real_events);
    Ok(())
}
