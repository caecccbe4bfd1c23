//! Reconstruct information-diffusion cascades over timestamped interaction
//! graphs and measure who seeds, spreads and amplifies them.
//!
//! The crate is organised bottom-up:
//!
//! * [`ingest`]: event-stream parsing, URL normalisation, troll registry
//! * [`graph`]: interaction multigraph, simple projection, group labels, snapshots
//! * [`topology`]: connected components and k-core decomposition
//! * [`influence`]: troll-URLs, spreaders and the region of influence
//! * [`cascades`]: diffusion lists, cascade inference, structural virality, ablation
//! * [`stats`]: CCDFs, correlations and the top-k summary table
//! * [`synth`]: seeded scenarios with planted cascades
//! * [`pipeline`]: file-based stages behind the `cascadekit` binary
//!
//! The `examples/` directory has one runnable program per capability.

pub mod cascades;
pub mod error;
pub mod graph;
pub mod influence;
pub mod ingest;
pub mod pipeline;
pub mod stats;
pub mod synth;
pub mod topology;

pub use error::{Error, Result, SnapshotError};
