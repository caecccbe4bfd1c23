use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cascadekit::pipeline::{run, PipelineConfig, Stage, SynthOptions, Target};
use cascadekit::stats::CcdfConvention;
use cascadekit::{ingest::EventFormat, ingest::UrlMode, Error};

#[derive(Parser)]
#[command(name = "cascadekit", version, about = "Cascade reconstruction and influence analytics over interaction logs")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Event log (tab-separated unless --format jsonl)
    #[arg(long, global = true)]
    events: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    /// Troll registry, one user id per line
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
    /// Per-user score table (user,score)
    #[arg(long, global = true)]
    scores: Option<PathBuf>,
    /// Artifact directory, read and written by every subcommand
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 100)]
    min_distinct_sharers: usize,
    #[arg(long, global = true, default_value_t = 1000)]
    viral_size: usize,
    #[arg(long, global = true, default_value_t = 100)]
    influence_threshold: u64,
    #[arg(long, global = true, default_value_t = 1000)]
    degree_threshold: u64,
    /// CCDF as P(X >= x) (default)
    #[arg(long, global = true, conflicts_with = "ccdf_gt")]
    ccdf_geq: bool,
    /// CCDF as P(X > x)
    #[arg(long, global = true)]
    ccdf_gt: bool,
    /// Reject lines carrying malformed URLs instead of keeping them verbatim
    #[arg(long, global = true)]
    strict_urls: bool,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Topology stages: analyse the full graph or the region of influence
    #[arg(long, global = true, value_enum, default_value_t = TargetArg::Graph)]
    target: TargetArg,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    // synth only
    #[arg(long, global = true, default_value_t = 5_000)]
    users: usize,
    #[arg(long, global = true, default_value_t = 20)]
    trolls: usize,
    #[arg(long, global = true, default_value_t = 50)]
    urls: usize,
    #[arg(long, global = true, default_value_t = 30_000)]
    background_events: usize,
    #[arg(long, global = true, default_value_t = 200)]
    max_tree_size: usize,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Parse events, build the interaction graph and troll-URL list
    Build,
    /// Per-user degree profile and per-group CCDFs
    Degrees,
    /// Connected-component size histogram
    Components,
    /// k-core decomposition
    Kcore,
    /// Induced subgraph on spreaders
    Region,
    /// Infer cascade forests for popular troll-URLs
    Cascades,
    /// Structural-virality distribution
    Virality,
    /// Influence-degree and cascade initiators
    Influence,
    /// Re-infer cascades with trolls removed
    Ablate,
    /// Correlate scores with influence-degree
    Correlate,
    /// Trolls vs ego-net summary table
    Topk,
    /// Generate a seeded synthetic scenario
    Synth,
    /// Run every analysis stage after build
    Report,
}

#[derive(ValueEnum, Clone, Copy)]
enum Format {
    Tsv,
    Jsonl,
}

#[derive(ValueEnum, Clone, Copy)]
enum TargetArg {
    Graph,
    Region,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    let stage = match cli.command {
        Command::Build => Stage::Build,
        Command::Degrees => Stage::Degrees,
        Command::Components => Stage::Components,
        Command::Kcore => Stage::Kcore,
        Command::Region => Stage::Region,
        Command::Cascades => Stage::Cascades,
        Command::Virality => Stage::Virality,
        Command::Influence => Stage::Influence,
        Command::Ablate => Stage::Ablate,
        Command::Correlate => Stage::Correlate,
        Command::Topk => Stage::Topk,
        Command::Synth => Stage::Synth,
        Command::Report => Stage::Report,
    };
    let cfg = PipelineConfig {
        events: cli.events,
        registry: cli.registry,
        scores: cli.scores,
        out: cli.out,
        event_format: match cli.format {
            Format::Tsv => EventFormat::Tsv,
            Format::Jsonl => EventFormat::Jsonl,
        },
        url_mode: if cli.strict_urls { UrlMode::Strict } else { UrlMode::Lenient },
        min_distinct_sharers: cli.min_distinct_sharers,
        viral_size: cli.viral_size,
        influence_threshold: cli.influence_threshold,
        degree_threshold: cli.degree_threshold,
        ccdf: if cli.ccdf_gt { CcdfConvention::Gt } else { CcdfConvention::Geq },
        workers: cli.workers,
        seed: cli.seed,
        target: match cli.target {
            TargetArg::Graph => Target::Graph,
            TargetArg::Region => Target::Region,
        },
        synth: SynthOptions {
            users: cli.users,
            trolls: cli.trolls,
            urls: cli.urls,
            background_events: cli.background_events,
            max_tree_size: cli.max_tree_size,
        },
    };

    match run(stage, &cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) => 1,
                Error::MissingArtifact(_) => 2,
                _ => 3,
            })
        }
    }
}
