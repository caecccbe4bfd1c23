//! File-based pipeline stages.
//!
//! Every stage reads its inputs from explicit paths (the event log, the
//! registry, the score table) or from artifacts earlier stages left in the
//! output directory, and writes its own artifacts there. Nothing is carried
//! between stages in memory, so any stage can be rerun on its own.
//!
//! | stage        | reads                                              | writes |
//! |--------------|----------------------------------------------------|--------|
//! | `synth`      | nothing                                            | `events.tsv`, `registry.txt`, `ground_truth.csv`, `scores.csv` |
//! | `build`      | events, registry                                   | `graph.igr`, `troll_urls.csv`, `group_summary.csv`, `group_counts.csv` |
//! | `degrees`    | `graph.igr`                                        | `degrees.csv`, `degree_ccdf.csv` |
//! | `components` | `graph.igr` or `region.igr`                        | `[region_]component_sizes.csv` |
//! | `kcore`      | `graph.igr` or `region.igr`                        | `[region_]coreness.csv`, `[region_]kcore_summary.csv` |
//! | `region`     | `graph.igr`                                        | `region.igr`, `region_counts.csv` |
//! | `cascades`   | `graph.igr`, `troll_urls.csv`, events              | `cascade_trees.csv`, `cascade_edges.csv`, `first_appearance.csv` |
//! | `virality`   | `cascade_trees.csv`                                | `virality_ccdf.csv` |
//! | `influence`  | `graph.igr`, `cascade_trees.csv`, `cascade_edges.csv` | `influence.csv`, `influence_ccdf.csv`, `initiators.csv` |
//! | `ablate`     | `graph.igr`, `troll_urls.csv`, events              | `ablation.csv`, `ablation_summary.csv` |
//! | `correlate`  | `influence.csv`, scores                            | `correlation.csv`, `correlation_pairs.csv` |
//! | `topk`       | `graph.igr`, `coreness.csv`, `cascade_trees.csv`, `influence.csv` | `topk.csv` |
//! | `report`     | `graph.igr`, `troll_urls.csv`, events, optional scores | everything above plus `summary.json` |

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cascades::{
    ablate_trolls, extract_trees, DiffusionCollector, infer_all, relative_first_appearance,
    structural_virality, CascadeForest, DiffusionList, InitiatorCounts,
};
use crate::error::{Error, Result};
use crate::graph::{
    degree_profile, snapshot_load_file, snapshot_save_file, write_degree_csv, write_group_summary_csv, BaseGroup,
    BuiltGraph, GraphBuilder, GroupSummary, InteractionMultigraph, NodeId, SimpleDigraph, UndirectedGraph,
};
use crate::influence::{induced_subgraph, ShareTracker, TrollUrlSet};
use crate::ingest::{
    load_troll_registry_file, open_event_stream, EventFormat, EventStream, NormalizedUrl, ParseOptions,
    TrollRegistry, UrlMode,
};
use crate::stats::{
    correlate_scores, CcdfConvention, EmpiricalDistribution, ScoreTable, TopkInputs, TopkThresholds,
    topk_summary,
};
use crate::synth::{write_scenario, CascadePlan, ScenarioParams};
use crate::topology::{connected_components, k_core_decomposition, CorenessMap};

pub const GRAPH_SNAPSHOT: &str = "graph.igr";
pub const REGION_SNAPSHOT: &str = "region.igr";
pub const TROLL_URLS: &str = "troll_urls.csv";
pub const CASCADE_TREES: &str = "cascade_trees.csv";
pub const CASCADE_EDGES: &str = "cascade_edges.csv";
pub const INFLUENCE: &str = "influence.csv";
pub const CORENESS: &str = "coreness.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Build,
    Degrees,
    Components,
    Kcore,
    Region,
    Cascades,
    Virality,
    Influence,
    Ablate,
    Correlate,
    Topk,
    Synth,
    Report,
}

/// Which snapshot the topology stages analyse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Target {
    #[default]
    Graph,
    Region,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOptions {
    pub users: usize,
    pub trolls: usize,
    pub urls: usize,
    pub background_events: usize,
    pub max_tree_size: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions { users: 5_000, trolls: 20, urls: 50, background_events: 30_000, max_tree_size: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub events: Option<PathBuf>,
    pub registry: Option<PathBuf>,
    pub scores: Option<PathBuf>,
    pub out: PathBuf,
    pub event_format: EventFormat,
    pub url_mode: UrlMode,
    /// URLs are analysed when their distinct sharer count exceeds this.
    pub min_distinct_sharers: usize,
    /// Cascades strictly larger than this count as viral.
    pub viral_size: usize,
    /// Correlation considers users whose influence-degree exceeds this.
    pub influence_threshold: u64,
    /// Cut-off for the degree and influence rows of the top-k table.
    pub degree_threshold: u64,
    pub ccdf: CcdfConvention,
    pub workers: Option<usize>,
    pub seed: u64,
    pub target: Target,
    pub synth: SynthOptions,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            events: None,
            registry: None,
            scores: None,
            out: PathBuf::from("out"),
            event_format: EventFormat::Tsv,
            url_mode: UrlMode::Lenient,
            min_distinct_sharers: 100,
            viral_size: 1000,
            influence_threshold: 100,
            degree_threshold: 1000,
            ccdf: CcdfConvention::Geq,
            workers: None,
            seed: 42,
            target: Target::Graph,
            synth: SynthOptions::default(),
        }
    }
}

impl PipelineConfig {
    fn artifact(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn events_path(&self) -> Result<&Path> {
        let p = self.events.as_deref().ok_or_else(|| Error::Config("--events is required".into()))?;
        require(p)
    }

    fn registry_path(&self) -> Result<&Path> {
        let p = self.registry.as_deref().ok_or_else(|| Error::Config("--registry is required".into()))?;
        require(p)
    }
}

/// Run one stage inside a pool of `cfg.workers` threads (the global pool when
/// unset).
pub fn run(stage: Stage, cfg: &PipelineConfig) -> Result<()> {
    if cfg.workers == Some(0) {
        return Err(Error::Config("--workers must be at least 1".into()));
    }
    std::fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e))?;
    match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))?
            .install(|| dispatch(stage, cfg)),
        None => dispatch(stage, cfg),
    }
}

fn dispatch(stage: Stage, cfg: &PipelineConfig) -> Result<()> {
    match stage {
        Stage::Synth => synth(cfg),
        Stage::Build => build(cfg),
        Stage::Degrees => degrees(cfg),
        Stage::Components => components(cfg),
        Stage::Kcore => kcore(cfg).map(|_| ()),
        Stage::Region => region(cfg),
        Stage::Cascades => cascades(cfg),
        Stage::Virality => virality(cfg),
        Stage::Influence => influence(cfg),
        Stage::Ablate => ablate(cfg).map(|_| ()),
        Stage::Correlate => correlate(cfg),
        Stage::Topk => topk(cfg).map(|t| print!("{}", t.render())),
        Stage::Report => report(cfg),
    }
}

fn require(p: &Path) -> Result<&Path> {
    if p.exists() {
        Ok(p)
    } else {
        Err(Error::MissingArtifact(p.to_path_buf()))
    }
}

fn create(p: &Path) -> Result<BufWriter<File>> {
    File::create(p).map(BufWriter::new).map_err(|e| Error::io(p, e))
}

fn csv_out(p: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(create(p)?))
}

fn read_rows<T: for<'de> Deserialize<'de>>(p: &Path) -> Result<Vec<T>> {
    let file = File::open(require(p)?).map_err(|e| Error::io(p, e))?;
    let mut r = csv::Reader::from_reader(BufReader::new(file));
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Graph, troll-URLs and group tallies from one streaming pass over an event
/// log, without holding the parsed events.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub graph: InteractionMultigraph,
    pub troll_urls: TrollUrlSet,
    pub summary: GroupSummary,
    pub events: usize,
    pub skipped_lines: usize,
}

pub fn ingest_file(path: &Path, opts: ParseOptions, registry: &TrollRegistry) -> Result<Ingested> {
    let mut stream = open_event_stream(path, opts)?;
    let mut builder = GraphBuilder::new(registry);
    let mut tracker = ShareTracker::new();
    let mut events = 0usize;
    while let Some(chunk) = stream.next_chunk()? {
        events += chunk.len();
        for e in &chunk {
            let author = builder.push(e);
            if !e.urls.is_empty() {
                tracker.push(author, registry.contains(&e.author), e);
            }
        }
    }
    report_stream(path, &stream, events)?;
    let skipped_lines = stream.errors().len();
    drop(stream);
    let BuiltGraph { mut graph, remap, summary } = builder.finish();
    let (troll_urls, flags) = tracker.finish(&remap);
    graph.nodes_mut().set_spreaders(&flags);
    Ok(Ingested { graph, troll_urls, summary, events, skipped_lines })
}

fn report_stream<R: std::io::BufRead>(path: &Path, stream: &EventStream<R>, events: usize) -> Result<()> {
    if !stream.errors().is_empty() {
        log::warn!("{}: skipped {} malformed lines", path.display(), stream.errors().len());
    }
    if stream.repaired() > 0 {
        log::info!("{}: repaired {} records", path.display(), stream.repaired());
    }
    if events == 0 {
        return Err(Error::Data(format!("{}: no valid events", path.display())));
    }
    Ok(())
}

fn parse_options(cfg: &PipelineConfig) -> ParseOptions {
    ParseOptions { format: cfg.event_format, url_mode: cfg.url_mode }
}

fn load_graph(cfg: &PipelineConfig) -> Result<InteractionMultigraph> {
    snapshot_load_file(cfg.artifact(GRAPH_SNAPSHOT))
}

fn load_target(cfg: &PipelineConfig) -> Result<(InteractionMultigraph, &'static str)> {
    match cfg.target {
        Target::Graph => Ok((load_graph(cfg)?, "")),
        Target::Region => Ok((snapshot_load_file(cfg.artifact(REGION_SNAPSHOT))?, "region_")),
    }
}

fn node_of(g: &InteractionMultigraph, id: &str) -> Result<NodeId> {
    g.nodes().index(id).ok_or_else(|| Error::Data(format!("user {id:?} is not in the graph snapshot")))
}

fn write_ccdf<W: Write>(w: &mut csv::Writer<W>, key: &[&str], values: Vec<f64>, conv: CcdfConvention) -> Result<()> {
    let Ok(dist) = EmpiricalDistribution::new(values) else { return Ok(()) };
    for (x, p) in dist.ccdf_points(conv) {
        let mut rec: Vec<String> = key.iter().map(|s| s.to_string()).collect();
        rec.push(x.to_string());
        rec.push(p.to_string());
        w.write_record(&rec)?;
    }
    Ok(())
}

fn synth(cfg: &PipelineConfig) -> Result<()> {
    let o = &cfg.synth;
    if o.users < o.trolls {
        return Err(Error::Config("--users must be at least --trolls".into()));
    }
    if o.max_tree_size < 2 {
        return Err(Error::Config("--max-tree-size must be at least 2".into()));
    }
    let params = ScenarioParams {
        seed: cfg.seed,
        n_trolls: o.trolls,
        n_real: o.users - o.trolls,
        n_urls: o.urls,
        background_events: o.background_events,
        plan: CascadePlan::Random {
            trees_per_url: (1, 4),
            tree_size: (2, o.max_tree_size),
            singletons_per_url: 3,
            repeat_prob: 0.1,
        },
        ..ScenarioParams::default()
    };
    let files = write_scenario(&params, &cfg.out).map_err(|e| match e {
        Error::Infeasible(msg) => Error::Config(format!("infeasible scenario: {msg}")),
        other => other,
    })?;
    log::info!("wrote scenario to {}", files.events.display());
    Ok(())
}

fn build(cfg: &PipelineConfig) -> Result<()> {
    let registry = load_troll_registry_file(cfg.registry_path()?)?;
    let ing = ingest_file(cfg.events_path()?, parse_options(cfg), &registry)?;
    snapshot_save_file(&ing.graph, cfg.artifact(GRAPH_SNAPSHOT))?;
    let mut w = create(&cfg.artifact(TROLL_URLS))?;
    ing.troll_urls.write_csv(&mut w)?;
    w.flush()?;
    write_group_tables(cfg, &ing.summary, &ing.graph)?;
    log::info!(
        "graph: {} nodes, {} edges, {} troll-URLs",
        ing.graph.node_count(),
        ing.graph.edge_count(),
        ing.troll_urls.len()
    );
    Ok(())
}

fn write_group_tables(cfg: &PipelineConfig, summary: &GroupSummary, g: &InteractionMultigraph) -> Result<()> {
    let mut w = create(&cfg.artifact("group_summary.csv"))?;
    write_group_summary_csv(summary, &mut w)?;
    w.flush()?;

    let mut counts = [[0u64; 2]; 3];
    for l in g.nodes().labels() {
        let i = BaseGroup::ALL.iter().position(|&b| b == l.base).unwrap();
        counts[i][0] += 1;
        counts[i][1] += l.spreader as u64;
    }
    let mut w = csv_out(&cfg.artifact("group_counts.csv"))?;
    w.write_record(["group", "users", "spreaders"])?;
    for (b, c) in BaseGroup::ALL.iter().zip(counts) {
        w.write_record([b.as_str(), &c[0].to_string(), &c[1].to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn degrees(cfg: &PipelineConfig) -> Result<()> {
    let g = load_graph(cfg)?;
    let simple = SimpleDigraph::from_multigraph(&g);
    let records = degree_profile(&g, &simple);
    let mut w = create(&cfg.artifact("degrees.csv"))?;
    write_degree_csv(&g, &records, &mut w)?;
    w.flush()?;

    let mut w = csv_out(&cfg.artifact("degree_ccdf.csv"))?;
    w.write_record(["group", "measure", "value", "ccdf"])?;
    for base in BaseGroup::ALL {
        let members: Vec<_> = records.iter().filter(|r| g.nodes().label(r.node).base == base).collect();
        let measures: [(&str, fn(&crate::graph::DegreeRecord) -> u64); 4] = [
            ("in_multi", |r| r.in_multi),
            ("out_multi", |r| r.out_multi),
            ("in_simple", |r| r.in_simple),
            ("out_simple", |r| r.out_simple),
        ];
        for (name, f) in measures {
            let values = members.iter().map(|r| f(r) as f64).collect();
            write_ccdf(&mut w, &[base.as_str(), name], values, cfg.ccdf)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn components(cfg: &PipelineConfig) -> Result<()> {
    let (g, prefix) = load_target(cfg)?;
    let und = UndirectedGraph::from_simple(&SimpleDigraph::from_multigraph(&g));
    let comps = connected_components(&und);
    let mut w = csv_out(&cfg.artifact(&format!("{prefix}component_sizes.csv")))?;
    w.write_record(["size", "count"])?;
    for (size, count) in comps.histogram() {
        w.write_record([size.to_string(), count.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CorenessRow {
    user: String,
    component_id: u32,
    coreness: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct KcoreSummary {
    pub nodes: usize,
    pub largest_component_nodes: usize,
    pub largest_component_edges: usize,
    pub max_coreness: u32,
    pub max_core_nodes: usize,
    pub max_core_trolls: usize,
    pub max_core_ego_net: usize,
}

/// Coreness of every node. Peeling is component-local, so values computed
/// on the whole graph equal those computed on the largest component alone.
fn kcore(cfg: &PipelineConfig) -> Result<KcoreSummary> {
    let (g, prefix) = load_target(cfg)?;
    let und = UndirectedGraph::from_simple(&SimpleDigraph::from_multigraph(&g));
    let comps = connected_components(&und);
    let core = k_core_decomposition(&und);

    let mut w = csv_out(&cfg.artifact(&format!("{prefix}coreness.csv")))?;
    for v in 0..g.node_count() {
        w.serialize(CorenessRow {
            user: g.nodes().id(v as NodeId).to_string(),
            component_id: comps.component[v],
            coreness: core.coreness[v],
        })?;
    }
    w.flush()?;

    let largest = comps.largest();
    let in_lcc = |v: usize| Some(comps.component[v]) == largest;
    let members = core.max_core_members();
    let count_base = |b: BaseGroup| members.iter().filter(|&&v| g.nodes().label(v).base == b).count();
    let summary = KcoreSummary {
        nodes: g.node_count(),
        largest_component_nodes: largest.map_or(0, |c| comps.sizes[c as usize]),
        largest_component_edges: und.edges().filter(|&(a, _)| in_lcc(a as usize)).count(),
        max_coreness: core.max(),
        max_core_nodes: members.len(),
        max_core_trolls: count_base(BaseGroup::Troll),
        max_core_ego_net: count_base(BaseGroup::EgoNet),
    };
    let mut w = csv_out(&cfg.artifact(&format!("{prefix}kcore_summary.csv")))?;
    w.write_record(["metric", "value"])?;
    for (k, v) in [
        ("nodes", summary.nodes),
        ("largest_component_nodes", summary.largest_component_nodes),
        ("largest_component_edges", summary.largest_component_edges),
        ("max_coreness", summary.max_coreness as usize),
        ("max_core_nodes", summary.max_core_nodes),
        ("max_core_trolls", summary.max_core_trolls),
        ("max_core_ego_net", summary.max_core_ego_net),
    ] {
        w.write_record([k.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(summary)
}

fn region(cfg: &PipelineConfig) -> Result<()> {
    let g = load_graph(cfg)?;
    let flags: Vec<bool> = g.nodes().labels().iter().map(|l| l.spreader).collect();
    let region = induced_subgraph(&SimpleDigraph::from_multigraph(&g), &flags);
    snapshot_save_file(&region.to_multigraph(g.nodes()), cfg.artifact(REGION_SNAPSHOT))?;
    let mut w = csv_out(&cfg.artifact("region_counts.csv"))?;
    w.write_record(["group", "spreaders"])?;
    for (b, c) in BaseGroup::ALL.iter().zip(region.group_counts(g.nodes())) {
        w.write_record([b.as_str(), &c.to_string()])?;
    }
    w.write_record(["edges", &region.edge_count().to_string()])?;
    w.flush()?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct TrollUrlRow {
    url: NormalizedUrl,
}

/// Diffusion lists of troll-URLs with enough distinct sharers, gathered in
/// one pass over the event log.
fn analysed_lists(cfg: &PipelineConfig, g: &InteractionMultigraph) -> Result<Vec<DiffusionList>> {
    let urls: BTreeSet<NormalizedUrl> =
        read_rows::<TrollUrlRow>(&cfg.artifact(TROLL_URLS))?.into_iter().map(|r| r.url).collect();
    let path = cfg.events_path()?;
    let mut stream = open_event_stream(path, parse_options(cfg))?;
    let mut collector = DiffusionCollector::new(g.nodes(), &urls);
    let mut events = 0;
    while let Some(chunk) = stream.next_chunk()? {
        events += chunk.len();
        collector.push(&chunk);
    }
    report_stream(path, &stream, events)?;
    let lists: Vec<DiffusionList> = collector
        .finish()
        .into_values()
        .filter(|l| l.distinct_user_count() > cfg.min_distinct_sharers)
        .collect();
    log::info!(
        "{} of {} troll-URLs have more than {} distinct sharers",
        lists.len(),
        urls.len(),
        cfg.min_distinct_sharers
    );
    Ok(lists)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TreeRow {
    url: NormalizedUrl,
    tree_id: usize,
    root: String,
    size: usize,
    virality: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EdgeRow {
    url: NormalizedUrl,
    parent: String,
    child: String,
}

fn tree_rows(g: &InteractionMultigraph, forests: &[CascadeForest]) -> Vec<TreeRow> {
    forests
        .iter()
        .flat_map(|f| {
            extract_trees(f).into_iter().enumerate().map(move |(k, t)| TreeRow {
                url: f.url.clone(),
                tree_id: k,
                root: g.nodes().id(t.root()).to_string(),
                size: t.size(),
                virality: structural_virality(&t).expect("trees have at least two nodes"),
            })
        })
        .collect()
}

fn cascades(cfg: &PipelineConfig) -> Result<()> {
    let g = load_graph(cfg)?;
    let lists = analysed_lists(cfg, &g)?;
    let simple = SimpleDigraph::from_multigraph(&g);
    let refs: Vec<&DiffusionList> = lists.iter().collect();
    let forests = infer_all(&refs, &simple);

    let mut w = csv_out(&cfg.artifact(CASCADE_TREES))?;
    for row in tree_rows(&g, &forests) {
        w.serialize(row)?;
    }
    w.flush()?;

    let mut w = csv_out(&cfg.artifact(CASCADE_EDGES))?;
    w.write_record(["url", "parent", "child"])?;
    for f in &forests {
        for (p, c) in f.influence_edges() {
            w.write_record([f.url.as_str(), g.nodes().id(p), g.nodes().id(c)])?;
        }
    }
    w.flush()?;

    let mut w = csv_out(&cfg.artifact("first_appearance.csv"))?;
    w.write_record(["url", "user", "group", "relative_first_appearance"])?;
    for l in &lists {
        for (u, _) in l.first_shares() {
            let r = relative_first_appearance(l, u)?;
            w.write_record([l.url.as_str(), g.nodes().id(u), g.nodes().label(u).base.as_str(), &r.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn virality(cfg: &PipelineConfig) -> Result<()> {
    let rows: Vec<TreeRow> = read_rows(&cfg.artifact(CASCADE_TREES))?;
    let mut w = csv_out(&cfg.artifact("virality_ccdf.csv"))?;
    w.write_record(["trees", "virality", "ccdf"])?;
    write_ccdf(&mut w, &["all"], rows.iter().map(|r| r.virality).collect(), cfg.ccdf)?;
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InfluenceRow {
    user: String,
    group: String,
    influence_degree: u64,
}

/// Cascades rooted at each node, all and viral, read from the tree table.
fn initiator_counts(cfg: &PipelineConfig, g: &InteractionMultigraph) -> Result<InitiatorCounts> {
    let n = g.node_count();
    let mut cascades = vec![0u64; n];
    let mut viral = vec![0u64; n];
    for t in read_rows::<TreeRow>(&cfg.artifact(CASCADE_TREES))? {
        let r = node_of(g, &t.root)? as usize;
        cascades[r] += 1;
        viral[r] += (t.size > cfg.viral_size) as u64;
    }
    Ok(InitiatorCounts { cascades, viral, viral_threshold: cfg.viral_size })
}

fn influence(cfg: &PipelineConfig) -> Result<()> {
    let g = load_graph(cfg)?;
    let mut infl = vec![0u64; g.node_count()];
    for e in read_rows::<EdgeRow>(&cfg.artifact(CASCADE_EDGES))? {
        infl[node_of(&g, &e.parent)? as usize] += 1;
    }
    let InitiatorCounts { cascades, viral, .. } = initiator_counts(cfg, &g)?;
    let spreaders: Vec<NodeId> =
        (0..g.node_count() as NodeId).filter(|&v| g.nodes().label(v).spreader).collect();

    let mut w = csv_out(&cfg.artifact(INFLUENCE))?;
    for &v in &spreaders {
        w.serialize(InfluenceRow {
            user: g.nodes().id(v).to_string(),
            group: g.nodes().label(v).base.as_str().to_string(),
            influence_degree: infl[v as usize],
        })?;
    }
    w.flush()?;

    let mut w = csv_out(&cfg.artifact("influence_ccdf.csv"))?;
    w.write_record(["group", "influence_degree", "ccdf"])?;
    for base in BaseGroup::ALL {
        let values =
            spreaders.iter().filter(|&&v| g.nodes().label(v).base == base).map(|&v| infl[v as usize] as f64).collect();
        write_ccdf(&mut w, &[base.as_str()], values, cfg.ccdf)?;
    }
    w.flush()?;

    let mut w = csv_out(&cfg.artifact("initiators.csv"))?;
    w.write_record(["user", "group", "cascades", &format!("cascades_size_gt_{}", cfg.viral_size)])?;
    for v in (0..g.node_count()).filter(|&v| cascades[v] > 0) {
        w.write_record([
            g.nodes().id(v as NodeId),
            g.nodes().label(v as NodeId).base.as_str(),
            &cascades[v].to_string(),
            &viral[v].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct AblationSummary {
    pub trees_before: usize,
    pub trees_after: usize,
    pub max_cdf_gap: Option<f64>,
}

fn ablate(cfg: &PipelineConfig) -> Result<AblationSummary> {
    let g = load_graph(cfg)?;
    let lists = analysed_lists(cfg, &g)?;
    let simple = SimpleDigraph::from_multigraph(&g);
    let refs: Vec<&DiffusionList> = lists.iter().collect();
    let before = infer_all(&refs, &simple);
    let ablation = ablate_trolls(&refs, &simple, g.nodes(), &before);

    let mut w = csv_out(&cfg.artifact("ablation.csv"))?;
    w.write_record(["url", "tree_id", "root", "size", "virality", "ablated"])?;
    for (forests, ablated) in [(&before, "false"), (&ablation.forests, "true")] {
        for r in tree_rows(&g, forests) {
            w.write_record([
                r.url.as_str(),
                &r.tree_id.to_string(),
                &r.root,
                &r.size.to_string(),
                &r.virality.to_string(),
                ablated,
            ])?;
        }
    }
    w.flush()?;

    let rep = &ablation.report;
    let summary =
        AblationSummary { trees_before: rep.trees_before, trees_after: rep.trees_after, max_cdf_gap: rep.max_cdf_gap };
    let mut w = csv_out(&cfg.artifact("ablation_summary.csv"))?;
    w.write_record(["metric", "value"])?;
    w.write_record(["trees_before", &rep.trees_before.to_string()])?;
    w.write_record(["trees_after", &rep.trees_after.to_string()])?;
    w.write_record(["max_virality_cdf_gap", &rep.max_cdf_gap.map_or("NA".into(), |x| x.to_string())])?;
    w.flush()?;
    Ok(summary)
}

/// Scores against influence-degree for ego-net spreaders. An undefined
/// correlation (too few users) is written as `NA` rather than failing.
fn correlate(cfg: &PipelineConfig) -> Result<()> {
    let scores_path = cfg.scores.as_deref().ok_or_else(|| Error::Config("--scores is required".into()))?;
    let scores = ScoreTable::from_csv(File::open(require(scores_path)?).map_err(|e| Error::io(scores_path, e))?)?;
    let rows: Vec<InfluenceRow> = read_rows(&cfg.artifact(INFLUENCE))?;
    let candidates = rows
        .iter()
        .filter(|r| r.group == BaseGroup::EgoNet.as_str())
        .map(|r| (r.user.as_str(), r.influence_degree));

    let mut w = csv_out(&cfg.artifact("correlation.csv"))?;
    w.write_record(["method", "coefficient", "p_value", "n"])?;
    let mut pairs = Vec::new();
    match correlate_scores(&scores, candidates, cfg.influence_threshold) {
        Ok(report) => {
            for (name, c) in [("pearson", &report.pearson), ("spearman", &report.spearman)] {
                match c {
                    Ok(c) => w.write_record([name, &c.coefficient.to_string(), &c.p_value.to_string(), &c.n.to_string()])?,
                    Err(e) => {
                        log::warn!("{name} correlation undefined: {e}");
                        w.write_record([name, "NA", "NA", &report.n.to_string()])?
                    }
                }
            }
            pairs = report.pairs;
        }
        Err(Error::Undefined(why)) => {
            log::warn!("correlation undefined: {why}");
            for name in ["pearson", "spearman"] {
                w.write_record([name, "NA", "NA", "0"])?;
            }
        }
        Err(e) => return Err(e),
    }
    w.flush()?;

    let mut w = csv_out(&cfg.artifact("correlation_pairs.csv"))?;
    w.write_record(["user", "score", "influence_degree"])?;
    for (u, s, i) in pairs {
        w.write_record([u, s.to_string(), i.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn topk(cfg: &PipelineConfig) -> Result<crate::stats::TopkTable> {
    let g = load_graph(cfg)?;
    let simple = SimpleDigraph::from_multigraph(&g);
    let degrees = degree_profile(&g, &simple);

    let mut coreness = vec![0u32; g.node_count()];
    for r in read_rows::<CorenessRow>(&cfg.artifact(CORENESS))? {
        coreness[node_of(&g, &r.user)? as usize] = r.coreness;
    }
    let coreness = CorenessMap { coreness };
    let mut infl = vec![0u64; g.node_count()];
    for r in read_rows::<InfluenceRow>(&cfg.artifact(INFLUENCE))? {
        infl[node_of(&g, &r.user)? as usize] = r.influence_degree;
    }
    let initiators = initiator_counts(cfg, &g)?;

    let table = topk_summary(
        TopkInputs {
            labels: Some(g.nodes().labels()),
            degrees: Some(&degrees),
            coreness: Some(&coreness),
            initiators: Some(&initiators),
            influence: Some(&infl),
        },
        TopkThresholds {
            in_degree: cfg.degree_threshold,
            out_degree: cfg.degree_threshold,
            viral_size: cfg.viral_size,
            influence: cfg.degree_threshold,
        },
    )?;
    let mut w = create(&cfg.artifact("topk.csv"))?;
    table.write_csv(&mut w)?;
    w.flush()?;
    Ok(table)
}

#[derive(Debug, Serialize)]
struct ReportSummary {
    nodes: usize,
    edges: usize,
    simple_edges: usize,
    groups: BTreeMap<&'static str, usize>,
    spreaders: usize,
    analysed_urls: usize,
    cascade_trees: usize,
    influence_edges: usize,
    max_tree_size: usize,
    kcore: KcoreSummary,
    ablation: AblationSummary,
    correlation: bool,
    thresholds: BTreeMap<&'static str, u64>,
}

/// Run every analysis stage after `build` and write a JSON summary.
fn report(cfg: &PipelineConfig) -> Result<()> {
    let graph_cfg = PipelineConfig { target: Target::Graph, ..cfg.clone() };
    let cfg = &graph_cfg;
    let g = load_graph(cfg)?;
    require(&cfg.artifact(TROLL_URLS))?;
    cfg.events_path()?;

    degrees(cfg)?;
    components(cfg)?;
    let kcore_summary = kcore(cfg)?;
    region(cfg)?;
    let region_cfg = PipelineConfig { target: Target::Region, ..cfg.clone() };
    components(&region_cfg)?;
    kcore(&region_cfg)?;
    cascades(cfg)?;
    virality(cfg)?;
    influence(cfg)?;
    let ablation = ablate(cfg)?;
    if cfg.scores.is_some() {
        correlate(cfg)?;
    }
    let table = topk(cfg)?;

    let trees: Vec<TreeRow> = read_rows(&cfg.artifact(CASCADE_TREES))?;
    let mut groups = BTreeMap::new();
    for l in g.nodes().labels() {
        *groups.entry(l.base.as_str()).or_insert(0) += 1;
    }
    let summary = ReportSummary {
        nodes: g.node_count(),
        edges: g.edge_count(),
        simple_edges: SimpleDigraph::from_multigraph(&g).edge_count(),
        groups,
        spreaders: g.nodes().labels().iter().filter(|l| l.spreader).count(),
        analysed_urls: trees.iter().map(|t| &t.url).collect::<BTreeSet<_>>().len(),
        cascade_trees: trees.len(),
        influence_edges: trees.iter().map(|t| t.size - 1).sum(),
        max_tree_size: trees.iter().map(|t| t.size).max().unwrap_or(0),
        kcore: kcore_summary,
        ablation,
        correlation: cfg.scores.is_some(),
        thresholds: BTreeMap::from([
            ("min_distinct_sharers", cfg.min_distinct_sharers as u64),
            ("viral_size", cfg.viral_size as u64),
            ("influence", cfg.influence_threshold),
            ("degree", cfg.degree_threshold),
        ]),
    };
    let mut w = create(&cfg.artifact("summary.json"))?;
    serde_json::to_writer_pretty(&mut w, &summary).map_err(|e| Error::Data(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    print!("{}", table.render());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario_cfg(dir: &Path) -> PipelineConfig {
        PipelineConfig {
            events: Some(dir.join("events.tsv")),
            registry: Some(dir.join("registry.txt")),
            scores: Some(dir.join("scores.csv")),
            out: dir.to_path_buf(),
            min_distinct_sharers: 10,
            influence_threshold: 2,
            synth: SynthOptions { users: 800, trolls: 8, urls: 10, background_events: 3_000, max_tree_size: 40 },
            ..PipelineConfig::default()
        }
    }

    #[test]
    fn stage_before_build_names_missing_snapshot() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = scenario_cfg(dir.path());
        match run(Stage::Cascades, &cfg) {
            Err(Error::MissingArtifact(p)) => assert!(p.ends_with(GRAPH_SNAPSHOT)),
            other => panic!("expected missing artifact, got {other:?}"),
        }
    }

    #[test]
    fn full_run_produces_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = scenario_cfg(dir.path());
        for s in [Stage::Synth, Stage::Build, Stage::Report] {
            run(s, &cfg).unwrap();
        }
        for f in [CASCADE_TREES, CASCADE_EDGES, INFLUENCE, CORENESS, "topk.csv", "ablation.csv", "summary.json"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let trees: Vec<TreeRow> = read_rows(&dir.path().join(CASCADE_TREES)).unwrap();
        assert!(!trees.is_empty());
        let infl: Vec<InfluenceRow> = read_rows(&dir.path().join(INFLUENCE)).unwrap();
        let total: u64 = infl.iter().map(|r| r.influence_degree).sum();
        assert_eq!(total as usize, trees.iter().map(|t| t.size - 1).sum::<usize>());
    }

    #[test]
    fn zero_workers_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PipelineConfig { workers: Some(0), ..scenario_cfg(dir.path()) };
        assert!(matches!(run(Stage::Build, &cfg), Err(Error::Config(_))));
    }
}
