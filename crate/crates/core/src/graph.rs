//! Interaction multigraph, its simple and undirected projections, degree
//! profiles and the binary snapshot format.
//!
//! Node indices are dense and assigned in ascending user-id order, so
//! comparing two [`NodeId`]s orders the corresponding user ids.

use std::collections::HashMap;
use std::io::{Read, Write};

use rayon::prelude::*;

use crate::error::{Error, Result, SnapshotError};
use crate::ingest::{ActionEvent, TrollRegistry};

pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseGroup {
    Troll,
    EgoNet,
    Other,
}

impl BaseGroup {
    pub const ALL: [BaseGroup; 3] = [BaseGroup::Troll, BaseGroup::EgoNet, BaseGroup::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            BaseGroup::Troll => "troll",
            BaseGroup::EgoNet => "ego_net",
            BaseGroup::Other => "other",
        }
    }

    pub fn is_troll(self) -> bool {
        self == BaseGroup::Troll
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupLabel {
    pub base: BaseGroup,
    pub spreader: bool,
}

const SPREADER_BIT: u8 = 0x80;

impl GroupLabel {
    pub fn to_byte(self) -> u8 {
        let base = match self.base {
            BaseGroup::Troll => 0,
            BaseGroup::EgoNet => 1,
            BaseGroup::Other => 2,
        };
        if self.spreader {
            base | SPREADER_BIT
        } else {
            base
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        let base = match b & !SPREADER_BIT {
            0 => BaseGroup::Troll,
            1 => BaseGroup::EgoNet,
            2 => BaseGroup::Other,
            _ => return None,
        };
        Some(GroupLabel { base, spreader: b & SPREADER_BIT != 0 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    Reply,
    Mention,
}

impl EdgeKind {
    fn to_byte(self) -> u8 {
        match self {
            EdgeKind::Reply => 0,
            EdgeKind::Mention => 1,
        }
    }

    fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(EdgeKind::Reply),
            1 => Some(EdgeKind::Mention),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub ts: i64,
    pub kind: EdgeKind,
}

/// Dense index <-> user-id table with one group label per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeTable {
    ids: Vec<String>,
    lookup: HashMap<String, NodeId>,
    labels: Vec<GroupLabel>,
}

impl NodeTable {
    fn from_sorted(ids: Vec<String>, labels: Vec<GroupLabel>) -> Self {
        let lookup = ids.iter().enumerate().map(|(i, s)| (s.clone(), i as NodeId)).collect();
        NodeTable { ids, lookup, labels }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, node: NodeId) -> &str {
        &self.ids[node as usize]
    }

    pub fn index(&self, id: &str) -> Option<NodeId> {
        self.lookup.get(id).copied()
    }

    pub fn label(&self, node: NodeId) -> GroupLabel {
        self.labels[node as usize]
    }

    pub fn labels(&self) -> &[GroupLabel] {
        &self.labels
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn is_troll(&self, node: NodeId) -> bool {
        self.labels[node as usize].base.is_troll()
    }

    /// Overwrite the spreader flag of every node.
    pub fn set_spreaders(&mut self, flags: &[bool]) {
        assert_eq!(flags.len(), self.labels.len(), "one spreader flag per node");
        for (label, &f) in self.labels.iter_mut().zip(flags) {
            label.spreader = f;
        }
    }
}

/// Directed multigraph of timestamped reply/mention interactions.
///
/// Edges are stored flat, sorted by `(src, ts, dst, kind)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionMultigraph {
    nodes: NodeTable,
    edges: Vec<Edge>,
}

impl InteractionMultigraph {
    /// One reply edge per reply and one mention edge per mentioned user;
    /// every author and every interaction target becomes a node.
    pub fn build(events: &[ActionEvent], registry: &TrollRegistry) -> Self {
        let mut ids: Vec<&str> = events
            .par_iter()
            .flat_map_iter(|e| {
                std::iter::once(e.author.as_str())
                    .chain(e.reply_to.as_deref())
                    .chain(e.mentions.iter().map(String::as_str))
            })
            .collect();
        ids.par_sort_unstable();
        ids.dedup();
        let lookup: HashMap<&str, NodeId> =
            ids.iter().enumerate().map(|(i, s)| (*s, i as NodeId)).collect();

        let mut edges: Vec<Edge> = events
            .par_iter()
            .flat_map_iter(|e| {
                let src = lookup[e.author.as_str()];
                let reply = e.reply_to.as_deref().map(|r| Edge {
                    src,
                    dst: lookup[r],
                    ts: e.ts,
                    kind: EdgeKind::Reply,
                });
                let lookup = &lookup;
                reply.into_iter().chain(e.mentions.iter().map(move |m| Edge {
                    src,
                    dst: lookup[m.as_str()],
                    ts: e.ts,
                    kind: EdgeKind::Mention,
                }))
            })
            .filter(|e| e.src != e.dst)
            .collect();
        edges.par_sort_unstable_by_key(|e| (e.src, e.ts, e.dst, e.kind));

        let ids: Vec<String> = ids.into_iter().map(str::to_string).collect();
        let labels = assign_labels(&ids, &edges, registry);
        InteractionMultigraph { nodes: NodeTable::from_sorted(ids, labels), edges }
    }

    /// Assemble a graph from raw parts (used when loading snapshots). Ids must
    /// be strictly ascending and edges must reference valid, distinct nodes.
    pub fn from_parts(ids: Vec<String>, labels: Vec<GroupLabel>, mut edges: Vec<Edge>) -> Result<Self> {
        if ids.len() != labels.len() {
            return Err(Error::Data("one label per node required".into()));
        }
        if let Some(w) = ids.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Data(format!("node ids not strictly ascending at {:?}", w[1])));
        }
        let n = ids.len() as u64;
        for e in &edges {
            if e.src as u64 >= n || e.dst as u64 >= n || e.src == e.dst || e.ts < 0 {
                return Err(Error::Data(format!("invalid edge {e:?}")));
            }
        }
        edges.par_sort_unstable_by_key(|e| (e.src, e.ts, e.dst, e.kind));
        Ok(InteractionMultigraph { nodes: NodeTable::from_sorted(ids, labels), edges })
    }

    pub fn nodes(&self) -> &NodeTable {
        &self.nodes
    }

    pub fn nodes_mut(&mut self) -> &mut NodeTable {
        &mut self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Order-sensitive 64-bit FNV-1a digest over node ids, labels and edges.
    pub fn structural_digest(&self) -> u64 {
        let mut h = Fnv64::new();
        h.write(&(self.node_count() as u64).to_le_bytes());
        for (id, label) in self.nodes.ids.iter().zip(&self.nodes.labels) {
            h.write(&(id.len() as u32).to_le_bytes());
            h.write(id.as_bytes());
            h.write(&[label.to_byte()]);
        }
        for e in &self.edges {
            h.write(&(e.src as u64).to_le_bytes());
            h.write(&(e.dst as u64).to_le_bytes());
            h.write(&e.ts.to_le_bytes());
            h.write(&[e.kind.to_byte()]);
        }
        h.finish()
    }
}

/// Incremental multigraph construction over batches of events, for logs too
/// large to hold in memory. Ids are interned in arrival order and remapped
/// to ascending-id order by [`GraphBuilder::finish`].
pub struct GraphBuilder<'r> {
    registry: &'r TrollRegistry,
    lookup: HashMap<Box<str>, NodeId>,
    names: Vec<Box<str>>,
    edges: Vec<Edge>,
    summary: GroupSummary,
}

/// Output of [`GraphBuilder::finish`].
#[derive(Debug, Clone)]
pub struct BuiltGraph {
    pub graph: InteractionMultigraph,
    /// provisional id (as returned by `push`/`intern`) -> final node index
    pub remap: Vec<NodeId>,
    pub summary: GroupSummary,
}

impl<'r> GraphBuilder<'r> {
    pub fn new(registry: &'r TrollRegistry) -> Self {
        GraphBuilder {
            registry,
            lookup: HashMap::new(),
            names: Vec::new(),
            edges: Vec::new(),
            summary: GroupSummary::default(),
        }
    }

    /// Provisional id of a user, registering it as a node if new.
    pub fn intern(&mut self, id: &str) -> NodeId {
        if let Some(&v) = self.lookup.get(id) {
            return v;
        }
        let v = self.names.len() as NodeId;
        self.names.push(id.into());
        self.lookup.insert(id.into(), v);
        v
    }

    /// Add one event; returns the author's provisional id.
    pub fn push(&mut self, e: &ActionEvent) -> NodeId {
        let src = self.intern(&e.author);
        self.summary.tally_event(self.registry.contains(&e.author), e);
        if let Some(r) = e.reply_to.as_deref() {
            let dst = self.intern(r);
            if dst != src {
                self.edges.push(Edge { src, dst, ts: e.ts, kind: EdgeKind::Reply });
            }
        }
        for m in &e.mentions {
            let dst = self.intern(m);
            if dst != src {
                self.edges.push(Edge { src, dst, ts: e.ts, kind: EdgeKind::Mention });
            }
        }
        src
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn finish(self) -> BuiltGraph {
        let GraphBuilder { registry, lookup, names, mut edges, mut summary } = self;
        drop(lookup);
        let mut order: Vec<NodeId> = (0..names.len() as NodeId).collect();
        order.par_sort_unstable_by(|&a, &b| names[a as usize].cmp(&names[b as usize]));
        let mut remap = vec![0 as NodeId; names.len()];
        for (rank, &prov) in order.iter().enumerate() {
            remap[prov as usize] = rank as NodeId;
        }
        edges.par_iter_mut().for_each(|e| {
            e.src = remap[e.src as usize];
            e.dst = remap[e.dst as usize];
        });
        edges.par_sort_unstable_by_key(|e| (e.src, e.ts, e.dst, e.kind));
        let mut names: Vec<Option<Box<str>>> = names.into_iter().map(Some).collect();
        let ids: Vec<String> = order.iter().map(|&p| names[p as usize].take().unwrap().into_string()).collect();
        drop(names);
        let labels = assign_labels(&ids, &edges, registry);
        let graph = InteractionMultigraph { nodes: NodeTable::from_sorted(ids, labels), edges };
        summary.tally_graph(&graph);
        BuiltGraph { graph, remap, summary }
    }
}

fn assign_labels(ids: &[String], edges: &[Edge], registry: &TrollRegistry) -> Vec<GroupLabel> {
    let troll: Vec<bool> = ids.par_iter().map(|id| registry.contains(id)).collect();
    let mut touches_troll = vec![false; ids.len()];
    for e in edges {
        let (s, d) = (e.src as usize, e.dst as usize);
        if troll[s] {
            touches_troll[d] = true;
        }
        if troll[d] {
            touches_troll[s] = true;
        }
    }
    troll
        .iter()
        .zip(&touches_troll)
        .map(|(&t, &near)| GroupLabel {
            base: if t {
                BaseGroup::Troll
            } else if near {
                BaseGroup::EgoNet
            } else {
                BaseGroup::Other
            },
            spreader: false,
        })
        .collect()
}

struct Fnv64(u64);

impl Fnv64 {
    fn new() -> Self {
        Fnv64(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

/// Directed simple graph in CSR form. Each edge keeps the earliest timestamp
/// (and the kind of that earliest interaction) among the parallel edges it
/// collapses. Neighbour lists are sorted by target index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleDigraph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    first_ts: Vec<i64>,
    first_kind: Vec<EdgeKind>,
}

impl SimpleDigraph {
    pub fn from_multigraph(g: &InteractionMultigraph) -> Self {
        Self::from_edges(g.node_count(), g.edges().iter().copied())
    }

    /// Build from arbitrary (possibly parallel) edges over `node_count` nodes.
    /// Self-loops are dropped.
    pub fn from_edges(node_count: usize, edges: impl IntoIterator<Item = Edge>) -> Self {
        let mut edges: Vec<Edge> = edges.into_iter().filter(|e| e.src != e.dst).collect();
        edges.par_sort_unstable_by_key(|e| (e.src, e.dst, e.ts, e.kind));
        edges.dedup_by_key(|e| (e.src, e.dst));

        let mut offsets = vec![0usize; node_count + 1];
        for e in &edges {
            offsets[e.src as usize + 1] += 1;
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        SimpleDigraph {
            offsets,
            targets: edges.iter().map(|e| e.dst).collect(),
            first_ts: edges.iter().map(|e| e.ts).collect(),
            first_kind: edges.iter().map(|e| e.kind).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// `(target, first_ts)` pairs for the out-edges of `v`.
    pub fn out_edges(&self, v: NodeId) -> impl Iterator<Item = (NodeId, i64)> + '_ {
        let r = self.offsets[v as usize]..self.offsets[v as usize + 1];
        self.targets[r.clone()].iter().copied().zip(self.first_ts[r].iter().copied())
    }

    /// Earliest timestamp of an interaction `src -> dst`, if any.
    pub fn first_ts(&self, src: NodeId, dst: NodeId) -> Option<i64> {
        let start = self.offsets[src as usize];
        self.out_neighbors(src)
            .binary_search(&dst)
            .ok()
            .map(|i| self.first_ts[start + i])
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.node_count()).flat_map(move |v| {
            (self.offsets[v]..self.offsets[v + 1]).map(move |i| Edge {
                src: v as NodeId,
                dst: self.targets[i],
                ts: self.first_ts[i],
                kind: self.first_kind[i],
            })
        })
    }

    pub fn in_degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.node_count()];
        for &t in &self.targets {
            deg[t as usize] += 1;
        }
        deg
    }

    /// Same index space, keeping only edges whose endpoints are both kept.
    pub fn retain_nodes(&self, keep: &[bool]) -> SimpleDigraph {
        assert_eq!(keep.len(), self.node_count());
        SimpleDigraph::from_edges(
            self.node_count(),
            self.edges().filter(|e| keep[e.src as usize] && keep[e.dst as usize]),
        )
    }
}

/// Undirected simple graph in CSR form with sorted adjacency and no loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    offsets: Vec<usize>,
    adj: Vec<NodeId>,
}

impl UndirectedGraph {
    /// `{i, j}` is present iff `i -> j` or `j -> i` is.
    pub fn from_simple(g: &SimpleDigraph) -> Self {
        Self::from_pairs(g.node_count(), g.edges().map(|e| (e.src, e.dst)))
    }

    pub fn from_pairs(node_count: usize, pairs: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        let mut half: Vec<(NodeId, NodeId)> = pairs
            .into_iter()
            .filter(|(a, b)| a != b)
            .flat_map(|(a, b)| [(a, b), (b, a)])
            .collect();
        half.par_sort_unstable();
        half.dedup();
        let mut offsets = vec![0usize; node_count + 1];
        for &(a, _) in &half {
            offsets[a as usize + 1] += 1;
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        UndirectedGraph { offsets, adj: half.into_iter().map(|(_, b)| b).collect() }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.adj.len() / 2
    }

    pub fn degree(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count() as NodeId)
            .flat_map(move |v| self.neighbors(v).iter().filter(move |&&u| v < u).map(move |&u| (v, u)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeRecord {
    pub node: NodeId,
    pub in_multi: u64,
    pub out_multi: u64,
    pub in_simple: u64,
    pub out_simple: u64,
}

/// Per-node in/out degrees in the multigraph and its simple projection.
pub fn degree_profile(g: &InteractionMultigraph, simple: &SimpleDigraph) -> Vec<DegreeRecord> {
    let n = g.node_count();
    let mut in_multi = vec![0u64; n];
    let mut out_multi = vec![0u64; n];
    for e in g.edges() {
        out_multi[e.src as usize] += 1;
        in_multi[e.dst as usize] += 1;
    }
    let in_simple = simple.in_degrees();
    (0..n)
        .map(|v| DegreeRecord {
            node: v as NodeId,
            in_multi: in_multi[v],
            out_multi: out_multi[v],
            in_simple: in_simple[v],
            out_simple: simple.out_degree(v as NodeId) as u64,
        })
        .collect()
}

pub fn write_degree_csv<W: Write>(g: &InteractionMultigraph, records: &[DegreeRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["user", "group", "spreader", "in_multi", "out_multi", "in_simple", "out_simple"])?;
    for r in records {
        let label = g.nodes().label(r.node);
        w.write_record([
            g.nodes().id(r.node),
            label.base.as_str(),
            if label.spreader { "true" } else { "false" },
            &r.in_multi.to_string(),
            &r.out_multi.to_string(),
            &r.in_simple.to_string(),
            &r.out_simple.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Activity and cross-group interaction counts in the spirit of a
/// "who did what to whom" dataset table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupSummary {
    pub troll_users: u64,
    pub real_users: u64,
    pub troll_events: u64,
    pub real_events: u64,
    pub troll_replies: u64,
    pub real_replies: u64,
    pub troll_mentions: u64,
    pub real_mentions: u64,
    pub ego_net_users: u64,
    pub other_users: u64,
    pub troll_to_real_edges: u64,
    pub troll_to_real_sources: u64,
    pub troll_to_real_targets: u64,
    pub real_to_troll_edges: u64,
    pub real_to_troll_sources: u64,
    pub real_to_troll_targets: u64,
}

impl GroupSummary {
    pub(crate) fn tally_event(&mut self, troll: bool, e: &ActionEvent) {
        let replies = e.reply_to.is_some() as u64;
        let mentions = e.mentions.len() as u64;
        if troll {
            self.troll_events += 1;
            self.troll_replies += replies;
            self.troll_mentions += mentions;
        } else {
            self.real_events += 1;
            self.real_replies += replies;
            self.real_mentions += mentions;
        }
    }

    /// Fill the user and cross-group edge counts from a built graph.
    pub(crate) fn tally_graph(&mut self, g: &InteractionMultigraph) {
        let nodes = g.nodes();
        for l in nodes.labels() {
            match l.base {
                BaseGroup::Troll => self.troll_users += 1,
                BaseGroup::EgoNet => self.ego_net_users += 1,
                BaseGroup::Other => self.other_users += 1,
            }
        }
        self.real_users = self.ego_net_users + self.other_users;
        let n = g.node_count();
        let (mut tr_src, mut tr_dst, mut rt_src, mut rt_dst) =
            (vec![false; n], vec![false; n], vec![false; n], vec![false; n]);
        for e in g.edges() {
            match (nodes.is_troll(e.src), nodes.is_troll(e.dst)) {
                (true, false) => {
                    self.troll_to_real_edges += 1;
                    tr_src[e.src as usize] = true;
                    tr_dst[e.dst as usize] = true;
                }
                (false, true) => {
                    self.real_to_troll_edges += 1;
                    rt_src[e.src as usize] = true;
                    rt_dst[e.dst as usize] = true;
                }
                _ => {}
            }
        }
        let count = |v: &[bool]| v.iter().filter(|&&b| b).count() as u64;
        self.troll_to_real_sources = count(&tr_src);
        self.troll_to_real_targets = count(&tr_dst);
        self.real_to_troll_sources = count(&rt_src);
        self.real_to_troll_targets = count(&rt_dst);
    }
}

pub fn group_summary(events: &[ActionEvent], g: &InteractionMultigraph) -> GroupSummary {
    let nodes = g.nodes();
    let mut s = GroupSummary::default();
    for e in events {
        s.tally_event(nodes.index(&e.author).is_some_and(|v| nodes.is_troll(v)), e);
    }
    s.tally_graph(g);
    s
}

pub fn write_group_summary_csv<W: Write>(s: &GroupSummary, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["metric", "trolls", "real_users"])?;
    let rows: [(&str, u64, u64); 4] = [
        ("user_ids", s.troll_users, s.real_users),
        ("total_events", s.troll_events, s.real_events),
        ("replies", s.troll_replies, s.real_replies),
        ("mentions", s.troll_mentions, s.real_mentions),
    ];
    for (m, t, r) in rows {
        w.write_record([m, &t.to_string(), &r.to_string()])?;
    }
    w.write_record(["ego_net_users", "", &s.ego_net_users.to_string()])?;
    w.write_record(["other_users", "", &s.other_users.to_string()])?;
    w.write_record(["edges_troll_to_real", &s.troll_to_real_edges.to_string(), ""])?;
    w.write_record([
        "troll_to_real_distinct_endpoints",
        &s.troll_to_real_sources.to_string(),
        &s.troll_to_real_targets.to_string(),
    ])?;
    w.write_record(["edges_real_to_troll", "", &s.real_to_troll_edges.to_string()])?;
    w.write_record([
        "real_to_troll_distinct_endpoints",
        &s.real_to_troll_targets.to_string(),
        &s.real_to_troll_sources.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

pub const SNAPSHOT_MAGIC: [u8; 4] = *b"IGR1";
pub const SNAPSHOT_VERSION: u32 = 1;

/// Write the binary snapshot: magic, version, counts, node section
/// (u32-length-prefixed UTF-8 id + group byte), edge section
/// (u64 src, u64 dst, i64 ts, u8 kind). All integers little-endian.
pub fn snapshot_save<W: Write>(g: &InteractionMultigraph, out: W) -> Result<()> {
    let mut out = std::io::BufWriter::with_capacity(1 << 20, out);
    out.write_all(&SNAPSHOT_MAGIC)?;
    out.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    out.write_all(&(g.node_count() as u64).to_le_bytes())?;
    out.write_all(&(g.edge_count() as u64).to_le_bytes())?;
    for (id, label) in g.nodes.ids.iter().zip(&g.nodes.labels) {
        out.write_all(&(id.len() as u32).to_le_bytes())?;
        out.write_all(id.as_bytes())?;
        out.write_all(&[label.to_byte()])?;
    }
    for e in &g.edges {
        out.write_all(&(e.src as u64).to_le_bytes())?;
        out.write_all(&(e.dst as u64).to_le_bytes())?;
        out.write_all(&e.ts.to_le_bytes())?;
        out.write_all(&[e.kind.to_byte()])?;
    }
    out.flush()?;
    Ok(())
}

struct OffsetReader<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> OffsetReader<R> {
    fn bytes(&mut self, buf: &mut [u8]) -> Result<()> {
        let mut filled = 0;
        while filled < buf.len() {
            match self.inner.read(&mut buf[filled..]) {
                Ok(0) => {
                    return Err(SnapshotError::Truncated {
                        offset: self.offset + filled as u64,
                        wanted: buf.len() - filled,
                    }
                    .into())
                }
                Ok(k) => filled += k,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
        self.offset += buf.len() as u64;
        Ok(())
    }

    fn u8(&mut self) -> Result<u8> {
        let mut b = [0u8; 1];
        self.bytes(&mut b)?;
        Ok(b[0])
    }

    fn u32(&mut self) -> Result<u32> {
        let mut b = [0u8; 4];
        self.bytes(&mut b)?;
        Ok(u32::from_le_bytes(b))
    }

    fn u64(&mut self) -> Result<u64> {
        let mut b = [0u8; 8];
        self.bytes(&mut b)?;
        Ok(u64::from_le_bytes(b))
    }

    fn corrupt(&self, at: u64, reason: impl Into<String>) -> Error {
        SnapshotError::Corrupt { offset: at, reason: reason.into() }.into()
    }
}

pub fn snapshot_load<R: Read>(input: R) -> Result<InteractionMultigraph> {
    let mut r = OffsetReader { inner: std::io::BufReader::with_capacity(1 << 20, input), offset: 0 };
    let mut magic = [0u8; 4];
    r.bytes(&mut magic)?;
    if magic != SNAPSHOT_MAGIC {
        return Err(SnapshotError::BadMagic { found: magic }.into());
    }
    let version = r.u32()?;
    if version != SNAPSHOT_VERSION {
        return Err(SnapshotError::Version { found: version, expected: SNAPSHOT_VERSION }.into());
    }
    let node_count = r.u64()?;
    let edge_count = r.u64()?;
    if node_count > NodeId::MAX as u64 {
        return Err(r.corrupt(12, format!("node count {node_count} exceeds index range")));
    }

    let mut ids = Vec::with_capacity(node_count.min(1 << 24) as usize);
    let mut labels = Vec::with_capacity(ids.capacity());
    for _ in 0..node_count {
        let at = r.offset;
        let len = r.u32()? as usize;
        let mut buf = vec![0u8; len];
        r.bytes(&mut buf)?;
        let id = String::from_utf8(buf).map_err(|_| r.corrupt(at, "node id is not UTF-8"))?;
        if ids.last().is_some_and(|prev: &String| *prev >= id) {
            return Err(r.corrupt(at, format!("node id {id:?} out of order")));
        }
        let at = r.offset;
        let byte = r.u8()?;
        let label = GroupLabel::from_byte(byte)
            .ok_or_else(|| r.corrupt(at, format!("unknown group byte {byte:#04x}")))?;
        ids.push(id);
        labels.push(label);
    }

    let mut edges = Vec::with_capacity(edge_count.min(1 << 26) as usize);
    for _ in 0..edge_count {
        let at = r.offset;
        let src = r.u64()?;
        let dst = r.u64()?;
        let ts = r.u64()? as i64;
        let kind_at = r.offset;
        let kind_byte = r.u8()?;
        if src >= node_count || dst >= node_count || src == dst || ts < 0 {
            return Err(r.corrupt(at, format!("invalid edge ({src} -> {dst} @ {ts})")));
        }
        let kind = EdgeKind::from_byte(kind_byte)
            .ok_or_else(|| r.corrupt(kind_at, format!("unknown edge kind {kind_byte}")))?;
        edges.push(Edge { src: src as NodeId, dst: dst as NodeId, ts, kind });
    }
    let mut probe = [0u8; 1];
    if r.inner.read(&mut probe)? != 0 {
        return Err(r.corrupt(r.offset, "trailing bytes after edge section"));
    }
    InteractionMultigraph::from_parts(ids, labels, edges)
}

pub fn snapshot_save_file(g: &InteractionMultigraph, path: impl AsRef<std::path::Path>) -> Result<()> {
    let path = path.as_ref();
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    snapshot_save(g, f)
}

pub fn snapshot_load_file(path: impl AsRef<std::path::Path>) -> Result<InteractionMultigraph> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingArtifact(path.to_path_buf()));
    }
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    snapshot_load(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::NormalizedUrl;
    use proptest::prelude::*;

    pub(crate) fn ev(id: &str, author: &str, ts: i64, reply_to: Option<&str>, mentions: &[&str]) -> ActionEvent {
        ActionEvent {
            event_id: id.into(),
            author: author.into(),
            ts,
            reply_to: reply_to.map(Into::into),
            mentions: mentions.iter().map(|m| m.to_string()).collect(),
            urls: Vec::<NormalizedUrl>::new(),
        }
    }

    fn node(g: &InteractionMultigraph, id: &str) -> NodeId {
        g.nodes().index(id).unwrap()
    }

    #[test]
    fn reply_and_mentions_become_edges() {
        let g = InteractionMultigraph::build(
            &[ev("1", "i", 1, Some("j"), &[]), ev("2", "i", 2, None, &["j", "k"])],
            &TrollRegistry::default(),
        );
        let (i, j, k) = (node(&g, "i"), node(&g, "j"), node(&g, "k"));
        assert_eq!(
            g.edges(),
            &[
                Edge { src: i, dst: j, ts: 1, kind: EdgeKind::Reply },
                Edge { src: i, dst: j, ts: 2, kind: EdgeKind::Mention },
                Edge { src: i, dst: k, ts: 2, kind: EdgeKind::Mention },
            ]
        );
    }

    #[test]
    fn parallel_edges_and_simple_projection() {
        let g = InteractionMultigraph::build(
            &[ev("1", "i", 5, Some("j"), &[]), ev("2", "i", 2, Some("j"), &[]), ev("3", "i", 9, Some("j"), &[])],
            &TrollRegistry::default(),
        );
        assert_eq!(g.edge_count(), 3);
        let s = SimpleDigraph::from_multigraph(&g);
        assert_eq!(s.edge_count(), 1);
        assert_eq!(s.first_ts(node(&g, "i"), node(&g, "j")), Some(2));
        let d = degree_profile(&g, &s);
        let i = &d[node(&g, "i") as usize];
        assert_eq!((i.out_multi, i.out_simple), (3, 1));
    }

    #[test]
    fn direction_matters_in_simple_graph() {
        let g = InteractionMultigraph::build(
            &[ev("1", "i", 1, Some("j"), &[]), ev("2", "j", 2, Some("i"), &[])],
            &TrollRegistry::default(),
        );
        let s = SimpleDigraph::from_multigraph(&g);
        assert_eq!(s.edge_count(), 2);
        let u = UndirectedGraph::from_simple(&s);
        assert_eq!(u.edge_count(), 1);
        assert_eq!(u.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn empty_graphs() {
        let g = InteractionMultigraph::build(&[], &TrollRegistry::default());
        let s = SimpleDigraph::from_multigraph(&g);
        assert_eq!((s.node_count(), s.edge_count()), (0, 0));
        let u = UndirectedGraph::from_simple(&s);
        assert_eq!((u.node_count(), u.edge_count()), (0, 0));
    }

    #[test]
    fn isolated_author_has_zero_degrees() {
        let g = InteractionMultigraph::build(&[ev("1", "lonely", 1, None, &[])], &TrollRegistry::default());
        let s = SimpleDigraph::from_multigraph(&g);
        let d = degree_profile(&g, &s);
        assert_eq!(d[0], DegreeRecord { node: 0, in_multi: 0, out_multi: 0, in_simple: 0, out_simple: 0 });
    }

    #[test]
    fn five_mentioners_of_c() {
        let events: Vec<_> =
            (0..5).map(|k| ev(&k.to_string(), &format!("u{k}"), k, None, &["c"])).collect();
        let g = InteractionMultigraph::build(&events, &TrollRegistry::default());
        let s = SimpleDigraph::from_multigraph(&g);
        let c = degree_profile(&g, &s)[node(&g, "c") as usize];
        assert_eq!((c.in_multi, c.in_simple), (5, 5));
    }

    #[test]
    fn ego_net_is_direction_symmetric() {
        let reg = TrollRegistry::new(["t"]);
        let g = InteractionMultigraph::build(
            &[ev("1", "t", 1, Some("a"), &[]), ev("2", "b", 1, None, &["t"]), ev("3", "c", 1, None, &["a"])],
            &reg,
        );
        let base = |id| g.nodes().label(node(&g, id)).base;
        assert_eq!(base("t"), BaseGroup::Troll);
        assert_eq!(base("a"), BaseGroup::EgoNet);
        assert_eq!(base("b"), BaseGroup::EgoNet);
        assert_eq!(base("c"), BaseGroup::Other);
    }

    fn worked_graph() -> InteractionMultigraph {
        let reg = TrollRegistry::new(["A"]);
        InteractionMultigraph::build(
            &[ev("1", "B", 1, Some("A"), &[]), ev("2", "C", 2, None, &["B"]), ev("3", "D", 3, Some("C"), &[])],
            &reg,
        )
    }

    #[test]
    fn snapshot_round_trip() {
        let mut g = worked_graph();
        g.nodes_mut().set_spreaders(&[true, false, true, false]);
        let mut buf = Vec::new();
        snapshot_save(&g, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"IGR1");
        let back = snapshot_load(buf.as_slice()).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.structural_digest(), g.structural_digest());
    }

    #[test]
    fn snapshot_truncation_names_offset() {
        let mut buf = Vec::new();
        snapshot_save(&worked_graph(), &mut buf).unwrap();
        let cut = buf.len() - 5;
        match snapshot_load(&buf[..cut]) {
            Err(Error::Snapshot(SnapshotError::Truncated { offset, .. })) => assert_eq!(offset, cut as u64),
            other => panic!("expected truncation, got {other:?}"),
        }
    }

    #[test]
    fn snapshot_version_and_magic() {
        let mut buf = Vec::new();
        snapshot_save(&worked_graph(), &mut buf).unwrap();
        let mut bad = buf.clone();
        bad[4] = 7;
        match snapshot_load(bad.as_slice()) {
            Err(e @ Error::Snapshot(SnapshotError::Version { found: 7, expected: 1 })) => {
                assert!(e.to_string().contains("found 7, expected 1"))
            }
            other => panic!("expected version error, got {other:?}"),
        }
        bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(snapshot_load(bad.as_slice()), Err(Error::Snapshot(SnapshotError::BadMagic { .. }))));
        buf.push(0);
        assert!(matches!(snapshot_load(buf.as_slice()), Err(Error::Snapshot(SnapshotError::Corrupt { .. }))));
    }

    fn random_events() -> impl Strategy<Value = Vec<ActionEvent>> {
        proptest::collection::vec(
            (0u8..12, 0i64..50, proptest::option::of(0u8..12), proptest::collection::vec(0u8..12, 0..4)),
            0..60,
        )
        .prop_map(|raw| {
            raw.into_iter()
                .enumerate()
                .map(|(k, (a, ts, r, ms))| {
                    let author = format!("u{a}");
                    let reply = r.map(|r| format!("u{r}")).filter(|r| *r != author);
                    let mut mentions: Vec<String> = Vec::new();
                    for m in ms.into_iter().map(|m| format!("u{m}")) {
                        if m != author && !mentions.contains(&m) {
                            mentions.push(m);
                        }
                    }
                    ActionEvent { event_id: k.to_string(), author, ts, reply_to: reply, mentions, urls: vec![] }
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn degree_invariants(events in random_events(), trolls in proptest::collection::vec(0u8..12, 0..3)) {
            let reg = TrollRegistry::new(trolls.iter().map(|t| format!("u{t}")));
            let g = InteractionMultigraph::build(&events, &reg);
            let s = SimpleDigraph::from_multigraph(&g);
            let d = degree_profile(&g, &s);
            let m = g.edge_count() as u64;
            prop_assert_eq!(d.iter().map(|r| r.in_multi).sum::<u64>(), m);
            prop_assert_eq!(d.iter().map(|r| r.out_multi).sum::<u64>(), m);
            for r in &d {
                prop_assert!(r.in_simple <= r.in_multi && r.out_simple <= r.out_multi);
            }
            // first_ts is the minimum over parallel edges
            for e in s.edges() {
                let min = g.edges().iter().filter(|x| x.src == e.src && x.dst == e.dst).map(|x| x.ts).min();
                prop_assert_eq!(Some(e.ts), min);
            }
            for v in 0..g.node_count() as NodeId {
                let label = g.nodes().label(v);
                let is_troll = reg.contains(g.nodes().id(v));
                let near = g.edges().iter().any(|e| (e.src == v && g.nodes().is_troll(e.dst)) || (e.dst == v && g.nodes().is_troll(e.src)));
                let expected = if is_troll { BaseGroup::Troll } else if near { BaseGroup::EgoNet } else { BaseGroup::Other };
                prop_assert_eq!(label.base, expected);
            }
            let mut buf = Vec::new();
            snapshot_save(&g, &mut buf).unwrap();
            prop_assert_eq!(snapshot_load(buf.as_slice()).unwrap(), g);
        }

        #[test]
        fn streaming_builder_matches_batch_build(
            events in random_events(),
            trolls in proptest::collection::vec(0u8..12, 0..3),
        ) {
            let reg = TrollRegistry::new(trolls.iter().map(|t| format!("u{t}")));
            let batch = InteractionMultigraph::build(&events, &reg);
            let mut b = GraphBuilder::new(&reg);
            for e in &events {
                b.push(e);
            }
            let built = b.finish();
            prop_assert_eq!(&built.graph, &batch);
            prop_assert_eq!(built.summary, group_summary(&events, &batch));
        }
    }
}
