//! Troll-URL extraction, spreader flags and the region of influence.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use crate::error::Result;
use crate::graph::{BaseGroup, Edge, InteractionMultigraph, NodeId, NodeTable, SimpleDigraph};
use crate::ingest::{ActionEvent, NormalizedUrl, TrollRegistry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrollUrlStats {
    pub troll_share_count: u64,
    pub first_troll_ts: i64,
}

/// URLs shared in at least one event authored by a registry member.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrollUrlSet {
    pub urls: BTreeMap<NormalizedUrl, TrollUrlStats>,
}

impl TrollUrlSet {
    pub fn contains(&self, url: &NormalizedUrl) -> bool {
        self.urls.contains_key(url)
    }

    pub fn len(&self) -> usize {
        self.urls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.urls.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NormalizedUrl, &TrollUrlStats)> {
        self.urls.iter()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["url", "troll_share_count", "first_troll_ts"])?;
        for (url, s) in &self.urls {
            w.write_record([url.as_str(), &s.troll_share_count.to_string(), &s.first_troll_ts.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn extract_troll_urls(events: &[ActionEvent], registry: &TrollRegistry) -> TrollUrlSet {
    let mut urls: BTreeMap<NormalizedUrl, TrollUrlStats> = BTreeMap::new();
    for e in events.iter().filter(|e| registry.contains(&e.author)) {
        for u in &e.urls {
            let s = urls
                .entry(u.clone())
                .or_insert(TrollUrlStats { troll_share_count: 0, first_troll_ts: e.ts });
            s.troll_share_count += 1;
            s.first_troll_ts = s.first_troll_ts.min(e.ts);
        }
    }
    if urls.is_empty() {
        log::warn!("no troll-authored URL shares found; troll-URL set is empty");
    }
    TrollUrlSet { urls }
}

/// One flag per node: true iff the user authored an event containing a
/// troll-URL.
pub fn identify_spreaders(events: &[ActionEvent], troll_urls: &TrollUrlSet, nodes: &NodeTable) -> Vec<bool> {
    let mut flags = vec![false; nodes.len()];
    for e in events {
        if e.urls.iter().any(|u| troll_urls.contains(u)) {
            if let Some(v) = nodes.index(&e.author) {
                flags[v as usize] = true;
            }
        }
    }
    flags
}

/// Streaming counterpart of [`extract_troll_urls`] and
/// [`identify_spreaders`], fed alongside a
/// [`GraphBuilder`](crate::graph::GraphBuilder) with its provisional ids.
#[derive(Debug, Default)]
pub struct ShareTracker {
    lookup: HashMap<NormalizedUrl, u32>,
    urls: Vec<NormalizedUrl>,
    troll_stats: Vec<Option<TrollUrlStats>>,
    /// (provisional author, url)
    shares: Vec<(NodeId, u32)>,
}

impl ShareTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, author: NodeId, troll: bool, e: &ActionEvent) {
        for u in &e.urls {
            let id = match self.lookup.get(u) {
                Some(&id) => id,
                None => {
                    let id = self.urls.len() as u32;
                    self.lookup.insert(u.clone(), id);
                    self.urls.push(u.clone());
                    self.troll_stats.push(None);
                    id
                }
            };
            self.shares.push((author, id));
            if troll {
                let s = self.troll_stats[id as usize]
                    .get_or_insert(TrollUrlStats { troll_share_count: 0, first_troll_ts: e.ts });
                s.troll_share_count += 1;
                s.first_troll_ts = s.first_troll_ts.min(e.ts);
            }
        }
    }

    /// Troll-URL set and per-node spreader flags, with provisional author ids
    /// translated through `remap`.
    pub fn finish(self, remap: &[NodeId]) -> (TrollUrlSet, Vec<bool>) {
        let mut flags = vec![false; remap.len()];
        for &(author, url) in &self.shares {
            if self.troll_stats[url as usize].is_some() {
                flags[remap[author as usize] as usize] = true;
            }
        }
        let urls: BTreeMap<NormalizedUrl, TrollUrlStats> = self
            .urls
            .into_iter()
            .zip(self.troll_stats)
            .filter_map(|(u, s)| s.map(|s| (u, s)))
            .collect();
        if urls.is_empty() {
            log::warn!("no troll-authored URL shares found; troll-URL set is empty");
        }
        (TrollUrlSet { urls }, flags)
    }
}

/// Induced subgraph of the simple digraph on the spreader set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionOfInfluence {
    /// local index -> node index in the full graph, ascending
    pub nodes: Vec<NodeId>,
    /// Simple digraph over local indices.
    pub graph: SimpleDigraph,
}

impl RegionOfInfluence {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Spreader counts per base group, in `BaseGroup::ALL` order.
    pub fn group_counts(&self, table: &NodeTable) -> [usize; 3] {
        let mut counts = [0usize; 3];
        for &v in &self.nodes {
            let i = BaseGroup::ALL.iter().position(|&b| b == table.label(v).base).unwrap();
            counts[i] += 1;
        }
        counts
    }

    /// Re-express the region as a multigraph (one edge per simple edge,
    /// stamped with its first interaction) for snapshotting.
    pub fn to_multigraph(&self, table: &NodeTable) -> InteractionMultigraph {
        let ids = self.nodes.iter().map(|&v| table.id(v).to_string()).collect();
        let labels = self.nodes.iter().map(|&v| table.label(v)).collect();
        let edges: Vec<Edge> = self.graph.edges().collect();
        InteractionMultigraph::from_parts(ids, labels, edges).expect("region is a valid subgraph")
    }
}

pub fn induced_subgraph(simple: &SimpleDigraph, spreaders: &[bool]) -> RegionOfInfluence {
    assert_eq!(spreaders.len(), simple.node_count());
    let mut local = vec![NodeId::MAX; simple.node_count()];
    let mut nodes = Vec::new();
    for (v, &s) in spreaders.iter().enumerate() {
        if s {
            local[v] = nodes.len() as NodeId;
            nodes.push(v as NodeId);
        }
    }
    let edges = simple
        .edges()
        .filter(|e| spreaders[e.src as usize] && spreaders[e.dst as usize])
        .map(|e| Edge { src: local[e.src as usize], dst: local[e.dst as usize], ..e });
    RegionOfInfluence { graph: SimpleDigraph::from_edges(nodes.len(), edges), nodes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{normalize_url, UrlMode};

    fn share(id: &str, author: &str, ts: i64, urls: &[&str], mentions: &[&str], reply: Option<&str>) -> ActionEvent {
        ActionEvent {
            event_id: id.into(),
            author: author.into(),
            ts,
            reply_to: reply.map(Into::into),
            mentions: mentions.iter().map(|s| s.to_string()).collect(),
            urls: urls.iter().map(|u| normalize_url(u, UrlMode::Lenient).unwrap()).collect(),
        }
    }

    fn url(s: &str) -> NormalizedUrl {
        normalize_url(s, UrlMode::Lenient).unwrap()
    }

    #[test]
    fn troll_url_examples() {
        let reg = TrollRegistry::new(["t"]);
        let set = extract_troll_urls(
            &[share("1", "t", 3, &["http://u/1"], &[], None), share("2", "r", 1, &["http://u/2"], &[], None)],
            &reg,
        );
        assert_eq!(set.urls.keys().cloned().collect::<Vec<_>>(), vec![url("http://u/1")]);

        let set = extract_troll_urls(
            &[
                share("1", "t", 3, &["http://u/1"], &[], None),
                share("2", "r", 1, &["http://u/1"], &[], None),
                share("3", "t", 2, &["http://u/1"], &[], None),
            ],
            &reg,
        );
        assert_eq!(set.urls[&url("http://u/1")], TrollUrlStats { troll_share_count: 2, first_troll_ts: 2 });

        let set = extract_troll_urls(&[share("1", "r", 1, &["http://u/1"], &[], None)], &reg);
        assert!(set.is_empty());
    }

    #[test]
    fn spreader_flags_and_region() {
        let reg = TrollRegistry::new(["t"]);
        let events = vec![
            share("1", "t", 1, &["http://u/1"], &["a"], None),
            share("2", "a", 2, &["http://u/1"], &["b", "t"], None),
            share("3", "b", 3, &["http://u/2"], &["a"], None),
            share("4", "c", 4, &[], &["a"], None),
        ];
        let mut g = InteractionMultigraph::build(&events, &reg);
        let set = extract_troll_urls(&events, &reg);
        let flags = identify_spreaders(&events, &set, g.nodes());
        let idx = |id| g.nodes().index(id).unwrap() as usize;
        assert!(flags[idx("t")] && flags[idx("a")]);
        assert!(!flags[idx("b")] && !flags[idx("c")]);
        g.nodes_mut().set_spreaders(&flags);

        let simple = SimpleDigraph::from_multigraph(&g);
        let region = induced_subgraph(&simple, &flags);
        assert_eq!(region.node_count(), 2);
        // t -> a and a -> t survive; a -> b, b -> a, c -> a do not
        assert_eq!(region.edge_count(), 2);
        assert_eq!(region.group_counts(g.nodes()), [1, 1, 0]);
        let snap = region.to_multigraph(g.nodes());
        assert_eq!(snap.nodes().ids(), &["a".to_string(), "t".to_string()]);
    }

    #[test]
    fn share_tracker_matches_batch_route() {
        let reg = TrollRegistry::new(["t", "s"]);
        let events = vec![
            share("1", "t", 5, &["http://u/1", "http://u/3"], &["a"], None),
            share("2", "a", 2, &["http://u/1"], &["b"], None),
            share("3", "b", 3, &["http://u/2"], &[], Some("a")),
            share("4", "s", 1, &["http://u/1"], &[], None),
            share("5", "c", 4, &["http://u/3"], &["d"], None),
            share("6", "d", 6, &[], &["a"], None),
        ];
        let mut b = crate::graph::GraphBuilder::new(&reg);
        let mut tracker = ShareTracker::new();
        for e in &events {
            let author = b.push(e);
            tracker.push(author, reg.contains(&e.author), e);
        }
        let built = b.finish();
        let (set, flags) = tracker.finish(&built.remap);
        assert_eq!(set, extract_troll_urls(&events, &reg));
        assert_eq!(flags, identify_spreaders(&events, &set, built.graph.nodes()));
        assert_eq!(set.urls[&url("http://u/1")], TrollUrlStats { troll_share_count: 2, first_troll_ts: 1 });
    }

    #[test]
    fn region_endpoint_filter() {
        // a=0, b=1, c=2
        let simple = SimpleDigraph::from_edges(
            3,
            [
                Edge { src: 0, dst: 1, ts: 1, kind: crate::graph::EdgeKind::Reply },
                Edge { src: 0, dst: 2, ts: 1, kind: crate::graph::EdgeKind::Reply },
            ],
        );
        let region = induced_subgraph(&simple, &[true, true, false]);
        assert_eq!(region.graph.edges().map(|e| (e.src, e.dst)).collect::<Vec<_>>(), vec![(0, 1)]);
        let empty = induced_subgraph(&simple, &[false; 3]);
        assert_eq!((empty.node_count(), empty.edge_count()), (0, 0));
    }
}
