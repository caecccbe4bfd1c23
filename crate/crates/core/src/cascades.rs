//! Diffusion lists, time-inferred cascade forests and the metrics computed
//! on them.
//!
//! A sharer `i` whose first share of a URL happens at `t_i` is attached to
//! the neighbour `j` it had interacted with (`i -> j` strictly before `t_i`)
//! that shared the URL most recently before `t_i`. Equal first-share times
//! among candidates go to the smallest user id. Users without such a
//! neighbour start a new tree. Only first shares take part; repeats stay in
//! the diffusion list but never gain a parent.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{NodeId, NodeTable, SimpleDigraph};
use crate::ingest::{ActionEvent, NormalizedUrl};
use crate::stats::{distribution_compare, EmpiricalDistribution};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareEvent {
    pub user: NodeId,
    pub ts: i64,
    pub event_id: String,
}

/// Every share of one URL in chronological order, repetitions included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffusionList {
    pub url: NormalizedUrl,
    shares: Vec<ShareEvent>,
    distinct_users: usize,
}

impl DiffusionList {
    /// Sorts shares by `(ts, event_id)`.
    pub fn new(url: NormalizedUrl, mut shares: Vec<ShareEvent>) -> Self {
        shares.sort_by(|a, b| (a.ts, &a.event_id).cmp(&(b.ts, &b.event_id)));
        let distinct_users = shares.iter().map(|s| s.user).collect::<HashSet<_>>().len();
        DiffusionList { url, shares, distinct_users }
    }

    pub fn shares(&self) -> &[ShareEvent] {
        &self.shares
    }

    pub fn len(&self) -> usize {
        self.shares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shares.is_empty()
    }

    pub fn distinct_user_count(&self) -> usize {
        self.distinct_users
    }

    /// `(user, first share time)` in order of first appearance.
    pub fn first_shares(&self) -> Vec<(NodeId, i64)> {
        let mut seen = HashSet::with_capacity(self.distinct_users);
        self.shares.iter().filter(|s| seen.insert(s.user)).map(|s| (s.user, s.ts)).collect()
    }

    /// 1-based position of the user's earliest share.
    pub fn first_position(&self, user: NodeId) -> Option<usize> {
        self.shares.iter().position(|s| s.user == user).map(|i| i + 1)
    }

    pub fn without_users(&self, drop: impl Fn(NodeId) -> bool) -> DiffusionList {
        let shares: Vec<ShareEvent> = self.shares.iter().filter(|s| !drop(s.user)).cloned().collect();
        let distinct_users = shares.iter().map(|s| s.user).collect::<HashSet<_>>().len();
        DiffusionList { url: self.url.clone(), shares, distinct_users }
    }
}

/// Gathers the shares of selected URLs across batches of events.
pub struct DiffusionCollector<'a> {
    nodes: &'a NodeTable,
    urls: &'a BTreeSet<NormalizedUrl>,
    grouped: BTreeMap<NormalizedUrl, Vec<ShareEvent>>,
}

impl<'a> DiffusionCollector<'a> {
    pub fn new(nodes: &'a NodeTable, urls: &'a BTreeSet<NormalizedUrl>) -> Self {
        DiffusionCollector { nodes, urls, grouped: BTreeMap::new() }
    }

    pub fn push(&mut self, events: &[ActionEvent]) {
        for e in events {
            for u in e.urls.iter().filter(|u| self.urls.contains(*u)) {
                let Some(user) = self.nodes.index(&e.author) else { continue };
                let share = ShareEvent { user, ts: e.ts, event_id: e.event_id.clone() };
                match self.grouped.get_mut(u) {
                    Some(v) => v.push(share),
                    None => {
                        self.grouped.insert(u.clone(), vec![share]);
                    }
                }
            }
        }
    }

    pub fn finish(self) -> BTreeMap<NormalizedUrl, DiffusionList> {
        self.grouped.into_iter().map(|(u, s)| (u.clone(), DiffusionList::new(u, s))).collect()
    }
}

/// One list per URL of `urls` that occurs in at least one event.
pub fn build_diffusion_lists(
    events: &[ActionEvent],
    nodes: &NodeTable,
    urls: &BTreeSet<NormalizedUrl>,
) -> BTreeMap<NormalizedUrl, DiffusionList> {
    let mut c = DiffusionCollector::new(nodes, urls);
    c.push(events);
    c.finish()
}

/// Position of the user's earliest share divided by the list length
/// (repetitions included).
pub fn relative_first_appearance(list: &DiffusionList, user: NodeId) -> Result<f64> {
    list.first_position(user)
        .map(|p| p as f64 / list.len() as f64)
        .ok_or_else(|| Error::UnknownUser(format!("node {user} in diffusion of {}", list.url)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sharer {
    pub user: NodeId,
    pub first_share: i64,
    /// Index of the parent in `CascadeForest::sharers`.
    pub parent: Option<u32>,
}

/// Inferred influence structure for one URL. Sharers are kept in first-share
/// order, so every parent index is smaller than its child's index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeForest {
    pub url: NormalizedUrl,
    pub sharers: Vec<Sharer>,
}

impl CascadeForest {
    /// `(parent, child)` user pairs.
    pub fn influence_edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.sharers
            .iter()
            .filter_map(move |s| s.parent.map(|p| (self.sharers[p as usize].user, s.user)))
    }

    pub fn edge_count(&self) -> usize {
        self.sharers.iter().filter(|s| s.parent.is_some()).count()
    }

    pub fn roots(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.sharers.iter().filter(|s| s.parent.is_none()).map(|s| s.user)
    }

    pub fn parent_map(&self) -> BTreeMap<NodeId, NodeId> {
        self.influence_edges().map(|(p, c)| (c, p)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CandidateScan {
    /// Pick whichever of the two scans below is cheaper per sharer.
    #[default]
    Adaptive,
    /// Walk the sharer's out-neighbours and look each up among prior sharers.
    Neighbors,
    /// Walk prior sharers newest-first and probe the graph for an edge.
    PriorSharers,
}

pub fn infer_cascade_forest(list: &DiffusionList, simple: &SimpleDigraph) -> CascadeForest {
    infer_cascade_forest_with(list, simple, CandidateScan::Adaptive)
}

pub fn infer_cascade_forest_with(list: &DiffusionList, simple: &SimpleDigraph, scan: CandidateScan) -> CascadeForest {
    let firsts = list.first_shares();
    let index: HashMap<NodeId, u32> = firsts.iter().enumerate().map(|(k, &(u, _))| (u, k as u32)).collect();
    let mut sharers = Vec::with_capacity(firsts.len());
    // `prior` counts sharers whose first share is strictly earlier than the current one
    let mut prior = 0usize;
    for (k, &(user, t)) in firsts.iter().enumerate() {
        while firsts[prior].1 < t {
            prior += 1;
        }
        debug_assert!(prior <= k);
        let use_neighbors = match scan {
            CandidateScan::Neighbors => true,
            CandidateScan::PriorSharers => false,
            CandidateScan::Adaptive => simple.out_degree(user) <= prior,
        };
        let best = if use_neighbors {
            let mut best: Option<(i64, NodeId, u32)> = None;
            for (j, ft) in simple.out_edges(user) {
                if ft >= t {
                    continue;
                }
                let Some(&idx) = index.get(&j) else { continue };
                if (idx as usize) >= prior {
                    continue;
                }
                let tj = firsts[idx as usize].1;
                let better = match best {
                    None => true,
                    Some((bt, bj, _)) => tj > bt || (tj == bt && j < bj),
                };
                if better {
                    best = Some((tj, j, idx));
                }
            }
            best.map(|(_, _, idx)| idx)
        } else {
            let mut best: Option<(i64, NodeId, u32)> = None;
            for idx in (0..prior).rev() {
                let (j, tj) = firsts[idx];
                if best.is_some_and(|(bt, _, _)| tj < bt) {
                    break;
                }
                if simple.first_ts(user, j).is_some_and(|ft| ft < t)
                    && best.map_or(true, |(_, bj, _)| j < bj)
                {
                    best = Some((tj, j, idx as u32));
                }
            }
            best.map(|(_, _, idx)| idx)
        };
        sharers.push(Sharer { user, first_share: t, parent: best });
    }
    CascadeForest { url: list.url.clone(), sharers }
}

/// Infer forests for many lists in parallel; output order follows input
/// order regardless of the worker count.
pub fn infer_all(lists: &[&DiffusionList], simple: &SimpleDigraph) -> Vec<CascadeForest> {
    lists.par_iter().map(|l| infer_cascade_forest(l, simple)).collect()
}

/// Check the causality constraints of a forest against its diffusion list and
/// interaction graph, independently of how the forest was produced.
pub fn verify_causality(forest: &CascadeForest, list: &DiffusionList, simple: &SimpleDigraph) -> std::result::Result<(), String> {
    let mut first: HashMap<NodeId, i64> = HashMap::new();
    for s in list.shares() {
        first.entry(s.user).or_insert(s.ts);
    }
    let mut seen = HashSet::new();
    for (k, s) in forest.sharers.iter().enumerate() {
        if !seen.insert(s.user) {
            return Err(format!("user {} appears twice", s.user));
        }
        if first.get(&s.user) != Some(&s.first_share) {
            return Err(format!("user {} first share mismatch", s.user));
        }
        let Some(p) = s.parent else { continue };
        if p as usize >= k {
            return Err(format!("parent of {} does not precede it", s.user));
        }
        let parent = forest.sharers[p as usize];
        if parent.first_share >= s.first_share {
            return Err(format!("parent {} did not share before child {}", parent.user, s.user));
        }
        match simple.first_ts(s.user, parent.user) {
            Some(ft) if ft < s.first_share => {}
            _ => return Err(format!("no interaction {} -> {} before the child's share", s.user, parent.user)),
        }
    }
    if seen.len() != first.len() {
        return Err("forest does not cover every sharer".into());
    }
    Ok(())
}

/// A rooted cascade tree. Nodes are listed so that every parent precedes its
/// children; index 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeTree {
    nodes: Vec<NodeId>,
    parent: Vec<Option<u32>>,
}

impl CascadeTree {
    pub fn from_parents(nodes: Vec<NodeId>, parent: Vec<Option<u32>>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != parent.len() {
            return Err(Error::Data("tree needs one parent entry per node".into()));
        }
        if parent[0].is_some() {
            return Err(Error::Data("node 0 must be the root".into()));
        }
        for (i, p) in parent.iter().enumerate().skip(1) {
            match p {
                Some(p) if (*p as usize) < i => {}
                _ => return Err(Error::Data(format!("node {i} needs a parent listed before it"))),
            }
        }
        Ok(CascadeTree { nodes, parent })
    }

    pub fn root(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn parents(&self) -> &[Option<u32>] {
        &self.parent
    }
}

/// Connected components of the influence edges with at least two members.
/// Trees come out in order of their root's first share.
pub fn extract_trees(forest: &CascadeForest) -> Vec<CascadeTree> {
    let n = forest.sharers.len();
    let mut root = vec![0u32; n];
    let mut size = vec![0usize; n];
    for (k, s) in forest.sharers.iter().enumerate() {
        root[k] = s.parent.map_or(k as u32, |p| root[p as usize]);
        size[root[k] as usize] += 1;
    }
    let mut slot = vec![u32::MAX; n];
    let mut local = vec![0u32; n];
    let mut trees: Vec<(Vec<NodeId>, Vec<Option<u32>>)> = Vec::new();
    for (k, s) in forest.sharers.iter().enumerate() {
        let r = root[k] as usize;
        if size[r] < 2 {
            continue;
        }
        if slot[r] == u32::MAX {
            slot[r] = trees.len() as u32;
            trees.push((Vec::with_capacity(size[r]), Vec::with_capacity(size[r])));
        }
        let t = &mut trees[slot[r] as usize];
        local[k] = t.0.len() as u32;
        t.0.push(s.user);
        t.1.push(s.parent.map(|p| local[p as usize]));
    }
    trees.into_iter().map(|(nodes, parent)| CascadeTree { nodes, parent }).collect()
}

/// Sharers that belong to no cascade (no parent and no children).
pub fn isolated_sharers(forest: &CascadeForest) -> usize {
    let mut has_child = vec![false; forest.sharers.len()];
    for s in &forest.sharers {
        if let Some(p) = s.parent {
            has_child[p as usize] = true;
        }
    }
    forest.sharers.iter().zip(&has_child).filter(|(s, &c)| s.parent.is_none() && !c).count()
}

/// Number of children per user, summed over all forests.
pub fn influence_degree<'a>(forests: impl IntoIterator<Item = &'a CascadeForest>, node_count: usize) -> Vec<u64> {
    let mut deg = vec![0u64; node_count];
    for f in forests {
        for (p, _) in f.influence_edges() {
            deg[p as usize] += 1;
        }
    }
    deg
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitiatorCounts {
    pub cascades: Vec<u64>,
    /// Cascades whose size is strictly above the viral threshold.
    pub viral: Vec<u64>,
    pub viral_threshold: usize,
}

pub fn cascade_initiators<'a>(
    trees: impl IntoIterator<Item = &'a CascadeTree>,
    node_count: usize,
    viral_threshold: usize,
) -> InitiatorCounts {
    let mut cascades = vec![0u64; node_count];
    let mut viral = vec![0u64; node_count];
    for t in trees {
        cascades[t.root() as usize] += 1;
        if t.size() > viral_threshold {
            viral[t.root() as usize] += 1;
        }
    }
    InitiatorCounts { cascades, viral, viral_threshold }
}

/// Mean shortest-path distance over ordered node pairs, computed from the
/// edge-cut identity: each edge separating `s` nodes from `n - s` lies on
/// `2 s (n - s)` ordered shortest paths.
pub fn structural_virality(tree: &CascadeTree) -> Result<f64> {
    let n = tree.size();
    if n <= 1 {
        return Err(Error::Undefined("structural virality needs at least two nodes".into()));
    }
    let mut sub = vec![1u64; n];
    for i in (1..n).rev() {
        let p = tree.parent[i].unwrap() as usize;
        sub[p] += sub[i];
    }
    let n64 = n as u64;
    let cut: u128 = sub[1..].iter().map(|&s| s as u128 * (n64 - s) as u128).sum();
    Ok(2.0 * cut as f64 / (n as f64 * (n as f64 - 1.0)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationReport {
    pub trees_before: usize,
    pub trees_after: usize,
    pub virality_before: Vec<f64>,
    pub virality_after: Vec<f64>,
    /// Sup-norm distance between the two virality CDFs; `None` when either
    /// side has no trees.
    pub max_cdf_gap: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Ablation {
    pub lists: Vec<DiffusionList>,
    pub forests: Vec<CascadeForest>,
    pub report: AblationReport,
}

/// Drop trolls from the interaction graph and from every diffusion list,
/// re-infer the forests and compare tree counts and virality distributions
/// against `original`.
pub fn ablate_trolls(
    lists: &[&DiffusionList],
    simple: &SimpleDigraph,
    nodes: &NodeTable,
    original: &[CascadeForest],
) -> Ablation {
    let keep: Vec<bool> = nodes.labels().iter().map(|l| !l.base.is_troll()).collect();
    let pruned = simple.retain_nodes(&keep);
    let ablated: Vec<DiffusionList> =
        lists.par_iter().map(|l| l.without_users(|u| !keep[u as usize])).collect();
    let refs: Vec<&DiffusionList> = ablated.iter().collect();
    let forests = infer_all(&refs, &pruned);

    let virality = |fs: &[CascadeForest]| -> Vec<f64> {
        fs.par_iter()
            .flat_map_iter(|f| extract_trees(f).into_iter().map(|t| structural_virality(&t).unwrap()))
            .collect()
    };
    let virality_before = virality(original);
    let virality_after = virality(&forests);
    let max_cdf_gap = match (
        EmpiricalDistribution::new(virality_before.clone()),
        EmpiricalDistribution::new(virality_after.clone()),
    ) {
        (Ok(a), Ok(b)) => Some(distribution_compare(&a, &b)),
        _ => None,
    };
    let report = AblationReport {
        trees_before: virality_before.len(),
        trees_after: virality_after.len(),
        virality_before,
        virality_after,
        max_cdf_gap,
    };
    Ablation { lists: ablated, forests, report }
}

#[cfg(test)]
pub(crate) mod oracles {
    use super::*;
    use std::collections::VecDeque;

    /// Mean pairwise distance by breadth-first search from every node.
    pub fn virality_bfs(tree: &CascadeTree) -> f64 {
        let n = tree.size();
        let mut adj = vec![Vec::new(); n];
        for (i, p) in tree.parents().iter().enumerate() {
            if let Some(p) = p {
                adj[i].push(*p as usize);
                adj[*p as usize].push(i);
            }
        }
        let mut total = 0u64;
        for s in 0..n {
            let mut dist = vec![u64::MAX; n];
            dist[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &u in &adj[v] {
                    if dist[u] == u64::MAX {
                        dist[u] = dist[v] + 1;
                        q.push_back(u);
                    }
                }
            }
            total += dist.iter().sum::<u64>();
        }
        total as f64 / (n * (n - 1)) as f64
    }
}
