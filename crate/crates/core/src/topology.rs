//! Connected components and k-core decomposition over undirected graphs.

use std::collections::BTreeMap;

use crate::graph::{NodeId, UndirectedGraph};

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentAssignment {
    /// Component id per node; ids are dense and numbered by the smallest node
    /// index each component contains.
    pub component: Vec<u32>,
    /// Size of each component, indexed by component id.
    pub sizes: Vec<usize>,
}

impl ComponentAssignment {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    /// component size -> number of components of that size
    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for &s in &self.sizes {
            *h.entry(s).or_insert(0) += 1;
        }
        h
    }

    /// The largest component; ties go to the lowest id, i.e. the component
    /// holding the smallest node index.
    pub fn largest(&self) -> Option<u32> {
        let mut best: Option<(usize, u32)> = None;
        for (c, &s) in self.sizes.iter().enumerate() {
            if best.map_or(true, |(bs, _)| s > bs) {
                best = Some((s, c as u32));
            }
        }
        best.map(|(_, c)| c)
    }
}

pub fn connected_components(g: &UndirectedGraph) -> ComponentAssignment {
    let n = g.node_count();
    let mut uf = UnionFind::new(n);
    for (a, b) in g.edges() {
        uf.union(a, b);
    }
    let mut id_of_root = vec![u32::MAX; n];
    let mut component = Vec::with_capacity(n);
    let mut sizes = Vec::new();
    for v in 0..n as u32 {
        let r = uf.find(v) as usize;
        if id_of_root[r] == u32::MAX {
            id_of_root[r] = sizes.len() as u32;
            sizes.push(0);
        }
        let c = id_of_root[r];
        sizes[c as usize] += 1;
        component.push(c);
    }
    ComponentAssignment { component, sizes }
}

/// An induced subgraph together with the original index of each local node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSubgraph {
    pub graph: UndirectedGraph,
    /// local index -> original index, ascending
    pub nodes: Vec<NodeId>,
}

pub fn induced_undirected(g: &UndirectedGraph, keep: &[bool]) -> InducedSubgraph {
    let mut local = vec![NodeId::MAX; g.node_count()];
    let mut nodes = Vec::new();
    for v in 0..g.node_count() {
        if keep[v] {
            local[v] = nodes.len() as NodeId;
            nodes.push(v as NodeId);
        }
    }
    let pairs = g
        .edges()
        .filter(|&(a, b)| keep[a as usize] && keep[b as usize])
        .map(|(a, b)| (local[a as usize], local[b as usize]));
    InducedSubgraph { graph: UndirectedGraph::from_pairs(nodes.len(), pairs), nodes }
}

/// Induced subgraph of the largest connected component. Node indices follow
/// user-id order, so the tie rule selects the component holding the
/// lexicographically smallest id. An empty graph yields an empty result.
pub fn largest_component(g: &UndirectedGraph, comps: &ComponentAssignment) -> InducedSubgraph {
    let Some(best) = comps.largest() else {
        return InducedSubgraph { graph: UndirectedGraph::from_pairs(0, []), nodes: vec![] };
    };
    let keep: Vec<bool> = comps.component.iter().map(|&c| c == best).collect();
    induced_undirected(g, &keep)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorenessMap {
    pub coreness: Vec<u32>,
}

impl CorenessMap {
    pub fn max(&self) -> u32 {
        self.coreness.iter().copied().max().unwrap_or(0)
    }

    /// Nodes in the innermost (maximum) core.
    pub fn max_core_members(&self) -> Vec<NodeId> {
        let k = self.max();
        (0..self.coreness.len() as NodeId).filter(|&v| self.coreness[v as usize] == k).collect()
    }
}

/// Linear-time bucket peeling. Nodes live in an array ordered by current
/// degree; `bin[d]` is the first slot of degree `d`. Removing the minimum
/// node decrements each unprocessed neighbour with larger degree by swapping
/// it to the front of its bucket and shrinking that bucket.
pub fn k_core_decomposition(g: &UndirectedGraph) -> CorenessMap {
    let n = g.node_count();
    if n == 0 {
        return CorenessMap { coreness: vec![] };
    }
    let mut deg: Vec<u32> = (0..n as NodeId).map(|v| g.degree(v) as u32).collect();
    let max_deg = *deg.iter().max().unwrap() as usize;

    let mut bin = vec![0usize; max_deg + 2];
    for &d in &deg {
        bin[d as usize + 1] += 1;
    }
    for d in 0..=max_deg {
        bin[d + 1] += bin[d];
    }
    let mut pos = vec![0usize; n];
    let mut order = vec![0 as NodeId; n];
    {
        let mut next = bin.clone();
        for v in 0..n {
            let d = deg[v] as usize;
            pos[v] = next[d];
            order[next[d]] = v as NodeId;
            next[d] += 1;
        }
    }

    for i in 0..n {
        let v = order[i];
        let dv = deg[v as usize];
        for &u in g.neighbors(v) {
            let du = deg[u as usize];
            if du > dv {
                let first = bin[du as usize];
                let w = order[first];
                if w != u {
                    let pu = pos[u as usize];
                    order.swap(pu, first);
                    pos[u as usize] = first;
                    pos[w as usize] = pu;
                }
                bin[du as usize] += 1;
                deg[u as usize] -= 1;
            }
        }
    }
    CorenessMap { coreness: deg }
}

#[cfg(test)]
pub(crate) mod oracles {
    use super::*;
    use std::collections::VecDeque;

    /// Repeatedly remove any vertex of minimum remaining degree, scanning
    /// all vertices each round. `pick` chooses among the tied minimum-degree
    /// vertices.
    pub fn naive_coreness(g: &UndirectedGraph, mut pick: impl FnMut(&[NodeId]) -> NodeId) -> Vec<u32> {
        let n = g.node_count();
        let mut alive = vec![true; n];
        let mut deg: Vec<usize> = (0..n as NodeId).map(|v| g.degree(v)).collect();
        let mut core = vec![0u32; n];
        let mut k = 0usize;
        for _ in 0..n {
            let min = (0..n).filter(|&v| alive[v]).map(|v| deg[v]).min().unwrap();
            let tied: Vec<NodeId> = (0..n).filter(|&v| alive[v] && deg[v] == min).map(|v| v as NodeId).collect();
            let v = pick(&tied);
            k = k.max(min);
            core[v as usize] = k as u32;
            alive[v as usize] = false;
            for &u in g.neighbors(v) {
                if alive[u as usize] {
                    deg[u as usize] -= 1;
                }
            }
        }
        core
    }

    pub fn bfs_components(g: &UndirectedGraph) -> Vec<u32> {
        let n = g.node_count();
        let mut label = vec![u32::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if label[s] != u32::MAX {
                continue;
            }
            label[s] = next;
            let mut q = VecDeque::from([s as NodeId]);
            while let Some(v) = q.pop_front() {
                for &u in g.neighbors(v) {
                    if label[u as usize] == u32::MAX {
                        label[u as usize] = next;
                        q.push_back(u);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

#[cfg(test)]
mod tests {
    use super::oracles::*;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn graph(n: usize, edges: &[(u32, u32)]) -> UndirectedGraph {
        UndirectedGraph::from_pairs(n, edges.iter().copied())
    }

    #[test]
    fn component_examples() {
        let c = connected_components(&graph(4, &[(0, 1), (2, 3)]));
        assert_eq!(c.histogram(), BTreeMap::from([(2, 2)]));
        let c = connected_components(&graph(3, &[]));
        assert_eq!(c.histogram(), BTreeMap::from([(1, 3)]));
        let c = connected_components(&graph(4, &[(0, 1), (1, 2)]));
        assert_eq!(c.histogram(), BTreeMap::from([(3, 1), (1, 1)]));
        assert_eq!(c.component, vec![0, 0, 0, 1]);
    }

    #[test]
    fn largest_component_and_ties() {
        let g = graph(8, &[(0, 1), (1, 2), (3, 4), (4, 5), (5, 6), (6, 7)]);
        let lcc = largest_component(&g, &connected_components(&g));
        assert_eq!(lcc.nodes, vec![3, 4, 5, 6, 7]);
        assert_eq!(lcc.graph.edge_count(), 4);

        let g = graph(6, &[(3, 4), (4, 5), (0, 1), (1, 2)]);
        assert_eq!(largest_component(&g, &connected_components(&g)).nodes, vec![0, 1, 2]);

        let g = graph(3, &[(0, 1), (1, 2)]);
        let lcc = largest_component(&g, &connected_components(&g));
        assert_eq!(lcc.graph, g);

        let g = graph(0, &[]);
        assert!(largest_component(&g, &connected_components(&g)).nodes.is_empty());
    }

    #[test]
    fn kcore_examples() {
        let k4 = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(k_core_decomposition(&k4).coreness, vec![3; 4]);
        let path = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert_eq!(k_core_decomposition(&path).coreness, vec![1; 5]);
        // triangle a,b,c plus pendant d-a
        let tp = graph(4, &[(0, 1), (1, 2), (0, 2), (3, 0)]);
        assert_eq!(k_core_decomposition(&tp).coreness, vec![2, 2, 2, 1]);
        let iso = graph(2, &[]);
        assert_eq!(k_core_decomposition(&iso).coreness, vec![0, 0]);
        assert_eq!(k_core_decomposition(&tp).max_core_members(), vec![0, 1, 2]);
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, m: usize) -> UndirectedGraph {
        let pairs: Vec<(u32, u32)> =
            (0..m).map(|_| (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32))).collect();
        UndirectedGraph::from_pairs(n, pairs)
    }

    #[test]
    fn bucket_peeling_matches_naive_with_shuffled_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let n = rng.gen_range(1..120);
            let m = rng.gen_range(0..n * 4);
            let g = random_graph(&mut rng, n, m);
            let fast = k_core_decomposition(&g).coreness;
            assert_eq!(fast, naive_coreness(&g, |t| t[0]));
            let mut tie_rng = ChaCha8Rng::seed_from_u64(n as u64);
            assert_eq!(fast, naive_coreness(&g, |t| t[tie_rng.gen_range(0..t.len())]));
            for v in 0..n as u32 {
                assert!(fast[v as usize] as usize <= g.degree(v));
            }
        }
    }

    #[test]
    fn union_find_matches_bfs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let n = rng.gen_range(1..500);
            let m = rng.gen_range(0..n);
            let g = random_graph(&mut rng, n, m);
            let c = connected_components(&g);
            assert_eq!(c.component, bfs_components(&g));
            assert_eq!(c.histogram().iter().map(|(s, k)| s * k).sum::<usize>(), n);
        }
    }
}
