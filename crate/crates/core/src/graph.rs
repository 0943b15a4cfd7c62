//! Immutable undirected graphs in compressed adjacency form, plus the
//! union-find structure that realizes percolation clusters.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};

/// Simple undirected graph on nodes `0..n`.
///
/// Each undirected edge is stored once in `edges` (as `(min, max)`), and twice
/// in the flat adjacency array. `adjacent_edges` runs parallel to `neighbors`
/// and holds the edge id of each adjacency entry, so per-edge state (open/closed
/// bits, contagion probabilities) can be looked up from either endpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    adjacent_edges: Vec<usize>,
    edge_probabilities: Option<Vec<f64>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate pairs, and out-of-range ids.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut canonical = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Graph(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::Graph(format!("self-loop at node {u}")));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::Graph(format!("duplicate edge ({}, {})", key.0, key.1)));
            }
            canonical.push(key);
        }
        Ok(Self::build(n, canonical))
    }

    /// Internal constructor for edge lists already known to be simple and canonical.
    pub(crate) fn build(n: usize, edges: Vec<(usize, usize)>) -> Graph {
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut neighbors = vec![0usize; 2 * edges.len()];
        let mut adjacent_edges = vec![0usize; 2 * edges.len()];
        for (id, &(u, v)) in edges.iter().enumerate() {
            neighbors[cursor[u]] = v;
            adjacent_edges[cursor[u]] = id;
            cursor[u] += 1;
            neighbors[cursor[v]] = u;
            adjacent_edges[cursor[v]] = id;
            cursor[v] += 1;
        }
        // sorted neighbor lists keep BFS orders reproducible
        for u in 0..n {
            let range = offsets[u]..offsets[u + 1];
            let mut pairs: Vec<(usize, usize)> = neighbors[range.clone()]
                .iter()
                .copied()
                .zip(adjacent_edges[range.clone()].iter().copied())
                .collect();
            pairs.sort_unstable();
            for (slot, (w, e)) in range.zip(pairs) {
                neighbors[slot] = w;
                adjacent_edges[slot] = e;
            }
        }
        Graph {
            n,
            edges,
            offsets,
            neighbors,
            adjacent_edges,
            edge_probabilities: None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.neighbors[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Edge ids parallel to [`Graph::neighbors`].
    pub fn incident_edges(&self, u: usize) -> &[usize] {
        &self.adjacent_edges[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|u| self.degree(u)).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn edge_probabilities(&self) -> Option<&[f64]> {
        self.edge_probabilities.as_deref()
    }

    /// Attaches per-edge contagion probabilities, replacing any existing ones.
    pub fn with_edge_probabilities(mut self, probabilities: Vec<f64>) -> Result<Graph> {
        if probabilities.len() != self.edges.len() {
            return Err(Error::Input(format!(
                "{} edge probabilities for {} edges",
                probabilities.len(),
                self.edges.len()
            )));
        }
        if let Some(bad) = probabilities.iter().find(|q| !(0.0..=1.0).contains(*q)) {
            return Err(Error::Input(format!("edge probability {bad} outside [0, 1]")));
        }
        self.edge_probabilities = Some(probabilities);
        Ok(self)
    }

    pub fn without_edge_probabilities(mut self) -> Graph {
        self.edge_probabilities = None;
        self
    }

    /// Node-induced subgraph. Nodes are relabeled by ascending original id.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Subgraph {
        let mut new_to_old: Vec<usize> = nodes.to_vec();
        new_to_old.sort_unstable();
        new_to_old.dedup();
        let mut old_to_new = vec![None; self.n];
        for (new, &old) in new_to_old.iter().enumerate() {
            old_to_new[old] = Some(new);
        }
        let mut edges = Vec::new();
        let mut probabilities = self.edge_probabilities.as_ref().map(|_| Vec::new());
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            if let (Some(a), Some(b)) = (old_to_new[u], old_to_new[v]) {
                edges.push((a.min(b), a.max(b)));
                if let (Some(out), Some(src)) = (probabilities.as_mut(), &self.edge_probabilities) {
                    out.push(src[id]);
                }
            }
        }
        let mut graph = Graph::build(new_to_old.len(), edges);
        graph.edge_probabilities = probabilities;
        Subgraph {
            graph,
            old_to_new,
            new_to_old,
        }
    }

    /// Panics if any structural invariant is broken. Used by tests and debug builds.
    pub fn assert_invariants(&self) {
        let degree_sum: usize = (0..self.n).map(|u| self.degree(u)).sum();
        assert_eq!(degree_sum, 2 * self.edges.len(), "degree sum must equal 2E");
        let mut seen = HashSet::new();
        for &(u, v) in &self.edges {
            assert!(u < v, "edges are stored canonically and loop-free");
            assert!(seen.insert((u, v)), "duplicate edge ({u}, {v})");
        }
        for u in 0..self.n {
            for &v in self.neighbors(u) {
                assert!(self.neighbors(v).contains(&u), "asymmetric adjacency {u}-{v}");
            }
        }
    }
}

/// An induced subgraph together with the relabeling maps.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: Graph,
    pub old_to_new: Vec<Option<usize>>,
    pub new_to_old: Vec<usize>,
}

/// Union-find with union by size and path halving.
#[derive(Clone, Debug)]
pub struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    pub fn new(n: usize) -> DisjointSet {
        DisjointSet {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Back to all singletons, keeping the allocation.
    pub fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i;
        }
        self.size.fill(1);
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            let grand = self.parent[self.parent[x]];
            self.parent[x] = grand;
            x = grand;
        }
        x
    }

    /// Merges the sets of `a` and `b`; returns false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let mut ra = self.find(a);
        let mut rb = self.find(b);
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    /// Size of the set containing `x`.
    pub fn set_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }

    /// Size stored at a root. Only meaningful when `root` is a root.
    pub fn root_size(&self, root: usize) -> usize {
        self.size[root]
    }

    pub fn is_root(&self, x: usize) -> bool {
        self.parent[x] == x
    }

    pub fn largest_set_size(&self) -> usize {
        (0..self.parent.len())
            .filter(|&x| self.parent[x] == x)
            .map(|x| self.size[x])
            .max()
            .unwrap_or(0)
    }
}

/// Connected components, largest first. Each component lists its nodes in
/// ascending order; equal-size components are ordered by their smallest node.
pub fn connected_components(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut visited = vec![false; n];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        queue.push_back(start);
        let mut members = Vec::new();
        while let Some(u) = queue.pop_front() {
            members.push(u);
            for &v in g.neighbors(u) {
                if !visited[v] {
                    visited[v] = true;
                    queue.push_back(v);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    // components are discovered in order of their smallest node, so a stable
    // sort by size alone gives the tie-break
    components.sort_by(|a, b| b.len().cmp(&a.len()));
    components
}

/// Largest connected component as a standalone graph.
pub fn dominant_component(g: &Graph) -> Result<Subgraph> {
    if g.node_count() == 0 {
        return Err(Error::Input("dominant component of an empty graph".into()));
    }
    let components = connected_components(g);
    Ok(g.induced_subgraph(&components[0]))
}

/// Mean local clustering coefficient; nodes of degree < 2 contribute 0.
pub fn average_clustering(g: &Graph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    for u in 0..n {
        let nb = g.neighbors(u);
        let d = nb.len();
        if d < 2 {
            continue;
        }
        let mut links = 0usize;
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if g.has_edge(a, b) {
                    links += 1;
                }
            }
        }
        total += 2.0 * links as f64 / (d * (d - 1)) as f64;
    }
    total / n as f64
}
