//! Undirected weighted graphs with terminal flags, and trees over them.

use std::collections::BTreeSet;

use crate::geometry::{cost_eq, Dsu};

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    adj: Vec<Vec<(usize, f64)>>,
    terminal: Vec<bool>,
    edge_count: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            terminal: vec![false; n],
            edge_count: 0,
        }
    }

    /// Adds an undirected edge. Weights must be finite and non-negative.
    pub fn add_edge(&mut self, u: usize, v: usize, w: f64) {
        assert!(u != v, "self loop");
        assert!(w >= 0.0 && w.is_finite(), "bad edge weight {w}");
        self.adj[u].push((v, w));
        self.adj[v].push((u, w));
        self.edge_count += 1;
    }

    pub fn set_terminal(&mut self, v: usize, flag: bool) {
        self.terminal[v] = flag;
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.terminal[v]
    }

    pub fn terminals(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&v| self.terminal[v])
            .collect()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    /// Weight of the lightest edge between `u` and `v`, if any.
    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        self.adj[u]
            .iter()
            .filter(|&&(x, _)| x == v)
            .map(|&(_, w)| w)
            .min_by(f64::total_cmp)
    }

    /// Every edge once, as `(min, max, weight)`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (u, nbrs) in self.adj.iter().enumerate() {
            for &(v, w) in nbrs {
                if u < v {
                    out.push((u, v, w));
                }
            }
        }
        out
    }
}

/// A tree inside a [`Graph`]: its node set, edges, and total weight.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphTree {
    pub nodes: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub cost: f64,
}

impl GraphTree {
    /// Builds a tree from edges, taking weights from `g`. A single isolated
    /// node may be supplied through `lone`.
    pub fn from_edges(g: &Graph, edges: Vec<(usize, usize)>, lone: Option<usize>) -> Self {
        let mut nodes: BTreeSet<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        if let Some(v) = lone {
            nodes.insert(v);
        }
        let cost = edges
            .iter()
            .map(|&(u, v)| g.weight(u, v).expect("tree edge missing from graph"))
            .sum();
        GraphTree {
            nodes: nodes.into_iter().collect(),
            edges,
            cost,
        }
    }

    /// Connected, acyclic, uses only graph edges, and the cost is consistent.
    pub fn check_tree(&self, g: &Graph) -> Result<(), String> {
        if self.nodes.is_empty() {
            return Err("empty tree".into());
        }
        if self.edges.len() + 1 != self.nodes.len() {
            return Err(format!(
                "{} edges for {} nodes",
                self.edges.len(),
                self.nodes.len()
            ));
        }
        let pos = |v: usize| self.nodes.binary_search(&v);
        let mut dsu = Dsu::new(self.nodes.len());
        let mut total = 0.0;
        for &(u, v) in &self.edges {
            let w = g
                .weight(u, v)
                .ok_or_else(|| format!("edge ({u},{v}) not in graph"))?;
            total += w;
            let (Ok(a), Ok(b)) = (pos(u), pos(v)) else {
                return Err(format!("edge ({u},{v}) leaves the node set"));
            };
            if !dsu.union(a, b) {
                return Err(format!("edge ({u},{v}) closes a cycle"));
            }
        }
        if !cost_eq(total, self.cost) {
            return Err(format!("cost {} but edges weigh {}", self.cost, total));
        }
        Ok(())
    }

    pub fn spans_terminals(&self, g: &Graph) -> bool {
        g.terminals()
            .iter()
            .all(|t| self.nodes.binary_search(t).is_ok())
    }
}

/// All-pairs shortest paths (Floyd–Warshall) with next-hop reconstruction.
pub(crate) struct AllPairs {
    n: usize,
    dist: Vec<f64>,
    next: Vec<usize>,
}

impl AllPairs {
    pub fn new(g: &Graph) -> Self {
        let n = g.node_count();
        let mut dist = vec![f64::INFINITY; n * n];
        let mut next = vec![usize::MAX; n * n];
        for v in 0..n {
            dist[v * n + v] = 0.0;
            next[v * n + v] = v;
        }
        for (u, v, w) in g.edges() {
            if w < dist[u * n + v] {
                dist[u * n + v] = w;
                dist[v * n + u] = w;
                next[u * n + v] = v;
                next[v * n + u] = u;
            }
        }
        for k in 0..n {
            for i in 0..n {
                let dik = dist[i * n + k];
                if dik == f64::INFINITY {
                    continue;
                }
                for j in 0..n {
                    let cand = dik + dist[k * n + j];
                    if cand < dist[i * n + j] {
                        dist[i * n + j] = cand;
                        next[i * n + j] = next[i * n + k];
                    }
                }
            }
        }
        AllPairs { n, dist, next }
    }

    pub fn dist(&self, u: usize, v: usize) -> f64 {
        self.dist[u * self.n + v]
    }

    /// Node sequence of a shortest `u`–`v` path; `None` if unreachable.
    pub fn path(&self, u: usize, v: usize) -> Option<Vec<usize>> {
        if self.next[u * self.n + v] == usize::MAX {
            return None;
        }
        let mut out = vec![u];
        let mut cur = u;
        while cur != v {
            cur = self.next[cur * self.n + v];
            out.push(cur);
        }
        Some(out)
    }
}

/// Turns an arbitrary connected edge set into a tree: MST of the induced
/// subgraph, then non-terminal leaves are pruned repeatedly.
pub(crate) fn clean_subgraph(g: &Graph, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut uniq: Vec<(usize, usize, f64)> = edges
        .iter()
        .map(|&(u, v)| (u.min(v), u.max(v)))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|(u, v)| (u, v, g.weight(u, v).expect("edge in graph")))
        .collect();
    uniq.sort_by(|a, b| a.2.total_cmp(&b.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let mut dsu = Dsu::new(g.node_count());
    let kept: Vec<(usize, usize)> = uniq
        .into_iter()
        .filter(|&(u, v, _)| dsu.union(u, v))
        .map(|(u, v, _)| (u, v))
        .collect();
    prune_leaves(g, kept)
}

/// Removes non-terminal leaves until none remain.
pub(crate) fn prune_leaves(g: &Graph, mut edges: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    loop {
        let mut degree = vec![0usize; g.node_count()];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let before = edges.len();
        edges.retain(|&(u, v)| {
            let leaf_u = degree[u] == 1 && !g.is_terminal(u);
            let leaf_v = degree[v] == 1 && !g.is_terminal(v);
            !(leaf_u || leaf_v)
        });
        if edges.len() == before {
            return edges;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph() -> Graph {
        let mut g = Graph::new(4);
        g.add_edge(0, 1, 1.0);
        g.add_edge(1, 2, 2.0);
        g.add_edge(2, 3, 1.0);
        g.add_edge(0, 3, 10.0);
        g
    }

    #[test]
    fn shortest_paths() {
        let g = path_graph();
        let ap = AllPairs::new(&g);
        assert_eq!(ap.dist(0, 3), 4.0);
        assert_eq!(ap.path(0, 3).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(ap.path(2, 2).unwrap(), vec![2]);
    }

    #[test]
    fn unreachable_has_no_path() {
        let mut g = Graph::new(3);
        g.add_edge(0, 1, 1.0);
        let ap = AllPairs::new(&g);
        assert!(ap.path(0, 2).is_none());
        assert!(ap.dist(0, 2).is_infinite());
    }

    #[test]
    fn clean_drops_cycle_and_dangling_leaf() {
        let mut g = path_graph();
        g.set_terminal(0, true);
        g.set_terminal(2, true);
        let edges = clean_subgraph(&g, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let t = GraphTree::from_edges(&g, edges, None);
        assert_eq!(t.edges, vec![(0, 1), (1, 2)]);
        assert_eq!(t.cost, 3.0);
        assert!(t.check_tree(&g).is_ok());
        assert!(t.spans_terminals(&g));
    }

    #[test]
    fn check_tree_catches_cycles() {
        let g = path_graph();
        let t = GraphTree {
            nodes: vec![0, 1, 2, 3],
            edges: vec![(0, 1), (1, 2), (2, 3), (0, 3)],
            cost: 14.0,
        };
        assert!(t.check_tree(&g).is_err());
    }
}
