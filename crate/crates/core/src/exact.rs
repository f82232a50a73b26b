//! Ground-truth solvers. These never approximate: anything beyond their
//! guards is an error.

use crate::error::{Error, Result};
use crate::geometry::{point_distance, prim_dense, Point, PointTree, COST_RTOL};
use crate::graph::{clean_subgraph, AllPairs, Graph, GraphTree};
use crate::instance::{ChoiceSolution, Instance};
use crate::reduction::Cnf2Formula;

/// Largest instance the unpruned enumeration accepts.
pub const MAX_ENUM_SEGMENTS: usize = 32;
/// Largest instance the pruned search accepts; the gadget instances of the
/// reduction reach 41 segments.
pub const MAX_BNB_SEGMENTS: usize = 64;
pub const MAX_STEINER_TERMINALS: usize = 14;
pub const MAX_SAT_VARIABLES: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BnBConfig {
    /// Maximum number of search nodes; 0 means unlimited.
    pub node_budget: u64,
    pub use_lower_bound: bool,
}

impl Default for BnBConfig {
    fn default() -> Self {
        BnBConfig {
            node_budget: 0,
            use_lower_bound: true,
        }
    }
}

impl BnBConfig {
    pub fn unpruned() -> Self {
        BnBConfig {
            node_budget: 0,
            use_lower_bound: false,
        }
    }
}

/// Optimum of a generalized MST over point clusters: one point per cluster.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterSolution {
    pub choices: Vec<usize>,
    pub tree: PointTree,
    pub cost: f64,
    pub nodes_visited: u64,
}

/// Exact MSTS. Returns the lexicographically smallest optimal choice vector,
/// whether or not the lower bound is enabled. Without it, choice vectors are
/// enumerated in lexicographic order.
pub fn brute_force_msts(inst: &Instance, cfg: BnBConfig) -> Result<ChoiceSolution> {
    let clusters: Vec<Vec<Point>> = inst.segments.iter().map(|s| vec![s.a, s.b]).collect();
    match cluster_search(&clusters, cfg)? {
        Search::Done(sol) => to_choice(inst, &sol.choices),
        Search::OutOfBudget(best) => Err(Error::BudgetExceeded {
            best: best
                .map(|c| to_choice(inst, &c).map(Box::new))
                .transpose()?,
        }),
    }
}

fn to_choice(inst: &Instance, choices: &[usize]) -> Result<ChoiceSolution> {
    ChoiceSolution::from_choices(inst, choices.iter().map(|&c| c as u8).collect())
}

/// Exact generalized MST where cluster `i` may contribute any one of its points.
pub fn exact_cluster_mst(clusters: &[Vec<Point>], cfg: BnBConfig) -> Result<ClusterSolution> {
    match cluster_search(clusters, cfg)? {
        Search::Done(sol) => Ok(sol),
        Search::OutOfBudget(_) => Err(Error::BudgetExceeded { best: None }),
    }
}

enum Search {
    Done(ClusterSolution),
    OutOfBudget(Option<Vec<usize>>),
}

fn cluster_search(clusters: &[Vec<Point>], cfg: BnBConfig) -> Result<Search> {
    let n = clusters.len();
    if n == 0 {
        return Err(Error::EmptyPointSet);
    }
    if clusters.iter().any(Vec::is_empty) {
        return Err(Error::InvalidArgument("empty cluster".into()));
    }
    let guard = if cfg.use_lower_bound {
        MAX_BNB_SEGMENTS
    } else {
        MAX_ENUM_SEGMENTS
    };
    if n > guard {
        return Err(Error::TooLarge);
    }
    let mut s = Searcher::new(clusters, cfg);
    let mut assign = vec![usize::MAX; n];
    if cfg.use_lower_bound {
        s.pruned();
    } else {
        s.dfs(0, &mut assign);
    }
    let Some(best) = s.best.take() else {
        return Ok(Search::OutOfBudget(None));
    };
    if s.out_of_budget {
        return Ok(Search::OutOfBudget(Some(best)));
    }
    let pts: Vec<Point> = best
        .iter()
        .enumerate()
        .map(|(i, &c)| clusters[i][c])
        .collect();
    let edges = prim_dense(n, |i, j| point_distance(pts[i], pts[j]));
    let tree = PointTree::from_edges(pts, edges);
    Ok(Search::Done(ClusterSolution {
        cost: tree.cost,
        choices: best,
        tree,
        nodes_visited: s.nodes,
    }))
}

fn tol(c: f64) -> f64 {
    COST_RTOL * c.abs().max(1.0)
}

struct Searcher<'a> {
    clusters: &'a [Vec<Point>],
    /// First point id of each cluster in the flattened tables.
    offset: Vec<usize>,
    /// Distances between all points, flattened.
    dist: Vec<f64>,
    /// Distance from each point to the nearest point of each cluster.
    near: Vec<f64>,
    /// Cluster-to-cluster minimum over all point pairs.
    relaxed: Vec<f64>,
    cfg: BnBConfig,
    best: Option<Vec<usize>>,
    best_cost: f64,
    nodes: u64,
    out_of_budget: bool,
}

impl<'a> Searcher<'a> {
    fn new(clusters: &'a [Vec<Point>], cfg: BnBConfig) -> Self {
        let n = clusters.len();
        let mut offset = Vec::with_capacity(n);
        let mut pts = Vec::new();
        for c in clusters {
            offset.push(pts.len());
            pts.extend_from_slice(c);
        }
        let np = pts.len();
        let mut dist = vec![0.0; np * np];
        for p in 0..np {
            for q in 0..np {
                dist[p * np + q] = point_distance(pts[p], pts[q]);
            }
        }
        let mut near = vec![f64::INFINITY; np * n];
        for p in 0..np {
            for (j, c) in clusters.iter().enumerate() {
                for q in offset[j]..offset[j] + c.len() {
                    near[p * n + j] = near[p * n + j].min(dist[p * np + q]);
                }
            }
        }
        let mut relaxed = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    relaxed[i * n + j] = (offset[i]..offset[i] + clusters[i].len())
                        .map(|p| near[p * n + j])
                        .fold(f64::INFINITY, f64::min);
                }
            }
        }
        Searcher {
            clusters,
            offset,
            dist,
            near,
            relaxed,
            cfg,
            best: None,
            best_cost: f64::INFINITY,
            nodes: 0,
            out_of_budget: false,
        }
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.cfg.node_budget > 0 && self.nodes > self.cfg.node_budget {
            self.out_of_budget = true;
        }
        !self.out_of_budget
    }

    fn pair_weight(&self, assign: &[usize], i: usize, j: usize) -> f64 {
        let n = self.clusters.len();
        let np = self.near.len() / n;
        match (assign[i], assign[j]) {
            (usize::MAX, usize::MAX) => self.relaxed[i * n + j],
            (ci, usize::MAX) => self.near[(self.offset[i] + ci) * n + j],
            (usize::MAX, cj) => self.near[(self.offset[j] + cj) * n + i],
            (ci, cj) => self.dist[(self.offset[i] + ci) * np + self.offset[j] + cj],
        }
    }

    /// MST over clusters where undecided clusters may use any of their points.
    /// Never exceeds the cost of any completion of `assign`.
    fn lower_bound(&self, assign: &[usize]) -> f64 {
        let n = self.clusters.len();
        let mut in_tree = vec![false; n];
        let mut best: Vec<f64> = (0..n).map(|v| self.pair_weight(assign, 0, v)).collect();
        in_tree[0] = true;
        let mut total = 0.0;
        for _ in 1..n {
            let mut pick = usize::MAX;
            for v in 0..n {
                if !in_tree[v] && (pick == usize::MAX || best[v] < best[pick]) {
                    pick = v;
                }
            }
            in_tree[pick] = true;
            total += best[pick];
            for v in 0..n {
                if !in_tree[v] {
                    let w = self.pair_weight(assign, pick, v);
                    if w < best[v] {
                        best[v] = w;
                    }
                }
            }
        }
        total
    }

    fn leaf_cost(&self, assign: &[usize]) -> f64 {
        let pts: Vec<Point> = assign
            .iter()
            .enumerate()
            .map(|(i, &c)| self.clusters[i][c])
            .collect();
        let np = self.near.len() / self.clusters.len();
        let id = |i: usize| self.offset[i] + assign[i];
        let edges = prim_dense(pts.len(), |i, j| self.dist[id(i) * np + id(j)]);
        crate::geometry::edge_cost(&pts, &edges)
    }

    fn offer(&mut self, assign: &[usize]) {
        let c = self.leaf_cost(assign);
        if self.best.is_none() || c < self.best_cost - tol(self.best_cost) {
            self.best_cost = c;
            self.best = Some(assign.to_vec());
        }
    }

    /// Two passes. The first finds the optimal cost, branching on long
    /// segments first (they decide the tree shape) and trying the child with
    /// the smallest bound first. The second fixes choices in index order,
    /// keeping the smallest value that still admits a completion within the
    /// tolerance of that cost, which yields the lexicographically smallest
    /// optimum.
    fn pruned(&mut self) {
        let n = self.clusters.len();
        let order = self.branch_order();
        let mut assign = vec![usize::MAX; n];
        self.minimize(&order, &mut assign);
        if self.out_of_budget {
            return;
        }
        let Some(mut witness) = self.best.clone() else {
            return;
        };
        let target = self.best_cost + tol(self.best_cost);
        let mut assign = vec![usize::MAX; n];
        for k in 0..n {
            for c in 0..self.clusters[k].len() {
                assign[k] = c;
                if c == witness[k] && assign[..=k] == witness[..=k] {
                    break;
                }
                if let Some(w) = self.find_within(&order, &mut assign, target) {
                    witness = w;
                    break;
                }
                if self.out_of_budget {
                    return;
                }
            }
        }
        self.best_cost = self.leaf_cost(&witness);
        self.best = Some(witness);
    }

    /// Clusters whose points are far apart compared with their distance to
    /// the nearest other cluster come first: their choice changes the tree
    /// the most, and deciding them early tightens the bound for the rest.
    fn branch_order(&self) -> Vec<usize> {
        let n = self.clusters.len();
        let key: Vec<f64> = (0..n)
            .map(|i| {
                let pts = &self.clusters[i];
                let mut spread: f64 = 0.0;
                for &p in pts {
                    for &q in pts {
                        spread = spread.max(point_distance(p, q));
                    }
                }
                let gap = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| self.relaxed[i * n + j])
                    .fold(f64::INFINITY, f64::min);
                spread / gap.max(f64::MIN_POSITIVE)
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| key[j].total_cmp(&key[i]).then(i.cmp(&j)));
        order
    }

    fn children_by_bound(&self, k: usize, assign: &mut [usize]) -> Vec<(f64, usize)> {
        let mut kids: Vec<(f64, usize)> = (0..self.clusters[k].len())
            .map(|c| {
                assign[k] = c;
                (self.lower_bound(assign), c)
            })
            .collect();
        assign[k] = usize::MAX;
        kids.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        kids
    }

    fn branch(&self, order: &[usize], assign: &mut [usize]) -> Option<(usize, Vec<(f64, usize)>)> {
        let k = order.iter().copied().find(|&i| assign[i] == usize::MAX)?;
        Some((k, self.children_by_bound(k, assign)))
    }

    fn minimize(&mut self, order: &[usize], assign: &mut Vec<usize>) {
        if !self.tick() {
            return;
        }
        let Some((k, kids)) = self.branch(order, assign) else {
            self.offer(assign);
            return;
        };
        for (lb, c) in kids {
            if self.best.is_some() && lb >= self.best_cost - tol(self.best_cost) {
                break;
            }
            assign[k] = c;
            self.minimize(order, assign);
            if self.out_of_budget {
                break;
            }
        }
        assign[k] = usize::MAX;
    }

    /// Some completion of `assign` costing at most `target`, if any.
    fn find_within(
        &mut self,
        order: &[usize],
        assign: &mut Vec<usize>,
        target: f64,
    ) -> Option<Vec<usize>> {
        if !self.tick() {
            return None;
        }
        let Some((k, kids)) = self.branch(order, assign) else {
            return (self.leaf_cost(assign) <= target).then(|| assign.clone());
        };
        let mut found = None;
        for (lb, c) in kids {
            if lb > target {
                break;
            }
            assign[k] = c;
            found = self.find_within(order, assign, target);
            if found.is_some() || self.out_of_budget {
                break;
            }
        }
        assign[k] = usize::MAX;
        found
    }

    /// Plain enumeration in lexicographic order.
    fn dfs(&mut self, k: usize, assign: &mut Vec<usize>) {
        if !self.tick() {
            return;
        }
        let n = self.clusters.len();
        if k == n {
            self.offer(assign);
            return;
        }
        for c in 0..self.clusters[k].len() {
            assign[k] = c;
            self.dfs(k + 1, assign);
            if self.out_of_budget {
                break;
            }
        }
        assign[k] = usize::MAX;
    }
}

/// Minimum Steiner tree over the terminals of `g` (Dreyfus–Wagner).
pub fn exact_steiner(g: &Graph) -> Result<GraphTree> {
    let terminals = g.terminals();
    if terminals.is_empty() {
        return Err(Error::NoSteinerTree);
    }
    if terminals.len() > MAX_STEINER_TERMINALS {
        return Err(Error::TooManyTerminals);
    }
    let root = terminals[0];
    if terminals.len() == 1 {
        return Ok(GraphTree {
            nodes: vec![root],
            edges: Vec::new(),
            cost: 0.0,
        });
    }
    let ap = AllPairs::new(g);
    if terminals.iter().any(|&t| ap.dist(root, t).is_infinite()) {
        return Err(Error::NoSteinerTree);
    }
    let base = &terminals[1..];
    let v = g.node_count();
    let k = base.len();
    let full = (1usize << k) - 1;
    let mut dp = vec![f64::INFINITY; (full + 1) * v];
    let mut relay = vec![usize::MAX; (full + 1) * v];
    let mut split = vec![0usize; (full + 1) * v];
    for (i, &t) in base.iter().enumerate() {
        let m = 1 << i;
        for u in 0..v {
            dp[m * v + u] = ap.dist(t, u);
        }
    }
    let mut merged = vec![f64::INFINITY; v];
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        let low = mask & mask.wrapping_neg();
        for u in 0..v {
            let mut best = f64::INFINITY;
            let mut best_sub = 0;
            // enumerate proper subsets that contain the lowest bit
            let rest = mask ^ low;
            let mut sub = rest;
            loop {
                let part = sub | low;
                if part != mask {
                    let c = dp[part * v + u] + dp[(mask ^ part) * v + u];
                    if c < best {
                        best = c;
                        best_sub = part;
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            merged[u] = best;
            split[mask * v + u] = best_sub;
        }
        for w in 0..v {
            let mut best = f64::INFINITY;
            let mut arg = usize::MAX;
            for (u, &m) in merged.iter().enumerate() {
                let c = m + ap.dist(u, w);
                if c < best {
                    best = c;
                    arg = u;
                }
            }
            dp[mask * v + w] = best;
            relay[mask * v + w] = arg;
        }
    }
    let mut edges = Vec::new();
    let mut stack = vec![(full, root)];
    while let Some((mask, at)) = stack.pop() {
        if mask.count_ones() == 1 {
            let t = base[mask.trailing_zeros() as usize];
            push_path(&ap, t, at, &mut edges);
            continue;
        }
        let u = relay[mask * v + at];
        push_path(&ap, u, at, &mut edges);
        let part = split[mask * v + u];
        stack.push((part, u));
        stack.push((mask ^ part, u));
    }
    let tree_edges = clean_subgraph(g, &edges);
    let lone = if tree_edges.is_empty() {
        Some(root)
    } else {
        None
    };
    Ok(GraphTree::from_edges(g, tree_edges, lone))
}

fn push_path(ap: &AllPairs, from: usize, to: usize, edges: &mut Vec<(usize, usize)>) {
    let path = ap.path(from, to).expect("terminals are connected");
    edges.extend(path.windows(2).map(|w| (w[0], w[1])));
}

/// Exhaustive Max-2-SAT. Assignments are tried in lexicographic order
/// (false < true, variable 1 first); the first maximiser wins.
pub fn max2sat_brute(formula: &Cnf2Formula) -> Result<(Vec<bool>, usize)> {
    let n = formula.num_vars;
    if n > MAX_SAT_VARIABLES {
        return Err(Error::TooManyVariables);
    }
    let mut best = (Vec::new(), 0usize);
    let mut have = false;
    let mut assignment = vec![false; n];
    for code in 0u64..(1u64 << n) {
        for (i, slot) in assignment.iter_mut().enumerate() {
            *slot = (code >> (n - 1 - i)) & 1 == 1;
        }
        let sat = formula.satisfied_count(&assignment);
        if !have || sat > best.1 {
            best = (assignment.clone(), sat);
            have = true;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Segment;
    use crate::reduction::parse_cnf2;

    fn inst(segs: &[(f64, f64, f64, f64)]) -> Instance {
        Instance::new(
            segs.iter()
                .map(|&(a, b, c, d)| Segment::from_coords(a, b, c, d))
                .collect(),
            "",
        )
        .unwrap()
    }

    #[test]
    fn single_and_pair() {
        let one = brute_force_msts(&inst(&[(0.0, 0.0, 1.0, 0.0)]), BnBConfig::default()).unwrap();
        assert_eq!(one.cost, 0.0);
        assert_eq!(one.choices, vec![0]);

        let two = inst(&[(0.0, 0.0, 1.0, 0.0), (3.0, 0.0, 4.0, 0.0)]);
        for cfg in [BnBConfig::default(), BnBConfig::unpruned()] {
            let sol = brute_force_msts(&two, cfg).unwrap();
            assert_eq!(sol.choices, vec![1, 0]);
            assert_eq!(sol.cost, 2.0);
        }
    }

    #[test]
    fn guards_and_budget() {
        let segs: Vec<(f64, f64, f64, f64)> = (0..33)
            .map(|i| (i as f64 * 3.0, 0.0, i as f64 * 3.0 + 1.0, 0.0))
            .collect();
        let big = inst(&segs);
        assert!(matches!(
            brute_force_msts(&big, BnBConfig::unpruned()),
            Err(Error::TooLarge)
        ));

        let small = inst(&segs[..10]);
        let err = brute_force_msts(
            &small,
            BnBConfig {
                node_budget: 5,
                use_lower_bound: false,
            },
        )
        .unwrap_err();
        match err {
            Error::BudgetExceeded { best } => assert!(best.is_none()),
            e => panic!("unexpected {e}"),
        }
        let err = brute_force_msts(
            &small,
            BnBConfig {
                node_budget: 40,
                use_lower_bound: false,
            },
        )
        .unwrap_err();
        match err {
            Error::BudgetExceeded { best: Some(b) } => assert!(b.check(&small).is_ok()),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn steiner_two_terminals_is_shortest_path() {
        let mut g = Graph::new(4);
        g.add_edge(0, 1, 1.0);
        g.add_edge(1, 2, 1.5);
        g.add_edge(2, 3, 1.0);
        g.add_edge(0, 3, 5.0);
        g.set_terminal(0, true);
        g.set_terminal(3, true);
        let t = exact_steiner(&g).unwrap();
        assert_eq!(t.cost, 3.5);
        assert!(t.check_tree(&g).is_ok());
    }

    #[test]
    fn steiner_all_terminals_is_mst() {
        let mut g = Graph::new(4);
        for (u, v, w) in [
            (0, 1, 1.0),
            (1, 2, 2.0),
            (2, 3, 1.0),
            (0, 3, 2.5),
            (0, 2, 2.2),
        ] {
            g.add_edge(u, v, w);
        }
        for v in 0..4 {
            g.set_terminal(v, true);
        }
        assert_eq!(exact_steiner(&g).unwrap().cost, 4.0);
    }

    #[test]
    fn steiner_star_uses_center() {
        // 4 terminals on a unit star; terminals are pairwise 1.9 apart
        let mut g = Graph::new(5);
        for t in 1..5 {
            g.add_edge(0, t, 1.0);
            g.set_terminal(t, true);
        }
        for a in 1..5 {
            for b in a + 1..5 {
                g.add_edge(a, b, 1.9);
            }
        }
        let t = exact_steiner(&g).unwrap();
        assert_eq!(t.cost, 4.0);
        assert!(t.nodes.contains(&0));
    }

    #[test]
    fn steiner_errors() {
        let mut g = Graph::new(3);
        g.add_edge(0, 1, 1.0);
        g.set_terminal(0, true);
        g.set_terminal(2, true);
        assert!(matches!(exact_steiner(&g), Err(Error::NoSteinerTree)));

        let mut g = Graph::new(15);
        for v in 0..15 {
            g.set_terminal(v, true);
            if v > 0 {
                g.add_edge(v - 1, v, 1.0);
            }
        }
        assert!(matches!(exact_steiner(&g), Err(Error::TooManyTerminals)));
    }

    #[test]
    fn max2sat_examples() {
        let f = parse_cnf2("p cnf 2 1\n1 2 0\n").unwrap();
        assert_eq!(max2sat_brute(&f).unwrap(), (vec![false, true], 1));

        let f = parse_cnf2("p cnf 1 2\n1 1 0\n-1 -1 0\n").unwrap();
        assert_eq!(max2sat_brute(&f).unwrap().1, 1);

        let f = parse_cnf2("p cnf 3 2\n-1 2 0\n2 -3 0\n").unwrap();
        assert_eq!(max2sat_brute(&f).unwrap(), (vec![false, false, false], 2));
    }
}
