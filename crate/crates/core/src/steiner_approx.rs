//! Approximation through a Steiner tree on an auxiliary graph.
//!
//! Every segment `i` contributes three nodes: its endpoints `3i` (`a`) and
//! `3i + 1` (`b`), and a coordinate-free terminal `3i + 2` that is reachable
//! only from those two endpoints, at zero cost. A Steiner tree over the
//! terminals therefore touches at least one endpoint per segment; the repair
//! pass removes surplus endpoints until exactly one per segment remains.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::exact::exact_steiner;
use crate::geometry::{cost_le, point_distance, prim_dense, Dsu, Point, PointTree};
use crate::graph::{Graph, GraphTree};
use crate::instance::{ChoiceSolution, Instance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeRole {
    EndpointA(usize),
    EndpointB(usize),
    Terminal(usize),
}

impl NodeRole {
    pub fn segment(self) -> usize {
        match self {
            NodeRole::EndpointA(i) | NodeRole::EndpointB(i) | NodeRole::Terminal(i) => i,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AuxGraph {
    graph: Graph,
    coords: Vec<Option<Point>>,
    segments: usize,
}

pub fn endpoint_node(segment: usize, side: u8) -> usize {
    3 * segment + side as usize
}

pub fn terminal_node(segment: usize) -> usize {
    3 * segment + 2
}

impl AuxGraph {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn segment_count(&self) -> usize {
        self.segments
    }

    pub fn role(&self, v: usize) -> NodeRole {
        match v % 3 {
            0 => NodeRole::EndpointA(v / 3),
            1 => NodeRole::EndpointB(v / 3),
            _ => NodeRole::Terminal(v / 3),
        }
    }

    /// Coordinates of an endpoint node; terminals have none.
    pub fn coord(&self, v: usize) -> Option<Point> {
        self.coords[v]
    }

    /// The other endpoint node of the same segment.
    fn twin(v: usize) -> usize {
        if v.is_multiple_of(3) {
            v + 1
        } else {
            v - 1
        }
    }
}

pub fn build_aux_graph(inst: &Instance) -> AuxGraph {
    let n = inst.len();
    let mut graph = Graph::new(3 * n);
    let mut coords = vec![None; 3 * n];
    for (i, s) in inst.segments.iter().enumerate() {
        coords[endpoint_node(i, 0)] = Some(s.a);
        coords[endpoint_node(i, 1)] = Some(s.b);
        graph.set_terminal(terminal_node(i), true);
        graph.add_edge(endpoint_node(i, 0), terminal_node(i), 0.0);
        graph.add_edge(endpoint_node(i, 1), terminal_node(i), 0.0);
    }
    for i in 0..n {
        for j in i + 1..n {
            for si in 0..2u8 {
                for sj in 0..2u8 {
                    let (u, v) = (endpoint_node(i, si), endpoint_node(j, sj));
                    let w = point_distance(coords[u].unwrap(), coords[v].unwrap());
                    graph.add_edge(u, v, w);
                }
            }
        }
    }
    AuxGraph {
        graph,
        coords,
        segments: n,
    }
}

/// A Steiner tree over the auxiliary graph plus the factor its solver promises.
#[derive(Clone, Debug, PartialEq)]
pub struct SteinerResult {
    pub tree: GraphTree,
    pub guarantee_factor: f64,
}

/// A Steiner tree subroutine with a known approximation factor.
pub trait SteinerSolver {
    fn name(&self) -> &'static str;
    fn guarantee_factor(&self) -> f64;
    fn solve(&self, aux: &AuxGraph) -> Result<SteinerResult>;
}

/// Classical 2-approximation: MST over the terminal distance graph, with
/// every MST edge expanded into a shortest path.
///
/// In the auxiliary graph a shortest terminal path may hop through other
/// terminals, but each hop between consecutive terminals is a direct
/// endpoint-to-endpoint edge (triangle inequality). The MST over direct
/// segment distances therefore has the same weight as the MST over the full
/// metric closure, and it expands without creating cycles.
#[derive(Clone, Copy, Debug, Default)]
pub struct TerminalMstSteiner;

impl SteinerSolver for TerminalMstSteiner {
    fn name(&self) -> &'static str {
        "terminal-mst"
    }

    fn guarantee_factor(&self) -> f64 {
        2.0
    }

    fn solve(&self, aux: &AuxGraph) -> Result<SteinerResult> {
        let n = aux.segment_count();
        if n == 0 {
            return Err(Error::NoSteinerTree);
        }
        let closest = |i: usize, j: usize| -> (f64, u8, u8) {
            let mut best = (f64::INFINITY, 0, 0);
            for si in 0..2u8 {
                for sj in 0..2u8 {
                    let d = point_distance(
                        aux.coords[endpoint_node(i, si)].unwrap(),
                        aux.coords[endpoint_node(j, sj)].unwrap(),
                    );
                    if d < best.0 {
                        best = (d, si, sj);
                    }
                }
            }
            best
        };
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        if n == 1 {
            edges.insert((endpoint_node(0, 0), terminal_node(0)));
        }
        for (i, j) in prim_dense(n, |i, j| closest(i.min(j), i.max(j)).0) {
            let (_, si, sj) = closest(i, j);
            let (u, v) = (endpoint_node(i, si), endpoint_node(j, sj));
            edges.insert((u, terminal_node(i)));
            edges.insert((u, v));
            edges.insert((v, terminal_node(j)));
        }
        Ok(SteinerResult {
            tree: GraphTree::from_edges(&aux.graph, edges.into_iter().collect(), None),
            guarantee_factor: self.guarantee_factor(),
        })
    }
}

/// Optimal Steiner tree by Dreyfus–Wagner; small instances only.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactSteinerSolver;

impl SteinerSolver for ExactSteinerSolver {
    fn name(&self) -> &'static str {
        "dreyfus-wagner"
    }

    fn guarantee_factor(&self) -> f64 {
        1.0
    }

    fn solve(&self, aux: &AuxGraph) -> Result<SteinerResult> {
        Ok(SteinerResult {
            tree: exact_steiner(&aux.graph)?,
            guarantee_factor: 1.0,
        })
    }
}

/// The default Steiner subroutine (factor 2).
pub fn approx_steiner(aux: &AuxGraph) -> Result<SteinerResult> {
    TerminalMstSteiner.solve(aux)
}

/// Result of [`repair_tree`] with a trace of what the pass did.
#[derive(Clone, Debug, PartialEq)]
pub struct RepairOutcome {
    pub result: SteinerResult,
    /// Segments found with both endpoints, in the order they were pushed.
    pub bad_segments: Vec<usize>,
    /// One entry per deletion, in processing order.
    pub steps: Vec<RepairStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairStep {
    pub segment: usize,
    pub deleted: usize,
    /// Edges added to reconnect the deleted endpoint's neighbours.
    pub added: Vec<(usize, usize)>,
}

struct WorkTree<'a> {
    aux: &'a AuxGraph,
    adj: BTreeMap<usize, BTreeSet<usize>>,
}

impl<'a> WorkTree<'a> {
    fn new(aux: &'a AuxGraph, tree: &GraphTree) -> Self {
        let mut adj: BTreeMap<usize, BTreeSet<usize>> =
            tree.nodes.iter().map(|&v| (v, BTreeSet::new())).collect();
        for &(u, v) in &tree.edges {
            adj.entry(u).or_default().insert(v);
            adj.entry(v).or_default().insert(u);
        }
        WorkTree { aux, adj }
    }

    fn has(&self, v: usize) -> bool {
        self.adj.contains_key(&v)
    }

    fn link(&mut self, u: usize, v: usize) {
        self.adj.get_mut(&u).unwrap().insert(v);
        self.adj.get_mut(&v).unwrap().insert(u);
    }

    fn remove_node(&mut self, v: usize) -> BTreeSet<usize> {
        let nbrs = self.adj.remove(&v).unwrap_or_default();
        for u in &nbrs {
            self.adj.get_mut(u).unwrap().remove(&v);
        }
        nbrs
    }

    fn weight(&self, u: usize, v: usize) -> f64 {
        self.aux
            .graph
            .weight(u, v)
            .expect("edge of auxiliary graph")
    }

    /// Strip non-terminal leaves, keeping the last endpoint of a segment.
    fn prune(&mut self) {
        loop {
            let leaf = self.adj.iter().find_map(|(&v, nbrs)| {
                if self.aux.graph.is_terminal(v) || nbrs.len() != 1 {
                    return None;
                }
                let t = terminal_node(v / 3);
                let only_home = nbrs.contains(&t) && self.adj.get(&t).is_some_and(|s| s.len() == 1);
                (!only_home).then_some(v)
            });
            match leaf {
                Some(v) => {
                    self.remove_node(v);
                }
                None => return,
            }
        }
    }

    /// `nodes` sorted counterclockwise around `pivot`: angle in [0, 2π) from
    /// the positive x-axis, then distance, then node index.
    fn ccw(&self, pivot: Point, nodes: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut keyed: Vec<(f64, f64, usize)> = nodes
            .into_iter()
            .map(|v| {
                let p = self.aux.coords[v].expect("geometric node");
                let a = (p.y - pivot.y).atan2(p.x - pivot.x);
                let a = if a < 0.0 { a + TAU } else { a + 0.0 };
                (a, point_distance(pivot, p), v)
            })
            .collect();
        keyed.sort_by(|x, y| {
            x.0.total_cmp(&y.0)
                .then(x.1.total_cmp(&y.1))
                .then(x.2.cmp(&y.2))
        });
        keyed.into_iter().map(|k| k.2).collect()
    }

    /// Pre-order from the lexicographically smallest endpoint, children in
    /// counterclockwise order (terminal children last). Returns the segments
    /// whose second endpoint was reached, in discovery order.
    fn find_bad_segments(&self) -> Vec<usize> {
        let Some(root) = self
            .adj
            .keys()
            .copied()
            .filter(|&v| !self.aux.graph.is_terminal(v))
            .min_by(|&u, &v| {
                let (p, q) = (self.aux.coords[u].unwrap(), self.aux.coords[v].unwrap());
                p.lex_cmp(&q).then(u.cmp(&v))
            })
        else {
            return Vec::new();
        };
        let mut seen = BTreeSet::new();
        let mut bad = Vec::new();
        let mut stack = vec![(root, usize::MAX)];
        while let Some((v, parent)) = stack.pop() {
            seen.insert(v);
            if !self.aux.graph.is_terminal(v) && seen.contains(&AuxGraph::twin(v)) {
                bad.push(v / 3);
            }
            let kids = self.adj[&v].iter().copied().filter(|&u| u != parent);
            let ordered: Vec<usize> = match self.aux.coords[v] {
                Some(p) => {
                    let (terms, geo): (Vec<usize>, Vec<usize>) =
                        kids.partition(|&u| self.aux.graph.is_terminal(u));
                    let mut out = self.ccw(p, geo);
                    out.extend(terms);
                    out
                }
                None => kids.collect(),
            };
            stack.extend(ordered.into_iter().rev().map(|u| (u, v)));
        }
        bad
    }

    fn check_structure(&self) -> Result<()> {
        let nodes: Vec<usize> = self.adj.keys().copied().collect();
        let edges: usize = self.adj.values().map(BTreeSet::len).sum::<usize>() / 2;
        if edges + 1 != nodes.len() {
            return Err(Error::RepairStructure(format!(
                "{edges} edges over {} nodes",
                nodes.len()
            )));
        }
        let mut dsu = Dsu::new(nodes.len());
        let idx = |v: usize| nodes.binary_search(&v).unwrap();
        for (&u, nbrs) in &self.adj {
            for &v in nbrs {
                if u < v && !dsu.union(idx(u), idx(v)) {
                    return Err(Error::RepairStructure("cycle".into()));
                }
            }
        }
        Ok(())
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .flat_map(|(&u, nbrs)| nbrs.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect()
    }
}

/// Second pass: reduce a Steiner tree to one endpoint per segment.
///
/// Non-terminal leaves are pruned first. A pre-order walk then stacks every
/// segment with both endpoints present. Each popped segment loses the
/// endpoint not attached to its terminal; when the terminal hangs off both,
/// the endpoint with the larger incident geometric weight goes (ties: higher
/// node index). The deleted endpoint's neighbours are then chained
/// counterclockwise, and if the terminal hung off the deleted endpoint the
/// kept endpoint is linked to the nearest chain member. A step between the
/// two endpoints of one segment, which has no edge in the graph, is routed
/// through that segment's terminal at zero cost instead.
///
/// Fails with [`Error::RepairFactorExceeded`] when the result costs more than
/// twice the input tree.
pub fn repair_tree(aux: &AuxGraph, st: &SteinerResult) -> Result<RepairOutcome> {
    if !st.tree.spans_terminals(&aux.graph) {
        return Err(Error::RepairStructure(
            "input does not span all terminals".into(),
        ));
    }
    let mut work = WorkTree::new(aux, &st.tree);
    work.prune();
    work.check_structure()?;
    let bad_segments = work.find_bad_segments();
    let mut steps = Vec::new();
    for &seg in bad_segments.iter().rev() {
        let (p, q, o) = (
            endpoint_node(seg, 0),
            endpoint_node(seg, 1),
            terminal_node(seg),
        );
        let (home_p, home_q) = (work.adj[&o].contains(&p), work.adj[&o].contains(&q));
        let real_weight = |v: usize| -> f64 {
            work.adj[&v]
                .iter()
                .filter(|&&u| u != o)
                .map(|&u| work.weight(u, v))
                .sum()
        };
        let doomed = match (home_p, home_q) {
            (true, false) => q,
            (false, true) => p,
            (true, true) => {
                if real_weight(p) > real_weight(q) {
                    p
                } else {
                    q
                }
            }
            (false, false) => {
                return Err(Error::RepairStructure(format!(
                    "terminal of segment {seg} detached"
                )))
            }
        };
        let kept = AuxGraph::twin(doomed);
        let pivot = aux.coords[doomed].unwrap();
        let ring: Vec<usize> = work.adj[&doomed]
            .iter()
            .copied()
            .filter(|&u| u != o)
            .collect();
        let ring = work.ccw(pivot, ring);
        let rejoin = work.adj[&doomed].contains(&o) && !ring.is_empty();
        work.remove_node(doomed);
        let mut added = Vec::new();
        let mut add = |work: &mut WorkTree, u: usize, v: usize| {
            let edge = if u / 3 == v / 3 {
                let t = terminal_node(u / 3);
                if work.adj[&t].contains(&u) {
                    (v, t)
                } else {
                    (u, t)
                }
            } else {
                (u, v)
            };
            work.link(edge.0, edge.1);
            added.push((edge.0.min(edge.1), edge.0.max(edge.1)));
        };
        for pair in ring.windows(2) {
            add(&mut work, pair[0], pair[1]);
        }
        if rejoin {
            let near = ring
                .iter()
                .copied()
                .min_by(|&u, &v| {
                    point_distance(aux.coords[u].unwrap(), aux.coords[kept].unwrap())
                        .total_cmp(&point_distance(
                            aux.coords[v].unwrap(),
                            aux.coords[kept].unwrap(),
                        ))
                        .then(u.cmp(&v))
                })
                .unwrap();
            add(&mut work, near, kept);
        }
        steps.push(RepairStep {
            segment: seg,
            deleted: doomed,
            added,
        });
        work.check_structure()?;
    }
    for seg in 0..aux.segment_count() {
        let present = work.has(endpoint_node(seg, 0)) as u8 + work.has(endpoint_node(seg, 1)) as u8;
        if present != 1 || !work.has(terminal_node(seg)) {
            return Err(Error::RepairStructure(format!(
                "segment {seg} has {present} endpoints after repair"
            )));
        }
    }
    let tree = GraphTree::from_edges(&aux.graph, work.edges(), None);
    let tree = if tree.nodes.is_empty() {
        GraphTree {
            nodes: work.adj.keys().copied().collect(),
            edges: Vec::new(),
            cost: 0.0,
        }
    } else {
        tree
    };
    if !cost_le(tree.cost, 2.0 * st.tree.cost) {
        return Err(Error::RepairFactorExceeded {
            repaired: tree.cost,
            original: st.tree.cost,
        });
    }
    Ok(RepairOutcome {
        result: SteinerResult {
            tree,
            guarantee_factor: st.guarantee_factor,
        },
        bad_segments,
        steps,
    })
}

/// Output of the approximation pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxSolution {
    pub solution: ChoiceSolution,
    pub steiner_cost: f64,
    pub repaired_cost: f64,
    /// End-to-end factor: twice the Steiner subroutine's factor.
    pub guarantee: f64,
    pub bad_segments: usize,
}

pub fn solve_approx(inst: &Instance) -> Result<ApproxSolution> {
    solve_approx_with(inst, &TerminalMstSteiner)
}

/// Steiner tree, repair, then drop terminals and read off one endpoint per
/// segment. Terminal edges weigh zero, so the cost carries over unchanged.
pub fn solve_approx_with(inst: &Instance, solver: &dyn SteinerSolver) -> Result<ApproxSolution> {
    let aux = build_aux_graph(inst);
    let st = solver.solve(&aux)?;
    let repaired = repair_tree(&aux, &st)?;
    let tree = &repaired.result.tree;
    let nodes: BTreeSet<usize> = tree.nodes.iter().copied().collect();
    let choices: Vec<u8> = (0..inst.len())
        .map(|i| {
            if nodes.contains(&endpoint_node(i, 0)) {
                0
            } else {
                1
            }
        })
        .collect();
    let edges: Vec<(usize, usize)> = tree
        .edges
        .iter()
        .filter(|&&(u, v)| !aux.graph.is_terminal(u) && !aux.graph.is_terminal(v))
        .map(|&(u, v)| (u / 3, v / 3))
        .collect();
    let point_tree = PointTree::from_edges(inst.chosen_points(&choices), edges);
    let solution = ChoiceSolution {
        cost: point_tree.cost,
        choices,
        tree: point_tree,
    };
    solution.check(inst)?;
    Ok(ApproxSolution {
        solution,
        steiner_cost: st.tree.cost,
        repaired_cost: tree.cost,
        guarantee: 2.0 * st.guarantee_factor,
        bad_segments: repaired.bad_segments.len(),
    })
}
