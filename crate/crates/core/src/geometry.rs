//! Planar points, segments, and the dense Euclidean MST used by every solver.

use crate::error::{Error, Result};

/// Absolute tolerance for coordinate equality.
pub const COORD_EPS: f64 = 1e-12;
/// Relative tolerance for comparing tree costs.
pub const COST_RTOL: f64 = 1e-9;

/// Returns true when `a` and `b` agree within [`COST_RTOL`] relative slack.
pub fn cost_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= COST_RTOL * a.abs().max(b.abs()).max(1.0)
}

/// Returns true when `a <= b` up to [`COST_RTOL`] relative slack.
pub fn cost_le(a: f64, b: f64) -> bool {
    a <= b + COST_RTOL * a.abs().max(b.abs()).max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Lexicographic (x, y) comparison.
    pub fn lex_cmp(&self, other: &Point) -> std::cmp::Ordering {
        self.x.total_cmp(&other.x).then(self.y.total_cmp(&other.y))
    }

    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }
}

pub fn point_distance(p: Point, q: Point) -> f64 {
    (p.x - q.x).hypot(p.y - q.y)
}

/// A closed segment with an unordered pair of endpoints. Zero length is allowed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn from_coords(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        Segment::new(Point::new(x1, y1), Point::new(x2, y2))
    }

    /// Endpoint by selector: 0 is `a`, anything else is `b`.
    pub fn endpoint(&self, side: u8) -> Point {
        if side == 0 {
            self.a
        } else {
            self.b
        }
    }

    pub fn length(&self) -> f64 {
        point_distance(self.a, self.b)
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }

    /// Left endpoint (smaller x, then smaller y).
    pub fn left(&self) -> Point {
        if self.a.lex_cmp(&self.b).is_le() {
            self.a
        } else {
            self.b
        }
    }

    pub fn right(&self) -> Point {
        if self.a.lex_cmp(&self.b).is_le() {
            self.b
        } else {
            self.a
        }
    }

    /// Upper endpoint (larger y).
    pub fn top(&self) -> Point {
        if self.a.y >= self.b.y {
            self.a
        } else {
            self.b
        }
    }

    pub fn bottom(&self) -> Point {
        if self.a.y >= self.b.y {
            self.b
        } else {
            self.a
        }
    }
}

fn point_segment_distance(p: Point, s: &Segment) -> f64 {
    let d = s.b.sub(s.a);
    let len2 = d.dot(d);
    if len2 == 0.0 {
        return point_distance(p, s.a);
    }
    let t = (p.sub(s.a).dot(d) / len2).clamp(0.0, 1.0);
    point_distance(p, Point::new(s.a.x + t * d.x, s.a.y + t * d.y))
}

fn orientation(a: Point, b: Point, c: Point) -> i8 {
    let v = b.sub(a).cross(c.sub(a));
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

fn on_segment(p: Point, s: &Segment) -> bool {
    p.x >= s.a.x.min(s.b.x)
        && p.x <= s.a.x.max(s.b.x)
        && p.y >= s.a.y.min(s.b.y)
        && p.y <= s.a.y.max(s.b.y)
}

fn segments_intersect(s: &Segment, t: &Segment) -> bool {
    let o1 = orientation(s.a, s.b, t.a);
    let o2 = orientation(s.a, s.b, t.b);
    let o3 = orientation(t.a, t.b, s.a);
    let o4 = orientation(t.a, t.b, s.b);
    if o1 != o2 && o3 != o4 {
        return true;
    }
    (o1 == 0 && on_segment(t.a, s))
        || (o2 == 0 && on_segment(t.b, s))
        || (o3 == 0 && on_segment(s.a, t))
        || (o4 == 0 && on_segment(s.b, t))
}

/// Minimum distance between any point of `s` and any point of `t`; zero iff they meet.
pub fn segment_distance(s: &Segment, t: &Segment) -> f64 {
    if segments_intersect(s, t) {
        return 0.0;
    }
    point_segment_distance(s.a, t)
        .min(point_segment_distance(s.b, t))
        .min(point_segment_distance(t.a, s))
        .min(point_segment_distance(t.b, s))
}

/// Strict disjointness: touching segments are not disjoint.
pub fn segments_disjoint(s: &Segment, t: &Segment) -> bool {
    segment_distance(s, t) > 0.0
}

/// A tree over an ordered point set, with edges as index pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct PointTree {
    pub nodes: Vec<Point>,
    pub edges: Vec<(usize, usize)>,
    pub cost: f64,
}

impl PointTree {
    /// Builds a tree and sets `cost` by summing edge lengths in edge order.
    pub fn from_edges(nodes: Vec<Point>, edges: Vec<(usize, usize)>) -> Self {
        let cost = edge_cost(&nodes, &edges);
        PointTree { nodes, edges, cost }
    }

    /// Checks edge count, index range, connectivity, and the stored cost.
    pub fn is_spanning_tree(&self) -> bool {
        let n = self.nodes.len();
        if n == 0 || self.edges.len() != n - 1 {
            return false;
        }
        if self.edges.iter().any(|&(i, j)| i >= n || j >= n || i == j) {
            return false;
        }
        let mut dsu = Dsu::new(n);
        for &(i, j) in &self.edges {
            if !dsu.union(i, j) {
                return false;
            }
        }
        cost_eq(self.cost, edge_cost(&self.nodes, &self.edges))
    }
}

/// Sum of edge lengths, accumulated in edge order.
pub fn edge_cost(nodes: &[Point], edges: &[(usize, usize)]) -> f64 {
    edges
        .iter()
        .map(|&(i, j)| point_distance(nodes[i], nodes[j]))
        .sum()
}

/// Dense Prim's algorithm, O(n²).
///
/// Ties are broken on (weight, min index, max index) so the edge set is
/// reproducible. Edges are reported as `(min, max)` in insertion order.
pub fn euclidean_mst(points: &[Point]) -> Result<PointTree> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let n = points.len();
    let edges = prim_dense(n, |i, j| point_distance(points[i], points[j]));
    Ok(PointTree::from_edges(points.to_vec(), edges))
}

/// Prim over a complete graph given by `weight`. Returns `(min, max)` edges in
/// insertion order.
pub(crate) fn prim_dense(n: usize, weight: impl Fn(usize, usize) -> f64) -> Vec<(usize, usize)> {
    if n <= 1 {
        return Vec::new();
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    in_tree[0] = true;
    for v in 1..n {
        best[v] = weight(0, v);
        parent[v] = 0;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for _ in 1..n {
        let mut pick = usize::MAX;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            if pick == usize::MAX || better(best[v], parent[v], v, best[pick], parent[pick], pick) {
                pick = v;
            }
        }
        in_tree[pick] = true;
        let p = parent[pick];
        edges.push((p.min(pick), p.max(pick)));
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let w = weight(pick, v);
            if better(w, pick, v, best[v], parent[v], v) {
                best[v] = w;
                parent[v] = pick;
            }
        }
    }
    edges
}

fn better(w1: f64, p1: usize, v1: usize, w2: f64, p2: usize, v2: usize) -> bool {
    let k1 = (p1.min(v1), p1.max(v1));
    let k2 = (p2.min(v2), p2.max(v2));
    match w1.total_cmp(&w2) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => k1 < k2,
    }
}

/// Union-find with path halving.
#[derive(Clone, Debug)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}
