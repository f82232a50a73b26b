//! Max-2-SAT to MSTS instance compiler and assignment decoder.
//!
//! Layout (unit spacing 1, vertical length 4, gadget pitch 5):
//!
//! * Variable gadget `i` has four verticals with tops at
//!   `((i-1)*5 + l, -DROP)` and a horizontal `s5` spanning columns 2 to 4,
//!   above every literal level. Its left end sits at `h = (4m+2)ε`, its
//!   right end `r_i·ε` higher, where `r_i` counts the occurrences of `x_i`.
//! * Literal gadget `j` (the `j`-th literal of the formula) has four verticals
//!   with tops at `(-5j + l - 1, 0)` and two horizontals: `s5` at height `2jε`
//!   from the gadget's column 2 to the variable's column 2, `s6` at
//!   `(2j+1)ε` from column 4 to the variable's column 4.
//! * Clause `c` is a horizontal at height `ε` whose ends sit above column 2
//!   (positive literal) or 4 (negative) of literal gadgets `2c-1` and `2c`.
//!
//! A false variable routes through the variable's column 2, a true one
//! through column 4. The slant of the variable horizontal makes both choices
//! cost the same, and the drop keeps mixed routings strictly more expensive.
//! A clause endpoint costs nothing when it lies on a used column and `ε`
//! otherwise, so the optimum is `W + (m - k*)ε`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{euclidean_mst, Point, Segment};
use crate::instance::{ChoiceSolution, Instance};

pub const UNIT: f64 = 1.0;
pub const LAMBDA: f64 = 4.0;
pub const PITCH: f64 = 5.0;
/// How far variable-gadget tops sit below the literal-gadget tops.
pub const DROP: f64 = 1.0;
/// Extension applied to both ends of every horizontal in the MIN-MSTS variant.
pub const MIN_MSTS_EXTENSION: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    /// 1-based variable index.
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn eval(&self, assignment: &[bool]) -> bool {
        assignment[self.var - 1] == self.positive
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf2Formula {
    pub num_vars: usize,
    pub clauses: Vec<(Literal, Literal)>,
}

impl Cnf2Formula {
    pub fn new(num_vars: usize, clauses: Vec<(Literal, Literal)>) -> Result<Self> {
        if clauses.is_empty() {
            return Err(Error::InvalidArgument("formula has no clauses".into()));
        }
        for &(p, q) in &clauses {
            for l in [p, q] {
                if l.var == 0 || l.var > num_vars {
                    return Err(Error::InvalidArgument(format!(
                        "variable {} outside 1..={num_vars}",
                        l.var
                    )));
                }
            }
        }
        Ok(Cnf2Formula { num_vars, clauses })
    }

    pub fn satisfied_count(&self, assignment: &[bool]) -> usize {
        self.clauses
            .iter()
            .filter(|(p, q)| p.eval(assignment) || q.eval(assignment))
            .count()
    }

    /// Literals in formula order: clause `c` owns positions `2c` and `2c+1`.
    pub fn literals(&self) -> Vec<Literal> {
        self.clauses.iter().flat_map(|&(p, q)| [p, q]).collect()
    }

    pub fn occurrences(&self, var: usize) -> usize {
        self.literals().iter().filter(|l| l.var == var).count()
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        let lit = |l: Literal| {
            if l.positive {
                l.var as i64
            } else {
                -(l.var as i64)
            }
        };
        for &(p, q) in &self.clauses {
            let _ = writeln!(out, "{} {} 0", lit(p), lit(q));
        }
        out
    }
}

/// Parses the DIMACS subset: `c` comments, one `p cnf <n> <m>` header, and
/// zero-terminated clauses of exactly two literals.
pub fn parse_cnf2(text: &str) -> Result<Cnf2Formula> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut pending: Vec<i64> = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if header.is_some() || parts.len() != 4 || parts[1] != "cnf" {
                return Err(Error::CnfParse(line_no));
            }
            let n = parts[2].parse().map_err(|_| Error::CnfParse(line_no))?;
            let m = parts[3].parse().map_err(|_| Error::CnfParse(line_no))?;
            header = Some((n, m, line_no));
            continue;
        }
        let Some((n, _, _)) = header else {
            return Err(Error::CnfParse(line_no));
        };
        for tok in line.split_whitespace() {
            let v: i64 = tok.parse().map_err(|_| Error::CnfParse(line_no))?;
            if v == 0 {
                if pending.len() != 2 {
                    return Err(Error::ClauseSize);
                }
                let lit = |x: i64| Literal {
                    var: x.unsigned_abs() as usize,
                    positive: x > 0,
                };
                clauses.push((lit(pending[0]), lit(pending[1])));
                pending.clear();
            } else {
                if v.unsigned_abs() as usize > n {
                    return Err(Error::CnfParse(line_no));
                }
                pending.push(v);
            }
        }
    }
    let Some((n, m, header_line)) = header else {
        return Err(Error::CnfParse(1));
    };
    if !pending.is_empty() {
        return Err(Error::ClauseSize);
    }
    if clauses.len() != m || m == 0 {
        return Err(Error::CnfParse(header_line));
    }
    Cnf2Formula::new(n, clauses)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Variant {
    #[default]
    Msts,
    MinMsts,
}

/// What a segment of the compiled instance stands for. Indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// `l` in 1..=4 are verticals, 5 is the horizontal.
    Variable {
        var: usize,
        l: u8,
    },
    /// Literal `k` (1 or 2) of clause `clause`, on variable `var`. `l` in
    /// 1..=4 are verticals, 5 and 6 the horizontals.
    Literal {
        var: usize,
        clause: usize,
        k: u8,
        l: u8,
    },
    Clause {
        clause: usize,
    },
}

impl Role {
    pub fn is_clause(&self) -> bool {
        matches!(self, Role::Clause { .. })
    }

    pub fn is_horizontal(&self) -> bool {
        match *self {
            Role::Variable { l, .. } => l == 5,
            Role::Literal { l, .. } => l >= 5,
            Role::Clause { .. } => true,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Role::Variable { var, l } => format!("variable i={var} l={l}"),
            Role::Literal { var, clause, k, l } => {
                format!("literal i={var} j={clause} k={k} l={l}")
            }
            Role::Clause { clause } => format!("clause c={clause}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionLayout {
    pub instance: Instance,
    pub roles: Vec<Role>,
    pub formula: Cnf2Formula,
    pub eps: f64,
    pub lambda: f64,
    pub pitch: f64,
    pub unit: f64,
    pub drop: f64,
    /// MST weight of the non-clause segments under the all-false routing.
    pub baseline_cost: f64,
    pub variant: Variant,
}

/// Largest admissible ε for `m` clauses.
pub fn max_epsilon(m: usize) -> f64 {
    let m = m as f64;
    (1.0 / (16.0 * (m + 1.0))).min(1.0 / (4.0 * m * m + 10.0 * m + 3.0))
}

pub fn default_epsilon(m: usize) -> f64 {
    0.01f64.min(max_epsilon(m))
}

fn var_x(var: usize, l: usize) -> f64 {
    (var - 1) as f64 * PITCH + l as f64 * UNIT
}

fn lit_x(j: usize, l: usize) -> f64 {
    -(j as f64) * PITCH + (l - 1) as f64 * UNIT
}

fn vertical(x: f64, top: f64) -> Segment {
    Segment::from_coords(x, top, x, top - LAMBDA)
}

impl ReductionLayout {
    pub fn var_count(&self) -> usize {
        self.formula.num_vars
    }

    /// Index of segment `l` of variable gadget `var`.
    pub fn variable_index(&self, var: usize, l: u8) -> usize {
        (var - 1) * 5 + (l as usize - 1)
    }

    /// Index of segment `l` of the `j`-th literal gadget (1-based).
    pub fn literal_index(&self, j: usize, l: u8) -> usize {
        5 * self.formula.num_vars + (j - 1) * 6 + (l as usize - 1)
    }

    pub fn clause_index(&self, c: usize) -> usize {
        5 * self.formula.num_vars + 12 * self.formula.clauses.len() + (c - 1)
    }

    /// Indices of the segments that are not clause segments.
    pub fn core_indices(&self) -> Vec<usize> {
        (0..self.roles.len())
            .filter(|&i| !self.roles[i].is_clause())
            .collect()
    }

    /// One line per segment: `<index> <role> <params>`.
    pub fn provenance(&self) -> String {
        let mut out = String::new();
        for (i, r) in self.roles.iter().enumerate() {
            let _ = writeln!(out, "{i} {}", r.describe());
        }
        out
    }
}

/// Compiles a formula into an MSTS (or MIN-MSTS) instance.
pub fn build_gadgets(
    formula: &Cnf2Formula,
    variant: Variant,
    eps: Option<f64>,
) -> Result<ReductionLayout> {
    let m = formula.clauses.len();
    let n = formula.num_vars;
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("empty formula".into()));
    }
    let eps = match eps {
        Some(e) if !(e > 0.0 && e.is_finite()) => {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be positive, got {e}"
            )))
        }
        Some(e) if e > max_epsilon(m) => return Err(Error::EpsilonTooLarge),
        Some(e) => e,
        None => default_epsilon(m),
    };
    let literals = formula.literals();
    let h_left = (4 * m + 2) as f64 * eps;

    let mut segments = Vec::with_capacity(5 * n + 13 * m);
    let mut roles = Vec::with_capacity(5 * n + 13 * m);
    for var in 1..=n {
        for l in 1..=4u8 {
            segments.push(vertical(var_x(var, l as usize), -DROP));
            roles.push(Role::Variable { var, l });
        }
        let rise = formula.occurrences(var) as f64 * eps;
        segments.push(Segment::from_coords(
            var_x(var, 2),
            h_left,
            var_x(var, 4),
            h_left + rise,
        ));
        roles.push(Role::Variable { var, l: 5 });
    }
    for (idx, lit) in literals.iter().enumerate() {
        let j = idx + 1;
        let (clause, k) = (idx / 2 + 1, (idx % 2 + 1) as u8);
        for l in 1..=4u8 {
            segments.push(vertical(lit_x(j, l as usize), 0.0));
            roles.push(Role::Literal {
                var: lit.var,
                clause,
                k,
                l,
            });
        }
        let y5 = 2.0 * j as f64 * eps;
        let y6 = (2 * j + 1) as f64 * eps;
        segments.push(Segment::from_coords(lit_x(j, 2), y5, var_x(lit.var, 2), y5));
        roles.push(Role::Literal {
            var: lit.var,
            clause,
            k,
            l: 5,
        });
        segments.push(Segment::from_coords(lit_x(j, 4), y6, var_x(lit.var, 4), y6));
        roles.push(Role::Literal {
            var: lit.var,
            clause,
            k,
            l: 6,
        });
    }
    for (c, &(p, q)) in formula.clauses.iter().enumerate() {
        let col = |lit: Literal| if lit.positive { 2 } else { 4 };
        let right = Point::new(lit_x(2 * c + 1, col(p)), eps);
        let left = Point::new(lit_x(2 * c + 2, col(q)), eps);
        segments.push(Segment::new(right, left));
        roles.push(Role::Clause { clause: c + 1 });
    }
    if variant == Variant::MinMsts {
        for (s, r) in segments.iter_mut().zip(&roles) {
            if r.is_horizontal() {
                *s = extend(s, MIN_MSTS_EXTENSION);
            }
        }
    }
    let name = match variant {
        Variant::Msts => "reduction-msts",
        Variant::MinMsts => "reduction-min-msts",
    };
    let instance = Instance::new(segments, name)?;
    let mut layout = ReductionLayout {
        instance,
        roles,
        formula: formula.clone(),
        eps,
        lambda: LAMBDA,
        pitch: PITCH,
        unit: UNIT,
        drop: DROP,
        baseline_cost: 0.0,
        variant,
    };
    let all_false = canonical_choices(&layout, &vec![false; n])?;
    let core: Vec<Point> = layout
        .core_indices()
        .into_iter()
        .map(|i| layout.instance.segments[i].endpoint(all_false[i]))
        .collect();
    layout.baseline_cost = euclidean_mst(&core)?.cost;
    Ok(layout)
}

fn extend(s: &Segment, by: f64) -> Segment {
    let len = s.length();
    let (dx, dy) = ((s.b.x - s.a.x) / len, (s.b.y - s.a.y) / len);
    Segment::from_coords(
        s.a.x - dx * by,
        s.a.y - dy * by,
        s.b.x + dx * by,
        s.b.y + dy * by,
    )
}

/// Endpoint selectors of the canonical routing for `assignment`.
pub fn canonical_choices(layout: &ReductionLayout, assignment: &[bool]) -> Result<Vec<u8>> {
    let f = &layout.formula;
    if assignment.len() != f.num_vars {
        return Err(Error::InvalidArgument(format!(
            "assignment has {} values for {} variables",
            assignment.len(),
            f.num_vars
        )));
    }
    let mut choices = vec![0u8; layout.roles.len()];
    for var in 1..=f.num_vars {
        choices[layout.variable_index(var, 5)] = assignment[var - 1] as u8;
    }
    let literals = f.literals();
    for (idx, lit) in literals.iter().enumerate() {
        let value = assignment[lit.var - 1];
        choices[layout.literal_index(idx + 1, 5)] = (!value) as u8;
        choices[layout.literal_index(idx + 1, 6)] = value as u8;
    }
    for (c, &(p, q)) in f.clauses.iter().enumerate() {
        let pick_left = !p.eval(assignment) && q.eval(assignment);
        choices[layout.clause_index(c + 1)] = pick_left as u8;
    }
    Ok(choices)
}

/// The canonical feasible solution for an assignment: verticals use their
/// tops, each variable routes through column 2 (false) or 4 (true), and each
/// clause takes an endpoint of a satisfied literal when it has one.
pub fn canonical_tree(layout: &ReductionLayout, assignment: &[bool]) -> Result<ChoiceSolution> {
    let choices = canonical_choices(layout, assignment)?;
    ChoiceSolution::from_choices(&layout.instance, choices)
}

/// Reads an assignment off an MSTS solution of a compiled instance.
///
/// Variable `x_i` is false when its horizontal keeps the left endpoint and
/// the tree descends from it along column 2 to that vertical's top; true for
/// the right endpoint and column 4. A tree that reaches the column some other
/// way is first replaced by the MST of the same points, which never costs
/// more.
pub fn decode_assignment(layout: &ReductionLayout, sol: &ChoiceSolution) -> Result<Vec<bool>> {
    sol.check(&layout.instance)?;
    if let Some(a) = decode_from_tree(layout, sol) {
        return Ok(a);
    }
    let normalized = ChoiceSolution::from_choices(&layout.instance, sol.choices.clone())?;
    decode_from_tree(layout, &normalized).ok_or(Error::Undecodable)
}

fn decode_from_tree(layout: &ReductionLayout, sol: &ChoiceSolution) -> Option<Vec<bool>> {
    let n = sol.tree.nodes.len();
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in &sol.tree.edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut out = Vec::with_capacity(layout.formula.num_vars);
    for var in 1..=layout.formula.num_vars {
        let h = layout.variable_index(var, 5);
        let value = sol.choices[h] == 1;
        let col = if value { 4 } else { 2 };
        let target = layout.variable_index(var, col);
        if sol.choices[target] != 0 {
            return None;
        }
        let path = tree_path(&adj, h, target)?;
        let x = sol.tree.nodes[target].x;
        if path.iter().any(|&v| sol.tree.nodes[v].x != x) {
            return None;
        }
        out.push(value);
    }
    Some(out)
}

fn tree_path(adj: &[Vec<usize>], from: usize, to: usize) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; adj.len()];
    parent[from] = from;
    let mut stack = vec![from];
    while let Some(u) = stack.pop() {
        if u == to {
            break;
        }
        for &v in &adj[u] {
            if parent[v] == usize::MAX {
                parent[v] = u;
                stack.push(v);
            }
        }
    }
    if parent[to] == usize::MAX {
        return None;
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = parent[cur];
        path.push(cur);
    }
    Some(path)
}

/// Decodes chosen points (one per segment) of the MIN-MSTS variant by the
/// side of each variable horizontal the chosen point lies on.
pub fn decode_points(layout: &ReductionLayout, points: &[Point]) -> Result<Vec<bool>> {
    if points.len() != layout.roles.len() {
        return Err(Error::SolutionMismatch(
            "one point per segment expected".into(),
        ));
    }
    (1..=layout.formula.num_vars)
        .map(|var| {
            let h = layout.variable_index(var, 5);
            let s = &layout.instance.segments[h];
            let mid = 0.5 * (s.a.x + s.b.x);
            let x = points[h].x;
            if x < mid {
                Ok(false)
            } else if x > mid {
                Ok(true)
            } else {
                Err(Error::Undecodable)
            }
        })
        .collect()
}
