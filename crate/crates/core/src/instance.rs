//! Problem instances, solutions, and their plain-text file formats.
//!
//! Instance file:
//!
//! ```text
//! # name: example
//! MSTS 2
//! 0 0 1 0
//! 3 0 4 0
//! ```
//!
//! Solution file: `MSTS-SOL <n> <cost>`, one line of `n` selectors in `{0,1}`,
//! then `n-1` lines `i j` naming MST edges by segment index. Lines starting
//! with `#` are comments anywhere in either format.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{
    cost_eq, edge_cost, euclidean_mst, segment_distance, segments_disjoint, Point, PointTree,
    Segment,
};

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub segments: Vec<Segment>,
    pub name: String,
}

/// Outcome of [`validate`]: every pair of segments that touches or crosses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<(usize, usize)>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Instance {
    /// Builds an instance and rejects it unless every pair is strictly disjoint.
    pub fn new(segments: Vec<Segment>, name: impl Into<String>) -> Result<Self> {
        let inst = Self::new_unchecked(segments, name)?;
        if let Some(&(i, j)) = validate(&inst).violations.first() {
            return Err(Error::NotDisjoint(i, j));
        }
        Ok(inst)
    }

    /// Builds an instance without the disjointness check, for deliberately
    /// degenerate research inputs. Coordinates must still be finite.
    pub fn new_unchecked(segments: Vec<Segment>, name: impl Into<String>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidArgument(
                "instance needs at least one segment".into(),
            ));
        }
        if let Some(i) = segments.iter().position(|s| !s.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Instance {
            segments,
            name: name.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Chosen point of every segment for a selector vector.
    pub fn chosen_points(&self, choices: &[u8]) -> Vec<Point> {
        self.segments
            .iter()
            .zip(choices)
            .map(|(s, &c)| s.endpoint(c))
            .collect()
    }

    pub fn max_length(&self) -> f64 {
        self.segments
            .iter()
            .map(Segment::length)
            .fold(0.0, f64::max)
    }
}

pub fn validate(inst: &Instance) -> ValidationReport {
    let segs = &inst.segments;
    let mut violations = Vec::new();
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            if !segments_disjoint(&segs[i], &segs[j]) {
                violations.push((i, j));
            }
        }
    }
    ValidationReport { violations }
}

/// One endpoint per segment together with a spanning tree over the chosen points.
///
/// `tree.nodes[i]` is the chosen endpoint of segment `i`, so tree edges are
/// also segment index pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceSolution {
    pub choices: Vec<u8>,
    pub tree: PointTree,
    pub cost: f64,
}

impl ChoiceSolution {
    /// The Euclidean MST over the endpoints selected by `choices`.
    pub fn from_choices(inst: &Instance, choices: Vec<u8>) -> Result<Self> {
        if choices.len() != inst.len() {
            return Err(Error::SolutionMismatch(format!(
                "{} selectors for {} segments",
                choices.len(),
                inst.len()
            )));
        }
        let tree = euclidean_mst(&inst.chosen_points(&choices))?;
        let cost = tree.cost;
        Ok(ChoiceSolution {
            choices,
            tree,
            cost,
        })
    }

    /// A solution with an explicit edge list over segment indices.
    pub fn with_edges(
        inst: &Instance,
        choices: Vec<u8>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let tree = PointTree::from_edges(inst.chosen_points(&choices), edges);
        let sol = ChoiceSolution {
            cost: tree.cost,
            choices,
            tree,
        };
        sol.check(inst)?;
        Ok(sol)
    }

    /// Structural feasibility: one selector in {0,1} per segment, the tree
    /// spans exactly the chosen points, and the cost matches the edges.
    pub fn check(&self, inst: &Instance) -> Result<()> {
        let n = inst.len();
        if self.choices.len() != n || self.tree.nodes.len() != n {
            return Err(Error::SolutionMismatch("wrong number of selectors".into()));
        }
        if self.choices.iter().any(|&c| c > 1) {
            return Err(Error::SolutionMismatch("selector outside {0,1}".into()));
        }
        if self.tree.nodes != inst.chosen_points(&self.choices) {
            return Err(Error::SolutionMismatch(
                "tree nodes differ from chosen endpoints".into(),
            ));
        }
        if !self.tree.is_spanning_tree() {
            return Err(Error::SolutionMismatch(
                "edges do not form a spanning tree".into(),
            ));
        }
        if !cost_eq(self.cost, self.tree.cost) {
            return Err(Error::SolutionMismatch("cost does not match tree".into()));
        }
        Ok(())
    }
}

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros trimmed.
/// Every finite `f64` survives a print/parse round trip.
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-5..17).contains(&exp) {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{m}e{exp}");
    }
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(&digits);
    } else {
        let int_len = exp as usize + 1;
        out.push_str(&digits[..int_len]);
        out.push('.');
        out.push_str(&digits[int_len..]);
    }
    let trimmed = out.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

/// Strict parse: rejects geometry that fails [`validate`].
pub fn parse_instance(text: &str) -> Result<Instance> {
    parse_instance_with(text, true)
}

pub fn parse_instance_with(text: &str, strict: bool) -> Result<Instance> {
    let mut name = String::new();
    let mut count: Option<usize> = None;
    let mut segments = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if name.is_empty() {
                if let Some(n) = comment.trim().strip_prefix("name:") {
                    name = n.trim().to_string();
                }
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        match count {
            None => {
                let mut toks = line.split_whitespace();
                if toks.next() != Some("MSTS") {
                    return Err(Error::BadHeader);
                }
                let n: usize = toks
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or(Error::BadHeader)?;
                if n == 0 || toks.next().is_some() {
                    return Err(Error::BadHeader);
                }
                count = Some(n);
            }
            Some(n) => {
                let vals: Vec<f64> = line
                    .split_whitespace()
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::ParseAt(lineno))?;
                if vals.len() != 4 || vals.iter().any(|v| !v.is_finite()) {
                    return Err(Error::ParseAt(lineno));
                }
                if segments.len() == n {
                    return Err(Error::CountMismatch(n));
                }
                segments.push(Segment::from_coords(vals[0], vals[1], vals[2], vals[3]));
            }
        }
    }
    let n = count.ok_or(Error::BadHeader)?;
    if segments.len() != n {
        return Err(Error::CountMismatch(n));
    }
    if strict {
        Instance::new(segments, name)
    } else {
        Instance::new_unchecked(segments, name)
    }
}

pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    if !inst.name.is_empty() {
        let _ = writeln!(out, "# name: {}", inst.name.replace(['\n', '\r'], " "));
    }
    let _ = writeln!(out, "MSTS {}", inst.len());
    for s in &inst.segments {
        let _ = writeln!(
            out,
            "{} {} {} {}",
            fmt_g17(s.a.x),
            fmt_g17(s.a.y),
            fmt_g17(s.b.x),
            fmt_g17(s.b.y)
        );
    }
    out
}

pub fn serialize_solution(sol: &ChoiceSolution) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "MSTS-SOL {} {}", sol.choices.len(), fmt_g17(sol.cost));
    let sel: Vec<String> = sol.choices.iter().map(u8::to_string).collect();
    let _ = writeln!(out, "{}", sel.join(" "));
    for &(i, j) in &sol.tree.edges {
        let _ = writeln!(out, "{i} {j}");
    }
    out
}

/// Parses a solution file and re-costs it against `inst`.
///
/// The stored cost must match the re-costed edge sum within relative 1e-9.
pub fn parse_solution(text: &str, inst: &Instance) -> Result<ChoiceSolution> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header) = lines.next().ok_or(Error::BadHeader)?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("MSTS-SOL") {
        return Err(Error::BadHeader);
    }
    let n: usize = toks
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(Error::BadHeader)?;
    let cost: f64 = toks
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(Error::BadHeader)?;
    if n != inst.len() {
        return Err(Error::CountMismatch(inst.len()));
    }
    let (lineno, sel) = lines.next().ok_or(Error::CountMismatch(n))?;
    let choices: Vec<u8> = sel
        .split_whitespace()
        .map(|t| match t {
            "0" => Ok(0),
            "1" => Ok(1),
            _ => Err(Error::ParseAt(lineno)),
        })
        .collect::<Result<_>>()?;
    if choices.len() != n {
        return Err(Error::ParseAt(lineno));
    }
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for (lineno, line) in lines {
        let ij: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::ParseAt(lineno))?;
        if ij.len() != 2 {
            return Err(Error::ParseAt(lineno));
        }
        edges.push((ij[0], ij[1]));
    }
    let sol = ChoiceSolution::with_edges(inst, choices, edges)?;
    if !cost_eq(sol.cost, cost) {
        return Err(Error::SolutionMismatch(format!(
            "stated cost {cost} but edges sum to {}",
            sol.cost
        )));
    }
    Ok(sol)
}

/// Recomputes the cost of a solution from its selectors and edge list.
pub fn recost(inst: &Instance, sol: &ChoiceSolution) -> f64 {
    edge_cost(&inst.chosen_points(&sol.choices), &sol.tree.edges)
}

/// Parameters of [`random_instance`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomParams {
    pub n: usize,
    pub seed: u64,
    pub min_separation: f64,
    pub max_length: f64,
}

const PLACEMENT_TRIES: usize = 2_000;
const BOX_GROWTHS: usize = 20;

/// Rejection-sampled instance of `n` pairwise-disjoint segments.
///
/// Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`),
/// so the output depends only on the parameters. Each segment has a uniform
/// centre in a square box, a uniform direction, and a length uniform in
/// `(0, max_length]`; a candidate is kept when its distance to every placed
/// segment is at least `min_separation` (and strictly positive). The box side
/// starts at `sqrt(n) * (max_length + min_separation) * 2` and grows by half
/// whenever a segment cannot be placed within the retry limit.
pub fn random_instance(p: RandomParams) -> Result<Instance> {
    if p.n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !(p.min_separation >= 0.0 && p.min_separation.is_finite()) {
        return Err(Error::InvalidArgument("min_separation must be >= 0".into()));
    }
    if !(p.max_length > 0.0 && p.max_length.is_finite()) {
        return Err(Error::InvalidArgument("max_length must be > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut side = (p.n as f64).sqrt() * (p.max_length + p.min_separation) * 2.0;
    let mut segments: Vec<Segment> = Vec::with_capacity(p.n);
    let mut growths = 0;
    while segments.len() < p.n {
        let mut placed = false;
        for _ in 0..PLACEMENT_TRIES {
            let cx = rng.gen::<f64>() * side;
            let cy = rng.gen::<f64>() * side;
            let theta = rng.gen::<f64>() * std::f64::consts::TAU;
            let len = (1.0 - rng.gen::<f64>()) * p.max_length;
            let (dx, dy) = (0.5 * len * theta.cos(), 0.5 * len * theta.sin());
            let cand = Segment::from_coords(cx - dx, cy - dy, cx + dx, cy + dy);
            if cand.length() > p.max_length {
                continue;
            }
            let ok = segments.iter().all(|s| {
                let d = segment_distance(s, &cand);
                d > 0.0 && d >= p.min_separation
            });
            if ok {
                segments.push(cand);
                placed = true;
                break;
            }
        }
        if !placed {
            growths += 1;
            if growths > BOX_GROWTHS {
                return Err(Error::Placement(p.n));
            }
            side *= 1.5;
        }
    }
    Instance::new(segments, format!("random-n{}-s{}", p.n, p.seed))
}
