//! Separability and the pick-any-endpoint heuristic.
//!
//! With `k = min distance between segments / longest segment`, the claimed
//! factor for an arbitrary endpoint choice is `1 + 1/k`. What the triangle
//! inequality actually gives is `1 + 2/k`: swapping the endpoints of both
//! segments joined by an optimal edge can lengthen it by two segment lengths,
//! and the edge is at least `k` lengths long. Two collinear unit segments
//! one unit apart, picked at their far ends, cost `3 = 1 + 2/k` times the
//! optimum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::segment_distance;
use crate::instance::{ChoiceSolution, Instance};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeparabilityReport {
    /// `f64::INFINITY` when there is a single segment or all have length 0.
    pub k: f64,
    pub min_distance: f64,
    pub max_length: f64,
    /// The closest pair of segments, if there are at least two.
    pub witness: Option<(usize, usize)>,
}

impl SeparabilityReport {
    /// The claimed factor `1 + 1/k` for arbitrary endpoints.
    pub fn guarantee(&self) -> f64 {
        if self.k.is_infinite() {
            1.0
        } else {
            1.0 + 1.0 / self.k
        }
    }

    /// The factor `1 + 2/k` that holds for every endpoint choice.
    pub fn proven_bound(&self) -> f64 {
        if self.k.is_infinite() {
            1.0
        } else {
            1.0 + 2.0 / self.k
        }
    }
}

pub fn separability_of(inst: &Instance) -> SeparabilityReport {
    let mut min_distance = f64::INFINITY;
    let mut witness = None;
    let segs = &inst.segments;
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            let d = segment_distance(&segs[i], &segs[j]);
            if d < min_distance {
                min_distance = d;
                witness = Some((i, j));
            }
        }
    }
    let max_length = inst.max_length();
    let k = if witness.is_none() || max_length == 0.0 {
        f64::INFINITY
    } else {
        min_distance / max_length
    };
    SeparabilityReport {
        k,
        min_distance,
        max_length,
        witness,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PickPolicy {
    #[default]
    AlwaysA,
    AlwaysB,
    SeededRandom(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PickResult {
    pub solution: ChoiceSolution,
    pub report: SeparabilityReport,
    pub guarantee: f64,
}

/// Picks one endpoint per segment by `policy` and returns the MST over them.
pub fn solve_pick_endpoint(inst: &Instance, policy: PickPolicy) -> Result<PickResult> {
    let choices: Vec<u8> = match policy {
        PickPolicy::AlwaysA => vec![0; inst.len()],
        PickPolicy::AlwaysB => vec![1; inst.len()],
        PickPolicy::SeededRandom(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..inst.len()).map(|_| rng.gen_range(0..2u8)).collect()
        }
    };
    let solution = ChoiceSolution::from_choices(inst, choices)?;
    let report = separability_of(inst);
    Ok(PickResult {
        solution,
        guarantee: report.guarantee(),
        report,
    })
}
