use std::time::Instant;

use anyhow::Result;
use msts_core::exact::{brute_force_msts, BnBConfig};
use msts_core::separability::{solve_pick_endpoint, PickPolicy};
use msts_core::steiner_approx::solve_approx;
use msts_core::{ChoiceSolution, Instance};

use crate::output::RunReport;
use crate::{Algo, Policy, SolverOpts};

/// `auto` runs the exact solver up to this many segments.
pub const AUTO_EXACT_MAX: usize = 16;

pub fn resolve(algo: Algo, n: usize) -> Algo {
    match algo {
        Algo::Auto if n <= AUTO_EXACT_MAX => Algo::Exact,
        Algo::Auto => Algo::Steiner,
        a => a,
    }
}

fn policy(opts: &SolverOpts) -> PickPolicy {
    match opts.policy {
        Policy::A => PickPolicy::AlwaysA,
        Policy::B => PickPolicy::AlwaysB,
        Policy::Random => PickPolicy::SeededRandom(opts.seed),
    }
}

pub fn exact(inst: &Instance, opts: &SolverOpts) -> Result<ChoiceSolution> {
    let cfg = BnBConfig {
        node_budget: opts.node_budget,
        ..BnBConfig::default()
    };
    Ok(brute_force_msts(inst, cfg)?)
}

pub fn run(inst: &Instance, algo: Algo, opts: &SolverOpts) -> Result<(ChoiceSolution, RunReport)> {
    let algo = resolve(algo, inst.len());
    let start = Instant::now();
    let (sol, name, guarantee) = match algo {
        Algo::Exact => (exact(inst, opts)?, "exact".to_string(), 1.0),
        Algo::Steiner => {
            let a = solve_approx(inst)?;
            log::info!(
                "steiner cost {} repaired {} bad segments {}",
                a.steiner_cost,
                a.repaired_cost,
                a.bad_segments
            );
            (a.solution, "steiner".to_string(), a.guarantee)
        }
        Algo::Pick => {
            let p = policy(opts);
            let r = solve_pick_endpoint(inst, p)?;
            log::info!("separability k = {}", r.report.k);
            let name = match p {
                PickPolicy::AlwaysA => "pick-a".to_string(),
                PickPolicy::AlwaysB => "pick-b".to_string(),
                PickPolicy::SeededRandom(s) => format!("pick-random-{s}"),
            };
            (r.solution, name, r.guarantee)
        }
        Algo::Auto => unreachable!("resolved above"),
    };
    let report = RunReport {
        algorithm: name,
        instance: inst.name.clone(),
        n: inst.len(),
        cost: sol.cost,
        guarantee,
        wall_time_s: start.elapsed().as_secs_f64(),
        optimum: None,
        gap: None,
    };
    Ok((sol, report))
}
