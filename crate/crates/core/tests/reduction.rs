use msts_core::exact::{brute_force_msts, exact_cluster_mst, max2sat_brute, BnBConfig};
use msts_core::geometry::{euclidean_mst, Point};
use msts_core::instance::{validate, ChoiceSolution};
use msts_core::reduction::{
    build_gadgets, canonical_choices, canonical_tree, decode_assignment, decode_points, parse_cnf2,
    ReductionLayout, Role, Variant,
};
use msts_core::Error;

fn layout(text: &str) -> ReductionLayout {
    build_gadgets(&parse_cnf2(text).unwrap(), Variant::Msts, None).unwrap()
}

fn assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << n).map(move |m| (0..n).map(|i| m >> (n - 1 - i) & 1 == 1).collect())
}

/// MST weight of the non-clause chosen endpoints.
fn core_cost(l: &ReductionLayout, assignment: &[bool]) -> f64 {
    let choices = canonical_choices(l, assignment).unwrap();
    let pts: Vec<Point> = l
        .core_indices()
        .into_iter()
        .map(|i| l.instance.segments[i].endpoint(choices[i]))
        .collect();
    euclidean_mst(&pts).unwrap().cost
}

const FORMULAS: [&str; 5] = [
    "p cnf 2 1\n1 2 0\n",
    "p cnf 1 1\n1 -1 0\n",
    "p cnf 3 2\n-1 2 0\n2 -3 0\n",
    "p cnf 2 3\n1 2 0\n-1 2 0\n1 -2 0\n",
    "p cnf 3 3\n1 1 0\n-1 -2 0\n3 -1 0\n",
];

#[test]
fn structure() {
    for text in FORMULAS {
        let f = parse_cnf2(text).unwrap();
        let l = layout(text);
        let (n, m) = (f.num_vars, f.clauses.len());
        assert_eq!(l.instance.len(), 5 * n + 13 * m);
        assert!(validate(&l.instance).is_ok());
        assert_eq!(l.core_indices().len(), 5 * n + 12 * m);
        let mut ys: Vec<f64> = l
            .roles
            .iter()
            .zip(&l.instance.segments)
            .filter(|(r, _)| matches!(r, Role::Literal { l: 5 | 6, .. }))
            .map(|(_, s)| s.a.y)
            .collect();
        ys.sort_by(f64::total_cmp);
        ys.dedup();
        assert_eq!(ys.len(), 4 * m, "literal levels must be distinct");
    }
}

#[test]
fn core_cost_does_not_depend_on_assignment() {
    for text in FORMULAS {
        let l = layout(text);
        for a in assignments(l.var_count()) {
            let c = core_cost(&l, &a);
            assert!(
                (c - l.baseline_cost).abs() <= 1e-9 * l.baseline_cost,
                "{text:?} {a:?}"
            );
        }
    }
}

#[test]
fn canonical_cost_counts_unsatisfied_clauses() {
    for text in FORMULAS {
        let l = layout(text);
        let f = &l.formula;
        for a in assignments(l.var_count()) {
            let unsat = f.clauses.len() - f.satisfied_count(&a);
            let t = canonical_tree(&l, &a).unwrap();
            let want = l.baseline_cost + unsat as f64 * l.eps;
            assert!(
                (t.cost - want).abs() <= 1e-9 * l.baseline_cost,
                "{text:?} {a:?}"
            );
            assert_eq!(decode_assignment(&l, &t).unwrap(), a);
        }
    }
}

#[test]
fn one_clause_optimum_matches_identity() {
    for (p, q) in [(1, 2), (1, -2), (-1, 2), (-1, -2)] {
        let text = format!("p cnf 2 1\n{p} {q} 0\n");
        let l = layout(&text);
        let (_, k) = max2sat_brute(&l.formula).unwrap();
        let opt = brute_force_msts(&l.instance, BnBConfig::default()).unwrap();
        let want = l.baseline_cost + (1 - k) as f64 * l.eps;
        assert!(
            (opt.cost - want).abs() <= 1e-9 * l.baseline_cost,
            "{text:?}"
        );
        let a = decode_assignment(&l, &opt).unwrap();
        assert_eq!(l.formula.satisfied_count(&a), k);
    }
}

#[test]
fn unsatisfiable_pair_pays_one_epsilon() {
    let l = layout("p cnf 1 2\n1 1 0\n-1 -1 0\n");
    let opt = brute_force_msts(&l.instance, BnBConfig::default()).unwrap();
    assert!((opt.cost - l.baseline_cost - l.eps).abs() <= 1e-9 * l.baseline_cost);
    assert_eq!(
        l.formula
            .satisfied_count(&decode_assignment(&l, &opt).unwrap()),
        1
    );
}

#[test]
fn decoder_normalizes_or_rejects() {
    let l = layout("p cnf 2 1\n1 2 0\n");
    let canon = canonical_tree(&l, &[true, false]).unwrap();
    // a chain in index order reaches the column from the side
    let n = l.instance.len();
    let chain: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    let odd = ChoiceSolution::with_edges(&l.instance, canon.choices.clone(), chain).unwrap();
    assert_eq!(decode_assignment(&l, &odd).unwrap(), vec![true, false]);
    // the variable's column vertical picks its bottom: no decodable routing
    let mut broken = canon.choices.clone();
    broken[l.variable_index(1, 4)] = 1;
    let sol = ChoiceSolution::from_choices(&l.instance, broken).unwrap();
    assert!(matches!(
        decode_assignment(&l, &sol),
        Err(Error::Undecodable)
    ));
}

/// Extending horizontals by 1/2 puts their ends halfway between two column
/// tops, where they bridge the gap almost for free. The sampled extended
/// instance is therefore cheaper than the MSTS optimum by about 12 epsilon.
#[test]
fn min_msts_sampling_undercuts_msts() {
    let text = "p cnf 2 1\n1 -2 0\n";
    let msts = layout(text);
    let ext = build_gadgets(&msts.formula, Variant::MinMsts, None).unwrap();
    let opt = brute_force_msts(&msts.instance, BnBConfig::default()).unwrap();
    let clusters: Vec<Vec<Point>> = ext
        .instance
        .segments
        .iter()
        .zip(&msts.instance.segments)
        .zip(&ext.roles)
        .map(|((e, o), r)| {
            if r.is_horizontal() {
                let mid = Point::new(0.5 * (e.a.x + e.b.x), 0.5 * (e.a.y + e.b.y));
                vec![o.a, o.b, e.a, e.b, mid]
            } else {
                vec![e.a, e.b]
            }
        })
        .collect();
    let best = exact_cluster_mst(&clusters, BnBConfig::default()).unwrap();
    let gap = opt.cost - best.cost;
    assert!((gap - 0.12704618648659).abs() < 1e-9, "{gap}");
    let pts: Vec<Point> = best
        .choices
        .iter()
        .enumerate()
        .map(|(i, &c)| clusters[i][c])
        .collect();
    assert!((euclidean_mst(&pts).unwrap().cost - best.cost).abs() < 1e-9);
    let a = decode_points(&ext, &pts).unwrap();
    assert_eq!(ext.formula.satisfied_count(&a), 1);
}
