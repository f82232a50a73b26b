use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use msts_core::instance::{parse_instance, parse_solution, recost};
use serde_json::Value;

const TWO: &str = "MSTS 2\n0 0 1 0\n3 0 4 0\n";
const FIG6: &str = "p cnf 3 2\n-1 2 0\n2 -3 0\n";

fn msts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msts"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = msts(args);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    msts(args).status.code().unwrap()
}

fn put(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(line: &str) -> Value {
    serde_json::from_str(line.trim()).unwrap()
}

#[test]
fn exact_on_two_segments_costs_two() {
    let d = tempfile::tempdir().unwrap();
    let inst = put(d.path(), "two.msts", TWO);
    let sol = d.path().join("two.sol");
    let out = ok(&[
        "solve",
        "--algo",
        "exact",
        "--in",
        s(&inst),
        "--out",
        s(&sol),
        "--format",
        "json",
    ]);
    let r = json(&out);
    assert_eq!(r["cost"], 2.0);
    assert_eq!(r["algorithm"], "exact");
    assert!(r.get("gap").is_none());
    let text = std::fs::read_to_string(&sol).unwrap();
    assert!(text.starts_with("MSTS-SOL 2 2\n1 0\n"));
}

#[test]
fn solution_file_recosts_exactly() {
    let d = tempfile::tempdir().unwrap();
    let inst = d.path().join("r.msts");
    ok(&[
        "gen",
        "random",
        "--n",
        "14",
        "--seed",
        "5",
        "--out",
        s(&inst),
    ]);
    let parsed = parse_instance(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    for algo in ["exact", "steiner", "pick", "auto"] {
        let sol = d.path().join(format!("{algo}.sol"));
        let r = json(&ok(&[
            "solve",
            "--algo",
            algo,
            "--in",
            s(&inst),
            "--out",
            s(&sol),
            "--format",
            "json",
        ]));
        let back = parse_solution(&std::fs::read_to_string(&sol).unwrap(), &parsed).unwrap();
        assert_eq!(
            recost(&parsed, &back),
            r["cost"].as_f64().unwrap(),
            "{algo}"
        );
    }
}

#[test]
fn steiner_gap_against_oracle() {
    let d = tempfile::tempdir().unwrap();
    let inst = d.path().join("r8.msts");
    ok(&[
        "gen",
        "random",
        "--n",
        "8",
        "--seed",
        "11",
        "--out",
        s(&inst),
    ]);
    let r = json(&ok(&[
        "solve",
        "--algo",
        "steiner",
        "--in",
        s(&inst),
        "--oracle",
        "--format",
        "json",
    ]));
    let gap = r["gap"].as_f64().unwrap();
    assert!((0.0..=3.0).contains(&gap), "{gap}");
    assert_eq!(r["guarantee"], 4.0);
}

#[test]
fn pick_on_point_segments_has_no_gap() {
    let d = tempfile::tempdir().unwrap();
    let inst = put(d.path(), "pts.msts", "MSTS 3\n0 0 0 0\n2 1 2 1\n5 0 5 0\n");
    let r = json(&ok(&[
        "solve",
        "--algo",
        "pick",
        "--in",
        s(&inst),
        "--oracle",
        "--format",
        "json",
    ]));
    assert_eq!(r["gap"], 0.0);
    assert_eq!(r["guarantee"], 1.0);
}

#[test]
fn auto_switches_on_size() {
    let d = tempfile::tempdir().unwrap();
    for (n, want) in [("16", "exact"), ("17", "steiner")] {
        let inst = d.path().join(format!("{n}.msts"));
        ok(&["gen", "random", "--n", n, "--seed", "1", "--out", s(&inst)]);
        let r = json(&ok(&["solve", "--in", s(&inst), "--format", "json"]));
        assert_eq!(r["algorithm"], want);
    }
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let bad = put(d.path(), "bad.msts", "MSTS 2\n0 0 1 0\n0 0 1 0\n");
    assert_eq!(code(&["solve", "--in", s(&bad)]), 2);
    assert_eq!(code(&["validate", "--in", s(&bad)]), 2);
    assert_eq!(
        code(&["solve", "--in", s(&d.path().join("missing.msts"))]),
        2
    );
    assert_eq!(code(&["solve", "--algo", "nonsense", "--in", s(&bad)]), 2);

    let big = d.path().join("big.msts");
    ok(&[
        "gen",
        "random",
        "--n",
        "70",
        "--seed",
        "1",
        "--out",
        s(&big),
    ]);
    assert_eq!(code(&["solve", "--algo", "exact", "--in", s(&big)]), 3);
    let two = put(d.path(), "two.msts", TWO);
    assert_eq!(
        code(&[
            "solve",
            "--algo",
            "exact",
            "--node-budget",
            "1",
            "--in",
            s(&two)
        ]),
        3
    );

    // a long segment between two far-apart point segments breaks the repair bound
    let relay = put(
        d.path(),
        "relay.msts",
        "MSTS 3\n0 0 10 0\n0 1 0 1\n10 1 10 1\n",
    );
    let sol = d.path().join("relay.sol");
    assert_eq!(
        code(&[
            "solve",
            "--algo",
            "steiner",
            "--in",
            s(&relay),
            "--out",
            s(&sol)
        ]),
        4
    );
    assert!(!sol.exists());
}

#[test]
fn failed_run_leaves_no_partial_file() {
    let d = tempfile::tempdir().unwrap();
    let bad = put(d.path(), "bad.msts", "MSTS 3\n0 0 1 0\n");
    let out = d.path().join("x.sol");
    assert_eq!(code(&["solve", "--in", s(&bad), "--out", s(&out)]), 2);
    assert_eq!(std::fs::read_dir(d.path()).unwrap().count(), 1);
}

#[test]
fn gen_random_is_deterministic() {
    let a = ok(&["gen", "random", "--n", "10", "--seed", "1"]);
    let b = ok(&["gen", "random", "--n", "10", "--seed", "1"]);
    assert_eq!(a, b);
    assert!(parse_instance(&a).is_ok());
    assert_ne!(a, ok(&["gen", "random", "--n", "10", "--seed", "2"]));
}

#[test]
fn gen_from_cnf_writes_roles() {
    let d = tempfile::tempdir().unwrap();
    let cnf = put(d.path(), "f6.cnf", FIG6);
    let out = d.path().join("f6.msts");
    ok(&["gen", "from-cnf", "--cnf", s(&cnf), "--out", s(&out)]);
    let inst = parse_instance(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(inst.len(), 41);
    let roles = std::fs::read_to_string(d.path().join("f6.msts.roles")).unwrap();
    let rows: Vec<&str> = roles.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 41);
    assert_eq!(rows.iter().filter(|l| l.contains(" clause ")).count(), 2);
    assert!(ok(&["validate", "--in", s(&out)]).starts_with("instance ok: 41 segments"));

    assert_eq!(
        code(&["gen", "from-cnf", "--cnf", s(&cnf), "--epsilon", "0.5"]),
        2
    );
    let unit = put(d.path(), "unit.cnf", "p cnf 1 1\n1 0\n");
    assert_eq!(code(&["gen", "from-cnf", "--cnf", s(&unit)]), 2);
}

#[test]
fn min_msts_variant_lengthens_horizontals_by_one() {
    let d = tempfile::tempdir().unwrap();
    let cnf = put(d.path(), "f6.cnf", FIG6);
    let a = parse_instance(&ok(&["gen", "from-cnf", "--cnf", s(&cnf)])).unwrap();
    let b = parse_instance(&ok(&[
        "gen",
        "from-cnf",
        "--cnf",
        s(&cnf),
        "--variant",
        "min-msts",
    ]))
    .unwrap();
    let mut horizontals = 0;
    for (x, y) in a.segments.iter().zip(&b.segments) {
        let diff = y.length() - x.length();
        if x.a.x != x.b.x {
            horizontals += 1;
            assert!((diff - 1.0).abs() < 1e-12, "{diff}");
        } else {
            assert_eq!(diff, 0.0);
        }
    }
    assert_eq!(horizontals, 3 + 2 * 4 + 2);
}

#[test]
fn render_counts_elements() {
    let d = tempfile::tempdir().unwrap();
    let inst = put(d.path(), "two.msts", TWO);
    let svg = ok(&["render", "--in", s(&inst)]);
    assert_eq!(svg.matches("<line").count(), 2);
    assert!(svg.contains("version=\"1.1\""));

    let r = d.path().join("r.msts");
    let sol = d.path().join("r.sol");
    ok(&["gen", "random", "--n", "9", "--seed", "4", "--out", s(&r)]);
    ok(&[
        "solve",
        "--algo",
        "steiner",
        "--in",
        s(&r),
        "--out",
        s(&sol),
    ]);
    let svg = ok(&["render", "--in", s(&r), "--sol", s(&sol)]);
    assert_eq!(svg.matches("class=\"tree-edge\"").count(), 8);
    assert_eq!(svg.matches("class=\"segment\"").count(), 9);
    assert_eq!(svg.matches("<circle").count(), 9);
}

#[test]
fn render_styles_clause_segments() {
    let d = tempfile::tempdir().unwrap();
    let cnf = put(d.path(), "f6.cnf", FIG6);
    let out = d.path().join("f6.msts");
    ok(&["gen", "from-cnf", "--cnf", s(&cnf), "--out", s(&out)]);
    let svg = ok(&["render", "--in", s(&out)]);
    assert_eq!(svg.matches("class=\"segment clause\"").count(), 2);
    assert_eq!(svg.matches("<line").count(), 41);
}

#[test]
fn compare_lists_each_algorithm() {
    let d = tempfile::tempdir().unwrap();
    let inst = d.path().join("r.msts");
    ok(&[
        "gen",
        "random",
        "--n",
        "7",
        "--seed",
        "3",
        "--out",
        s(&inst),
    ]);
    let out = ok(&["compare", "--in", s(&inst), "--oracle", "--format", "json"]);
    let rows: Vec<Value> = out.lines().map(json).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["gap"], 0.0);
    for r in &rows {
        assert!(r["gap"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn bench_suite() {
    let d = tempfile::tempdir().unwrap();
    let suite = d.path().join("suite");
    std::fs::create_dir(&suite).unwrap();
    for seed in 0..20 {
        let n = (4 + seed % 7).to_string();
        let p = suite.join(format!("r{seed:02}.msts"));
        ok(&[
            "gen",
            "random",
            "--n",
            &n,
            "--seed",
            &seed.to_string(),
            "--out",
            s(&p),
        ]);
    }
    let jl = d.path().join("bench.jsonl");
    let table = ok(&[
        "bench",
        "--suite",
        s(&suite),
        "--algos",
        "exact,steiner,pick",
        "--repeat",
        "3",
        "--jsonl",
        s(&jl),
    ]);
    assert!(table.contains("steiner: 60 runs"));
    let rows: Vec<Value> = std::fs::read_to_string(&jl)
        .unwrap()
        .lines()
        .map(json)
        .collect();
    assert_eq!(rows.len(), 20 * 3 * 3);
    let worst = rows
        .iter()
        .filter(|r| r["algorithm"] == "steiner")
        .map(|r| 1.0 + r["gap"].as_f64().unwrap())
        .fold(0.0, f64::max);
    assert!(worst <= 4.0, "{worst}");
    for group in rows.chunks(3) {
        assert_eq!(group[0]["cost"], group[1]["cost"]);
        assert_eq!(group[1]["cost"], group[2]["cost"]);
    }

    assert_eq!(code(&["bench", "--suite", s(&suite), "--algos"]), 2);
    assert_eq!(
        code(&[
            "bench",
            "--suite",
            s(&d.path().join("none")),
            "--algos",
            "exact"
        ]),
        2
    );
}
