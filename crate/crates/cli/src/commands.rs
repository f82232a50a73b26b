use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use msts_core::instance::{
    fmt_g17, parse_instance, parse_instance_with, parse_solution, random_instance, recost,
    serialize_instance, serialize_solution, validate as validate_geometry, RandomParams,
};
use msts_core::reduction::{build_gadgets, parse_cnf2, Variant};
use msts_core::separability::separability_of;
use msts_core::{Error, Instance};

use crate::output::{emit, read, write_atomic, Internal, RunReport};
use crate::{solve as algos, svg, BenchArgs, CompareArgs, Format, GenCnfArgs, GenRandomArgs};
use crate::{RenderArgs, SolveArgs, ValidateArgs, VariantArg};

fn load_instance(path: &Path) -> Result<Instance> {
    let mut inst =
        parse_instance(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    if inst.name.is_empty() {
        inst.name = stem(path);
    }
    Ok(inst)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn print_report(r: &RunReport, format: Format) {
    match format {
        Format::Text => println!("{}", r.text()),
        Format::Json => println!("{}", r.json()),
    }
}

pub fn solve(a: SolveArgs) -> Result<()> {
    let inst = load_instance(&a.input)?;
    let (sol, mut report) = algos::run(&inst, a.algo, &a.opts)?;
    if recost(&inst, &sol) != sol.cost {
        return Err(Internal("solution cost does not reproduce from its edges".into()).into());
    }
    if a.oracle {
        let opt = algos::exact(&inst, &a.opts)?;
        report.set_optimum(opt.cost);
    }
    if let Some(out) = &a.out {
        write_atomic(out, &serialize_solution(&sol))?;
    }
    print_report(&report, a.format);
    Ok(())
}

pub fn gen_random(a: GenRandomArgs) -> Result<()> {
    let inst = random_instance(RandomParams {
        n: a.n,
        seed: a.seed,
        min_separation: a.separation,
        max_length: a.length,
    })?;
    emit(a.out.as_deref(), &serialize_instance(&inst))
}

/// The role map is written next to the instance as `<out>.roles`.
pub fn roles_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".roles");
    PathBuf::from(s)
}

pub fn gen_cnf(a: GenCnfArgs) -> Result<()> {
    let formula = parse_cnf2(&read(&a.cnf)?)?;
    let variant = match a.variant {
        VariantArg::Msts => Variant::Msts,
        VariantArg::MinMsts => Variant::MinMsts,
    };
    let mut layout = build_gadgets(&formula, variant, a.epsilon)?;
    layout.instance.name = format!("{}-{}", stem(&a.cnf), layout.instance.name);
    log::info!(
        "{} segments, eps {}, baseline {}",
        layout.instance.len(),
        layout.eps,
        layout.baseline_cost
    );
    let text = serialize_instance(&layout.instance);
    match &a.out {
        Some(out) => {
            let mut roles = String::new();
            let _ = writeln!(roles, "# eps {}", fmt_g17(layout.eps));
            let _ = writeln!(roles, "# baseline {}", fmt_g17(layout.baseline_cost));
            roles.push_str(&layout.provenance());
            write_atomic(out, &text)?;
            write_atomic(&roles_path(out), &roles)
        }
        None => emit(None, &text),
    }
}

pub fn validate(a: ValidateArgs) -> Result<()> {
    let inst = parse_instance_with(&read(&a.input)?, false)?;
    let report = validate_geometry(&inst);
    if let Some(&(i, j)) = report.violations.first() {
        for &(i, j) in &report.violations {
            eprintln!("segments {i} and {j} intersect");
        }
        return Err(Error::NotDisjoint(i, j).into());
    }
    let sep = separability_of(&inst);
    println!("instance ok: {} segments, k = {}", inst.len(), sep.k);
    if let Some(path) = &a.sol {
        let sol = parse_solution(&read(path)?, &inst)?;
        sol.check(&inst)?;
        println!("solution ok: cost {}", fmt_g17(sol.cost));
    }
    Ok(())
}

pub fn compare(a: CompareArgs) -> Result<()> {
    if a.algos.is_empty() {
        bail!("no algorithms given");
    }
    let inst = load_instance(&a.input)?;
    let opt = if a.oracle {
        Some(algos::exact(&inst, &a.opts)?.cost)
    } else {
        None
    };
    for &algo in &a.algos {
        let (_, mut r) = algos::run(&inst, algo, &a.opts)?;
        if let Some(o) = opt {
            r.set_optimum(o);
        }
        print_report(&r, a.format);
    }
    Ok(())
}

fn suite_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading suite {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "msts"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no .msts files in {}", dir.display());
    }
    Ok(files)
}

#[derive(Default)]
struct Aggregate {
    runs: usize,
    ratios: Vec<f64>,
}

pub fn bench(a: BenchArgs) -> Result<()> {
    if a.algos.is_empty() {
        bail!("no algorithms given");
    }
    if a.repeat == 0 {
        bail!("--repeat must be at least 1");
    }
    let files = suite_files(&a.suite)?;
    let mut rows: Vec<RunReport> = Vec::new();
    let mut agg: BTreeMap<String, Aggregate> = BTreeMap::new();
    for path in &files {
        let inst = load_instance(path)?;
        let opt = if inst.len() <= a.oracle_max {
            Some(algos::exact(&inst, &a.opts)?.cost)
        } else {
            None
        };
        for &algo in &a.algos {
            let mut first: Option<f64> = None;
            for _ in 0..a.repeat {
                let (_, mut r) = algos::run(&inst, algo, &a.opts)?;
                match first {
                    None => first = Some(r.cost),
                    Some(c) if c.to_bits() != r.cost.to_bits() => {
                        return Err(Internal(format!(
                            "{} on {}: cost changed between repeats ({c} vs {})",
                            r.algorithm, inst.name, r.cost
                        ))
                        .into());
                    }
                    _ => {}
                }
                if let Some(o) = opt {
                    r.set_optimum(o);
                }
                let e = agg.entry(r.algorithm.clone()).or_default();
                e.runs += 1;
                if let Some(g) = r.gap {
                    e.ratios.push(1.0 + g);
                }
                rows.push(r);
            }
        }
    }
    let mut table = format!(
        "{:<28} {:>5} {:<16} {:>14} {:>14} {:>9} {:>9}\n",
        "instance", "n", "algorithm", "cost", "optimum", "ratio", "time_s"
    );
    for r in &rows {
        let (o, ratio) = match (r.optimum, r.gap) {
            (Some(o), Some(g)) => (format!("{o:.6}"), format!("{:.4}", 1.0 + g)),
            _ => ("-".into(), "-".into()),
        };
        let _ = writeln!(
            table,
            "{:<28} {:>5} {:<16} {:>14.6} {:>14} {:>9} {:>9.4}",
            r.instance, r.n, r.algorithm, r.cost, o, ratio, r.wall_time_s
        );
    }
    table.push('\n');
    for (name, e) in &agg {
        if e.ratios.is_empty() {
            let _ = writeln!(table, "{name}: {} runs, no oracle", e.runs);
        } else {
            let mean = e.ratios.iter().sum::<f64>() / e.ratios.len() as f64;
            let max = e.ratios.iter().copied().fold(f64::MIN, f64::max);
            let _ = writeln!(
                table,
                "{name}: {} runs, mean ratio {mean:.4}, max ratio {max:.4}",
                e.runs
            );
        }
    }
    print!("{table}");
    if let Some(path) = &a.jsonl {
        let lines: String = rows.iter().map(|r| r.json() + "\n").collect();
        write_atomic(path, &lines)?;
    }
    Ok(())
}

fn clause_flags(path: &Path, n: usize) -> Result<Vec<bool>> {
    let mut flags = vec![false; n];
    for (lineno, line) in read(path)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let idx: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .filter(|&i| i < n)
            .ok_or(Error::ParseAt(lineno + 1))?;
        flags[idx] = toks.next() == Some("clause");
    }
    Ok(flags)
}

pub fn render(a: RenderArgs) -> Result<()> {
    let inst = load_instance(&a.input)?;
    let sol = match &a.sol {
        Some(p) => Some(parse_solution(&read(p)?, &inst)?),
        None => None,
    };
    let roles = a.roles.clone().or_else(|| {
        let p = roles_path(&a.input);
        p.is_file().then_some(p)
    });
    let clause = match &roles {
        Some(p) => clause_flags(p, inst.len())?,
        None => vec![false; inst.len()],
    };
    emit(a.out.as_deref(), &svg::render(&inst, sol.as_ref(), &clause))
}
