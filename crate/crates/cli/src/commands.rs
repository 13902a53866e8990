use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::{Context, Result};
use coherent_age::montecarlo::{default_sim_grid, simulate_system, SimConfig};
use coherent_age::orders::{check_order, system_order_direct, Holds, OrderVerdict, Relation};
use coherent_age::tables::{
    distortion_rows, fmt_f64, write_distortion_table, write_simulation_table, write_verdict_table, Metadata,
    VerdictRow,
};
use coherent_age::verifier::{corollary_index_check, verify, ConditionReport};
use serde::{Deserialize, Serialize};

use crate::spec::{CorollarySpec, LoadedSpec, SystemSpec};

/// JSON document written by `verify`.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub spec_sha256: String,
    pub report: ConditionReport,
}

/// JSON document written by `corollary`.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryOutput {
    pub spec_sha256: String,
    pub relation: Relation,
    pub k: usize,
    pub n: usize,
    pub l: usize,
    pub m: usize,
    pub holds: bool,
}

fn sink(spec: &LoadedSpec) -> Result<Box<dyn Write>> {
    Ok(match &spec.spec.output.path {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(spec: &LoadedSpec, value: &T) -> Result<()> {
    let mut out = sink(spec)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn meta(spec: &LoadedSpec) -> Metadata {
    vec![("spec_sha256".into(), spec.sha256.clone())]
}

fn pick(spec: &LoadedSpec, which: u8) -> Result<&SystemSpec> {
    match which {
        1 => Ok(&spec.spec.system1),
        2 => spec.spec.system2(),
        other => anyhow::bail!("--system must be 1 or 2, got {other}"),
    }
}

fn holds_exit(holds: Holds) -> i32 {
    match holds {
        Holds::Yes => 0,
        Holds::No => 2,
        Holds::Inconclusive => 3,
    }
}

pub fn distortion(spec: &LoadedSpec, which: u8) -> Result<i32> {
    let system = pick(spec, which)?.build()?;
    let rows = distortion_rows(system.distortion(), &spec.spec.p_grid()?)?;
    let mut m = meta(spec);
    m.push(("system".into(), which.to_string()));
    let mut out = sink(spec)?;
    write_distortion_table(&mut out, &m, &rows)?;
    out.flush()?;
    let flagged = rows.iter().any(|r| {
        [r.h, r.h_prime, r.hazard_transfer, r.rev_hazard_transfer]
            .iter()
            .any(|v| !v.is_finite())
    });
    Ok(if flagged { 3 } else { 0 })
}

/// Compares the margins of the two systems, or the system lifetimes with
/// `direct`.
pub fn check_order_cmd(spec: &LoadedSpec, direct: bool) -> Result<i32> {
    let s = &spec.spec;
    let relation = s.relation()?;
    let (first, second) = (s.system1.build()?, s.system2()?.build()?);
    let grid = s.x_grid(first.margin(), second.margin())?;
    let verdict: OrderVerdict = if direct {
        system_order_direct(&first, &second, relation, &grid, s.tolerances.tol)?
    } else {
        check_order(first.margin(), second.margin(), relation, &grid, s.tolerances.tol)?
    };
    let mut m = meta(spec);
    m.push((
        "subject".into(),
        if direct { "systems" } else { "margins" }.into(),
    ));
    m.push(("tolerance".into(), fmt_f64(verdict.tolerance)));
    let mut out = sink(spec)?;
    write_verdict_table(&mut out, &m, &[VerdictRow::from(&verdict)])?;
    out.flush()?;
    Ok(holds_exit(verdict.holds))
}

pub fn verify_cmd(spec: &LoadedSpec) -> Result<i32> {
    let s = &spec.spec;
    let (first, second) = (s.system1.build()?, s.system2()?.build()?);
    let report = verify(&first, &second, s.relation()?, &s.verify_config()?)?;
    eprintln!("{}", report.summary);
    if report.soundness_violation {
        eprintln!("warning: certified but the direct grid check did not confirm the order");
    }
    let code = report.exit_code();
    write_json(
        spec,
        &VerifyOutput {
            spec_sha256: spec.sha256.clone(),
            report,
        },
    )?;
    Ok(code)
}

pub fn simulate(spec: &LoadedSpec, which: u8) -> Result<i32> {
    let system = pick(spec, which)?.build()?;
    let sim = spec.spec.simulation();
    let cfg = SimConfig {
        sample_count: sim.sample_count,
        seed: sim.seed,
        stream_count: sim.stream_count,
    };
    let grid = match &spec.spec.grid.x_points {
        Some(points) => coherent_age::orders::Grid::custom(points.clone())?,
        None => default_sim_grid(system.margin(), sim.grid_points)?,
    };
    let curve = simulate_system(&system, &grid, &cfg)?;
    let worst = curve.max_standardized_deviation();
    let mut m = meta(spec);
    m.extend([
        ("system".into(), which.to_string()),
        ("seed".into(), cfg.seed.to_string()),
        ("sample_count".into(), cfg.sample_count.to_string()),
        ("stream_count".into(), cfg.stream_count.to_string()),
        ("acceptance_rate".into(), fmt_f64(curve.acceptance_rate)),
        ("max_standardized_deviation".into(), fmt_f64(worst)),
    ]);
    let mut out = sink(spec)?;
    write_simulation_table(&mut out, &m, &curve.rows)?;
    out.flush()?;
    if worst > 4.0 {
        eprintln!("max standardized deviation {worst:.3} exceeds 4");
        return Ok(3);
    }
    Ok(0)
}

/// Index check for two `k`-out-of-`n` systems, from the `corollary` block or
/// inferred from the system structures.
pub fn corollary(spec: &LoadedSpec) -> Result<i32> {
    let s = &spec.spec;
    let relation = s.relation()?;
    let idx = match s.corollary {
        Some(c) => c,
        None => {
            let (a, b) = (&s.system1, s.system2()?);
            let k = a.k_out_of_n()?.context("system1 is not k-out-of-n")?;
            let l = b.k_out_of_n()?.context("system2 is not k-out-of-n")?;
            CorollarySpec { k, n: a.n, l, m: b.n }
        }
    };
    let holds = corollary_index_check(idx.k, idx.n, idx.l, idx.m, relation)?;
    write_json(
        spec,
        &CorollaryOutput {
            spec_sha256: spec.sha256.clone(),
            relation,
            k: idx.k,
            n: idx.n,
            l: idx.l,
            m: idx.m,
            holds,
        },
    )?;
    Ok(if holds { 0 } else { 2 })
}
