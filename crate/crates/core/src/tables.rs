//! CSV tables with `# key: value` header comments.
//!
//! Floats are written with 17 significant digits so a read-back is exact.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::SurvivalRow;
use crate::orders::{Grid, Holds, OrderVerdict, Relation};
use crate::systems::Distortion;

/// Ordered `key: value` pairs written as comment lines above the header.
pub type Metadata = Vec<(String, String)>;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionRow {
    pub p: f64,
    pub h: f64,
    pub h_prime: f64,
    #[serde(rename = "H")]
    pub hazard_transfer: f64,
    #[serde(rename = "R")]
    pub rev_hazard_transfer: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub relation: Relation,
    pub holds: Holds,
    pub witness_x: Option<f64>,
    pub violation: Option<f64>,
    pub skipped_points: usize,
}

impl From<&OrderVerdict> for VerdictRow {
    fn from(v: &OrderVerdict) -> Self {
        VerdictRow {
            relation: v.relation,
            holds: v.holds,
            witness_x: v.witness.map(|w| w.x),
            violation: v.witness.map(|w| w.violation),
            skipped_points: v.skipped,
        }
    }
}

/// Tabulates `h`, `h'`, `H` and `R`; flagged values are written as `NaN`.
pub fn distortion_rows(d: &Distortion, grid: &Grid) -> Result<Vec<DistortionRow>> {
    let value = |r: Result<crate::numeric::Flagged>| r.map(|f| f.usable().unwrap_or(f64::NAN));
    grid.points()
        .iter()
        .map(|&p| {
            Ok(DistortionRow {
                p,
                h: d.h_eval(p)?,
                h_prime: d.h_deriv(p)?,
                hazard_transfer: value(d.hazard_transfer(p))?,
                rev_hazard_transfer: value(d.rev_hazard_transfer(p))?,
            })
        })
        .collect()
}

fn write_table<W: Write>(
    mut out: W,
    meta: &Metadata,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<()> {
    let io = |e: std::io::Error| Error::Table(e.to_string());
    for (k, v) in meta {
        writeln!(out, "# {k}: {v}").map_err(io)?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().map_err(io)?;
    Ok(())
}

fn read_table<R: Read, T: for<'de> Deserialize<'de>>(mut input: R) -> Result<(Metadata, Vec<T>)> {
    let mut text = String::new();
    input
        .read_to_string(&mut text)
        .map_err(|e| Error::Table(e.to_string()))?;
    let meta = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| {
            let body = l.trim_start_matches('#').trim();
            match body.split_once(':') {
                Some((k, v)) => (k.trim().to_string(), v.trim().to_string()),
                None => (body.to_string(), String::new()),
            }
        })
        .collect();
    let rows = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()?;
    Ok((meta, rows))
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn write_distortion_table<W: Write>(out: W, meta: &Metadata, rows: &[DistortionRow]) -> Result<()> {
    write_table(
        out,
        meta,
        &["p", "h", "h_prime", "H", "R"],
        rows.iter().map(|r| {
            [r.p, r.h, r.h_prime, r.hazard_transfer, r.rev_hazard_transfer]
                .into_iter()
                .map(fmt_f64)
                .collect()
        }),
    )
}

pub fn read_distortion_table<R: Read>(input: R) -> Result<(Metadata, Vec<DistortionRow>)> {
    read_table(input)
}

pub fn write_verdict_table<W: Write>(out: W, meta: &Metadata, rows: &[VerdictRow]) -> Result<()> {
    write_table(
        out,
        meta,
        &["relation", "holds", "witness_x", "violation", "skipped_points"],
        rows.iter().map(|r| {
            vec![
                r.relation.to_string(),
                format!("{:?}", r.holds).to_lowercase(),
                opt(r.witness_x),
                opt(r.violation),
                r.skipped_points.to_string(),
            ]
        }),
    )
}

pub fn read_verdict_table<R: Read>(input: R) -> Result<(Metadata, Vec<VerdictRow>)> {
    read_table(input)
}

pub fn write_simulation_table<W: Write>(out: W, meta: &Metadata, rows: &[SurvivalRow]) -> Result<()> {
    write_table(
        out,
        meta,
        &["x", "empirical_sf", "analytic_sf", "std_err"],
        rows.iter().map(|r| {
            [r.x, r.empirical_sf, r.analytic_sf, r.std_err]
                .into_iter()
                .map(fmt_f64)
                .collect()
        }),
    )
}

pub fn read_simulation_table<R: Read>(input: R) -> Result<(Metadata, Vec<SurvivalRow>)> {
    read_table(input)
}
