use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::numeric::{Flag, Flagged};
use crate::systems::System;

use super::grid::Grid;
use super::monotone::{check_monotone, Direction, Holds, MonotoneReport, Witness};

/// Denominators below this are treated as zero and the point is skipped.
/// Cumulative hazards are evaluated without cancellation, so anything above
/// the underflow threshold still carries full relative precision.
const DENOMINATOR_FLOOR: f64 = crate::numeric::UNDERFLOW;

/// `X` relation `Y`, read as "X is smaller than Y" for the classical orders
/// and "X ages faster than Y" for the ageing-faster orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `F̄_X ≤ F̄_Y` pointwise.
    St,
    /// `F̄_Y / F̄_X` increasing.
    Hr,
    /// `F_Y / F_X` increasing.
    Rh,
    /// `r_X / r_Y` increasing.
    C,
    /// `r̃_X / r̃_Y` decreasing.
    B,
    /// `Δ_X / Δ_Y` increasing.
    CStar,
    /// `Δ̃_X / Δ̃_Y` decreasing.
    BStar,
}

impl Relation {
    pub const ALL: [Relation; 7] = [
        Relation::St,
        Relation::Hr,
        Relation::Rh,
        Relation::C,
        Relation::B,
        Relation::CStar,
        Relation::BStar,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Relation::St => "st",
            Relation::Hr => "hr",
            Relation::Rh => "rh",
            Relation::C => "c",
            Relation::B => "b",
            Relation::CStar => "c_star",
            Relation::BStar => "b_star",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Relation::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::UnsupportedRelation(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub relation: Relation,
    pub holds: Holds,
    pub witness: Option<Witness>,
    pub tolerance: f64,
    pub evaluated: usize,
    pub skipped: usize,
}

impl OrderVerdict {
    pub fn from_report(relation: Relation, report: MonotoneReport) -> Self {
        OrderVerdict {
            relation,
            holds: report.holds,
            witness: report.witness,
            tolerance: report.tolerance,
            evaluated: report.evaluated,
            skipped: report.skipped,
        }
    }
}

fn quotient(num: Flagged, den: Flagged) -> Flagged {
    match (num.usable(), den.usable()) {
        (Some(a), Some(b)) if b.abs() >= DENOMINATOR_FLOOR => Flagged::ok(a / b),
        _ => Flagged::flagged(f64::NAN, Flag::Indeterminate),
    }
}

fn difference(a: Flagged, b: Flagged) -> Flagged {
    match (a.usable(), b.usable()) {
        (Some(a), Some(b)) => Flagged::ok(a - b),
        _ => Flagged::flagged(f64::NAN, Flag::Indeterminate),
    }
}

/// Checks `X relation Y` for two lifetime laws on the grid.
///
/// The hazard-rate and reversed-hazard-rate orders are checked on the
/// logarithm of their ratios (`Δ_X - Δ_Y` and `Δ̃_X - Δ̃_Y`), which is
/// monotone exactly when the ratio is.
pub fn check_order(
    x: &Distribution,
    y: &Distribution,
    relation: Relation,
    grid: &Grid,
    tol: f64,
) -> Result<OrderVerdict> {
    let report = match relation {
        Relation::St => {
            let violations = grid.points().iter().map(|&t| Witness {
                x: t,
                violation: x.sf(t) - y.sf(t),
            });
            MonotoneReport::from_violations(violations, tol, grid.len(), 0)?
        }
        Relation::Hr => check_monotone(
            |t| difference(x.cum_hazard(t), y.cum_hazard(t)),
            grid,
            Direction::Increasing,
            tol,
        )?,
        Relation::Rh => check_monotone(
            |t| difference(x.cum_rev_hazard(t), y.cum_rev_hazard(t)),
            grid,
            Direction::Increasing,
            tol,
        )?,
        Relation::C => check_monotone(
            |t| quotient(Flagged::from(x.hazard(t)), Flagged::from(y.hazard(t))),
            grid,
            Direction::Increasing,
            tol,
        )?,
        Relation::B => check_monotone(
            |t| quotient(x.rev_hazard(t), y.rev_hazard(t)),
            grid,
            Direction::Decreasing,
            tol,
        )?,
        Relation::CStar => check_monotone(
            |t| quotient(x.cum_hazard(t), y.cum_hazard(t)),
            grid,
            Direction::Increasing,
            tol,
        )?,
        Relation::BStar => check_monotone(
            |t| quotient(x.cum_rev_hazard(t), y.cum_rev_hazard(t)),
            grid,
            Direction::Decreasing,
            tol,
        )?,
    };
    Ok(OrderVerdict::from_report(relation, report))
}

/// Checks `τ_1 ≺ τ_2` directly from the system lifetimes: the ratio of
/// `-ln h_1(F̄_X(x))` to `-ln h_2(F̄_Y(x))` for `c_star`, or of the
/// corresponding cumulative reversed hazards for `b_star`.
pub fn system_order_direct(
    first: &System,
    second: &System,
    relation: Relation,
    grid: &Grid,
    tol: f64,
) -> Result<OrderVerdict> {
    let report = match relation {
        Relation::CStar => check_monotone(
            |t| quotient(first.cum_hazard(t), second.cum_hazard(t)),
            grid,
            Direction::Increasing,
            tol,
        )?,
        Relation::BStar => check_monotone(
            |t| quotient(first.cum_rev_hazard(t), second.cum_rev_hazard(t)),
            grid,
            Direction::Decreasing,
            tol,
        )?,
        other => return Err(Error::UnsupportedRelation(other.to_string())),
    };
    Ok(OrderVerdict::from_report(relation, report))
}
