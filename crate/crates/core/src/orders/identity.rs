use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numeric::Prob;
use crate::systems::System;

use super::grid::Grid;
use super::quadrature::integrate;

/// Largest discrepancies between the direct system cumulative hazards and
/// their integral representations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub points: usize,
    pub skipped: usize,
    pub max_hazard_discrepancy: f64,
    pub worst_hazard_x: f64,
    pub max_reversed_discrepancy: f64,
    pub worst_reversed_x: f64,
}

impl IdentityReport {
    pub fn max_discrepancy(&self) -> f64 {
        self.max_hazard_discrepancy.max(self.max_reversed_discrepancy)
    }
}

/// Verifies at each grid point that
///
/// ```text
/// -ln h(F̄(x))     = ∫_0^{Δ(x)} H(e^{-v}) dv
/// -ln(1 - h(F̄(x))) = ∫_0^{Δ̃(x)} R(1 - e^{-v}) dv
/// ```
///
/// where the left sides come straight from the distortion and the right
/// sides by adaptive quadrature to `quad_tol`.
pub fn integral_identity_check(system: &System, grid: &Grid, quad_tol: f64) -> Result<IdentityReport> {
    let d = system.distortion();
    let margin = system.margin();
    let mut report = IdentityReport {
        points: 0,
        skipped: 0,
        max_hazard_discrepancy: 0.0,
        worst_hazard_x: f64::NAN,
        max_reversed_discrepancy: 0.0,
        worst_reversed_x: f64::NAN,
    };
    for &x in grid.points() {
        let direct = (system.cum_hazard(x).usable(), system.cum_rev_hazard(x).usable());
        let bounds = (margin.cum_hazard(x).usable(), margin.cum_rev_hazard(x).usable());
        let (Some(lhs_h), Some(lhs_r)) = direct else {
            report.skipped += 1;
            continue;
        };
        let (Some(upper_h), Some(upper_r)) = bounds else {
            report.skipped += 1;
            continue;
        };
        let rhs_h = integrate(
            |v| d.hazard_transfer_at(&Prob::from_ln(-v)),
            0.0,
            upper_h,
            quad_tol,
            0.0,
        )?;
        let rhs_r = integrate(
            |v| d.rev_hazard_transfer_at(&Prob::from_ln_complement(-v)),
            0.0,
            upper_r,
            quad_tol,
            0.0,
        )?;
        report.points += 1;
        let e_h = (lhs_h - rhs_h).abs();
        if e_h > report.max_hazard_discrepancy || report.worst_hazard_x.is_nan() {
            report.max_hazard_discrepancy = e_h;
            report.worst_hazard_x = x;
        }
        let e_r = (lhs_r - rhs_r).abs();
        if e_r > report.max_reversed_discrepancy || report.worst_reversed_x.is_nan() {
            report.max_reversed_discrepancy = e_r;
            report.worst_reversed_x = x;
        }
    }
    Ok(report)
}
