//! Certification pipelines for the ageing-faster orders between two
//! coherent systems.
//!
//! Each pipeline evaluates four sufficient conditions and certifies the
//! order when `{(i), (ii), (iv)}` or `{(i), (iii), (iv)}` pass. A failed
//! condition never implies that the order fails; the report then says
//! "not certified by this route". The direct grid check of the conclusion
//! is always attached as an audit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Flagged;
use crate::orders::{
    check_monotone, check_order, system_order_direct, Direction, Grid, Holds, OrderVerdict, Relation,
    Witness, DEFAULT_GRID_SIZE,
};
use crate::systems::{Distortion, System};

pub const NOT_CERTIFIED: &str = "not certified by this route";

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    /// Functionals of `h` are checked on `[eps_endpoint, 1 - eps_endpoint]`.
    pub eps_endpoint: f64,
    pub p_grid_size: usize,
    /// Size of the default log-spaced grid over the margins.
    pub x_grid_size: usize,
    /// Replaces the default grid over the margins when set.
    pub x_grid: Option<Grid>,
    /// Tolerance for closed-form monotonicity checks.
    pub tol: f64,
    /// Tolerance for checks on `H'` and `R'`.
    pub derivative_tol: f64,
    /// Values within this distance of zero count as both signs.
    pub sign_slack: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            eps_endpoint: 1e-3,
            p_grid_size: DEFAULT_GRID_SIZE,
            x_grid_size: DEFAULT_GRID_SIZE,
            x_grid: None,
            tol: 1e-9,
            derivative_tol: 1e-6,
            sign_slack: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    /// Passed only because the expression vanishes identically within the
    /// sign slack.
    Boundary,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn passed(&self) -> bool {
        matches!(self, Status::Pass | Status::Boundary)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub label: String,
    pub name: String,
    pub status: Status,
    pub witness: Option<Witness>,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    Certified,
    NotCertifiedByThisRoute,
    Inconclusive,
}

impl Conclusion {
    /// Process exit code: 0 certified, 2 not certified, 3 inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self {
            Conclusion::Certified => 0,
            Conclusion::NotCertifiedByThisRoute => 2,
            Conclusion::Inconclusive => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub relation: Relation,
    pub conditions: Vec<Condition>,
    pub conclusion: Conclusion,
    /// Labels of the sufficient set that certified, if any.
    pub certified_by: Option<Vec<String>>,
    pub summary: String,
    pub direct: OrderVerdict,
    /// Set when the conditions certified but the direct check disagreed.
    pub soundness_violation: bool,
}

impl ConditionReport {
    pub fn condition(&self, label: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.label == label)
    }

    pub fn exit_code(&self) -> i32 {
        if self.soundness_violation {
            3
        } else {
            self.conclusion.exit_code()
        }
    }
}

fn status_of(holds: Holds) -> Status {
    match holds {
        Holds::Yes => Status::Pass,
        Holds::No => Status::Fail,
        Holds::Inconclusive => Status::Inconclusive,
    }
}

fn ratio_condition(
    label: &str,
    name: &str,
    grid: &Grid,
    direction: Direction,
    tol: f64,
    f: impl Fn(f64) -> Result<(Flagged, Flagged)>,
) -> Result<Condition> {
    let report = check_monotone(
        |p| match f(p) {
            Ok((a, b)) => match (a.usable(), b.usable()) {
                (Some(a), Some(b)) if b != 0.0 => Flagged::ok(a / b),
                _ => Flagged::from(f64::NAN),
            },
            Err(_) => Flagged::from(f64::NAN),
        },
        grid,
        direction,
        tol,
    )?;
    Ok(Condition {
        label: label.into(),
        name: name.into(),
        status: status_of(report.holds),
        witness: report.witness,
        detail: format!(
            "{} points, {} skipped, tolerance {:e}",
            report.evaluated, report.skipped, report.tolerance
        ),
    })
}

/// `sign * value <= slack` everywhere (i.e. negative for `sign = 1`,
/// positive for `sign = -1`) and nonincreasing within `tol`.
fn signed_decreasing_condition(
    label: &str,
    name: &str,
    grid: &Grid,
    negative: bool,
    cfg: &VerifyConfig,
    f: impl Fn(f64) -> Result<Flagged>,
) -> Result<Condition> {
    let eval = |p: f64| f(p).unwrap_or_else(|_| Flagged::from(f64::NAN));
    let mut worst_sign: Option<Witness> = None;
    let mut largest = 0.0f64;
    for &p in grid.points() {
        let Some(v) = eval(p).usable() else { continue };
        largest = largest.max(v.abs());
        let against = if negative { v } else { -v };
        if worst_sign.is_none_or(|w| against > w.violation) {
            worst_sign = Some(Witness {
                x: p,
                violation: against,
            });
        }
    }
    let monotone = check_monotone(eval, grid, Direction::Decreasing, cfg.derivative_tol)?;
    let sign_name = if negative { "negative" } else { "positive" };
    let (status, witness, detail) = match worst_sign {
        Some(w) if w.violation > cfg.sign_slack => (
            Status::Fail,
            Some(w),
            format!(
                "not {sign_name}: value {:e} at p = {}",
                if negative { w.violation } else { -w.violation },
                w.x
            ),
        ),
        _ if monotone.holds == Holds::No => (Status::Fail, monotone.witness, "not decreasing".to_string()),
        _ if monotone.holds == Holds::Inconclusive => (
            Status::Inconclusive,
            monotone.witness,
            format!("{} of {} points skipped", monotone.skipped, grid.len()),
        ),
        _ if largest <= cfg.sign_slack => (
            Status::Boundary,
            monotone.witness,
            format!("identically zero within {:e}", cfg.sign_slack),
        ),
        _ => (
            Status::Pass,
            monotone.witness,
            format!(
                "{} points, tolerance {:e}",
                monotone.evaluated, cfg.derivative_tol
            ),
        ),
    };
    Ok(Condition {
        label: label.into(),
        name: name.into(),
        status,
        witness,
        detail,
    })
}

fn margins_condition(label: &str, name: &str, verdicts: [OrderVerdict; 2]) -> Condition {
    let failed = verdicts.iter().find(|v| v.holds == Holds::No);
    let unsure = verdicts.iter().find(|v| v.holds == Holds::Inconclusive);
    let (status, witness) = match (failed, unsure) {
        (Some(v), _) => (Status::Fail, v.witness),
        (None, Some(v)) => (Status::Inconclusive, v.witness),
        (None, None) => (Status::Pass, verdicts[0].witness),
    };
    let detail = verdicts
        .iter()
        .map(|v| format!("{}: {:?}", v.relation, v.holds).to_lowercase())
        .collect::<Vec<_>>()
        .join(", ");
    Condition {
        label: label.into(),
        name: name.into(),
        status,
        witness,
        detail,
    }
}

fn assemble(relation: Relation, conditions: Vec<Condition>, direct: OrderVerdict) -> ConditionReport {
    let status = |label: &str| {
        conditions
            .iter()
            .find(|c| c.label == label)
            .map(|c| c.status)
            .unwrap_or(Status::Inconclusive)
    };
    let sets = [["i", "ii", "iv"], ["i", "iii", "iv"]];
    let certified_by = sets
        .iter()
        .find(|set| set.iter().all(|l| status(l).passed()))
        .map(|set| set.iter().map(|l| l.to_string()).collect::<Vec<_>>());
    let conclusion = if certified_by.is_some() {
        Conclusion::Certified
    } else if sets
        .iter()
        .all(|set| set.iter().any(|l| status(l) == Status::Fail))
    {
        Conclusion::NotCertifiedByThisRoute
    } else {
        Conclusion::Inconclusive
    };
    let summary = match conclusion {
        Conclusion::Certified => format!(
            "certified: τ1 {relation} τ2 via conditions ({})",
            certified_by.as_ref().map(|s| s.join("), (")).unwrap_or_default()
        ),
        Conclusion::NotCertifiedByThisRoute => NOT_CERTIFIED.to_string(),
        Conclusion::Inconclusive => "inconclusive: numeric flags prevented a decision".to_string(),
    };
    let soundness_violation = conclusion == Conclusion::Certified && direct.holds != Holds::Yes;
    ConditionReport {
        relation,
        conditions,
        conclusion,
        certified_by,
        summary,
        direct,
        soundness_violation,
    }
}

fn grids(first: &System, second: &System, cfg: &VerifyConfig) -> Result<(Grid, Grid)> {
    let p_grid = Grid::unit_interval(cfg.eps_endpoint, cfg.p_grid_size)?;
    let x_grid = match &cfg.x_grid {
        Some(g) => g.clone(),
        None => Grid::for_margins(first.margin(), second.margin(), cfg.x_grid_size)?,
    };
    Ok((p_grid, x_grid))
}

fn pair(
    d1: &Distortion,
    d2: &Distortion,
    f: impl Fn(&Distortion, f64) -> Result<Flagged>,
) -> impl Fn(f64) -> Result<(Flagged, Flagged)> {
    let (d1, d2) = (d1.clone(), d2.clone());
    move |p| Ok((f(&d1, p)?, f(&d2, p)?))
}

/// Sufficient conditions for `τ1(X)` ageing faster than `τ2(Y)` in the
/// cumulative hazard:
///
/// * (i) `H1/H2` decreasing on `(0, 1)`;
/// * (ii) `(1-p) H1'/H1` negative and decreasing;
/// * (iii) `(1-p) H2'/H2` negative and decreasing;
/// * (iv) `X ≺_{c*} Y` and `Y ≤_st X`.
pub fn verify_cstar(first: &System, second: &System, cfg: &VerifyConfig) -> Result<ConditionReport> {
    let (p_grid, x_grid) = grids(first, second, cfg)?;
    let (d1, d2) = (first.distortion(), second.distortion());
    let conditions = vec![
        ratio_condition(
            "i",
            "hazard_transfer_ratio_decreasing",
            &p_grid,
            Direction::Decreasing,
            cfg.tol,
            pair(d1, d2, |d, p| d.hazard_transfer(p)),
        )?,
        signed_decreasing_condition(
            "ii",
            "first_hazard_transfer_elasticity_negative_decreasing",
            &p_grid,
            true,
            cfg,
            |p| d1.hazard_transfer_elasticity(p),
        )?,
        signed_decreasing_condition(
            "iii",
            "second_hazard_transfer_elasticity_negative_decreasing",
            &p_grid,
            true,
            cfg,
            |p| d2.hazard_transfer_elasticity(p),
        )?,
        margins_condition(
            "iv",
            "margins_cstar_and_reverse_st",
            [
                check_order(first.margin(), second.margin(), Relation::CStar, &x_grid, cfg.tol)?,
                check_order(second.margin(), first.margin(), Relation::St, &x_grid, cfg.tol)?,
            ],
        ),
    ];
    let direct = system_order_direct(first, second, Relation::CStar, &x_grid, cfg.tol)?;
    Ok(assemble(Relation::CStar, conditions, direct))
}

/// Sufficient conditions for `τ1(X)` ageing faster than `τ2(Y)` in the
/// cumulative reversed hazard:
///
/// * (i) `R1/R2` increasing on `(0, 1)`;
/// * (ii) `p R1'/R1` positive and decreasing;
/// * (iii) `p R2'/R2` positive and decreasing;
/// * (iv) `X ≺_{b*} Y` and `X ≤_st Y`.
pub fn verify_bstar(first: &System, second: &System, cfg: &VerifyConfig) -> Result<ConditionReport> {
    let (p_grid, x_grid) = grids(first, second, cfg)?;
    let (d1, d2) = (first.distortion(), second.distortion());
    let conditions = vec![
        ratio_condition(
            "i",
            "rev_hazard_transfer_ratio_increasing",
            &p_grid,
            Direction::Increasing,
            cfg.tol,
            pair(d1, d2, |d, p| d.rev_hazard_transfer(p)),
        )?,
        signed_decreasing_condition(
            "ii",
            "first_rev_hazard_transfer_elasticity_positive_decreasing",
            &p_grid,
            false,
            cfg,
            |p| d1.rev_hazard_transfer_elasticity(p),
        )?,
        signed_decreasing_condition(
            "iii",
            "second_rev_hazard_transfer_elasticity_positive_decreasing",
            &p_grid,
            false,
            cfg,
            |p| d2.rev_hazard_transfer_elasticity(p),
        )?,
        margins_condition(
            "iv",
            "margins_bstar_and_st",
            [
                check_order(first.margin(), second.margin(), Relation::BStar, &x_grid, cfg.tol)?,
                check_order(first.margin(), second.margin(), Relation::St, &x_grid, cfg.tol)?,
            ],
        ),
    ];
    let direct = system_order_direct(first, second, Relation::BStar, &x_grid, cfg.tol)?;
    Ok(assemble(Relation::BStar, conditions, direct))
}

/// Dispatches on the target relation.
pub fn verify(
    first: &System,
    second: &System,
    relation: Relation,
    cfg: &VerifyConfig,
) -> Result<ConditionReport> {
    match relation {
        Relation::CStar => verify_cstar(first, second, cfg),
        Relation::BStar => verify_bstar(first, second, cfg),
        other => Err(Error::UnsupportedRelation(other.to_string())),
    }
}

/// Index pattern under which an i.i.d. `k`-out-of-`n` system in `X` ages
/// faster than an i.i.d. `l`-out-of-`m` system in `Y`, given the margin
/// hypotheses: `k ≤ l` and `m - l ≤ n - k` for `c_star`; `l ≤ k` and
/// `n - k ≤ m - l` for `b_star`.
pub fn corollary_index_check(k: usize, n: usize, l: usize, m: usize, relation: Relation) -> Result<bool> {
    if k == 0 || k > n || l == 0 || l > m {
        return Err(Error::IndexOutOfRange(format!(
            "(k, n, l, m) = ({k}, {n}, {l}, {m})"
        )));
    }
    match relation {
        Relation::CStar => Ok(k <= l && m - l <= n - k),
        Relation::BStar => Ok(l <= k && n - k <= m - l),
        other => Err(Error::UnsupportedRelation(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copulas::{Copula, CopulaFamily};
    use crate::distributions::Distribution;
    use crate::systems::Structure;

    fn fgm_system(theta: f64, alpha: f64) -> System {
        System::new(
            Structure::new(3, vec![vec![1, 2], vec![1, 3]]).unwrap(),
            Copula::new(CopulaFamily::Fgm { theta }, 3).unwrap(),
            Distribution::linear_failure_rate(alpha, 1.0).unwrap(),
        )
        .unwrap()
    }

    fn series_system(alpha: f64) -> System {
        System::new(
            Structure::series(3).unwrap(),
            Copula::independence(3),
            Distribution::linear_failure_rate(alpha, 1.0).unwrap(),
        )
        .unwrap()
    }

    fn gumbel_series(m: usize, theta: f64, rate: f64) -> System {
        System::new(
            Structure::series(m).unwrap(),
            Copula::new(CopulaFamily::GumbelHougaard { theta }, m).unwrap(),
            Distribution::exponential(rate).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn fgm_example_certifies() {
        let r = verify_cstar(
            &fgm_system(1.0, 1.0),
            &series_system(2.0),
            &VerifyConfig::default(),
        )
        .unwrap();
        assert_eq!(r.condition("i").unwrap().status, Status::Pass);
        assert_eq!(r.condition("iii").unwrap().status, Status::Boundary);
        assert_eq!(r.condition("iv").unwrap().status, Status::Pass);
        assert_eq!(r.conclusion, Conclusion::Certified);
        assert_eq!(r.direct.holds, Holds::Yes);
        assert!(!r.soundness_violation);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn swapped_margins_not_certified() {
        let r = verify_cstar(
            &fgm_system(1.0, 2.0),
            &series_system(1.0),
            &VerifyConfig::default(),
        )
        .unwrap();
        assert_eq!(r.condition("iv").unwrap().status, Status::Fail);
        assert_eq!(r.conclusion, Conclusion::NotCertifiedByThisRoute);
        assert_eq!(r.summary, NOT_CERTIFIED);
        assert_eq!(r.exit_code(), 2);
    }

    #[test]
    fn failed_route_does_not_refute_order() {
        let s = fgm_system(0.5, 1.0);
        let r = verify_cstar(&s, &s, &VerifyConfig::default()).unwrap();
        assert_eq!(r.condition("i").unwrap().status, Status::Pass);
        assert_eq!(r.condition("ii").unwrap().status, Status::Fail);
        assert_eq!(r.conclusion, Conclusion::NotCertifiedByThisRoute);
        assert_eq!(r.direct.holds, Holds::Yes);
        assert!(r.direct.witness.unwrap().violation.abs() < 1e-14);
    }

    #[test]
    fn identical_series_systems_certify_trivially() {
        let s = series_system(1.5);
        let r = verify_cstar(&s, &s, &VerifyConfig::default()).unwrap();
        assert_eq!(r.condition("ii").unwrap().status, Status::Boundary);
        assert_eq!(r.conclusion, Conclusion::Certified);
        assert!(r.direct.witness.unwrap().violation.abs() < 1e-14);
    }

    #[test]
    fn gumbel_example_certifies() {
        let r = verify_bstar(
            &gumbel_series(4, 2.0, 3.0),
            &gumbel_series(2, 2.0, 2.0),
            &VerifyConfig::default(),
        )
        .unwrap();
        for label in ["i", "ii", "iv"] {
            assert!(r.condition(label).unwrap().status.passed(), "{label}: {r:#?}");
        }
        assert_eq!(r.conclusion, Conclusion::Certified);
        assert_eq!(r.direct.holds, Holds::Yes);
    }

    #[test]
    fn gumbel_equal_sizes_ratio_is_one() {
        let r = verify_bstar(
            &gumbel_series(3, 2.0, 3.0),
            &gumbel_series(3, 2.0, 2.0),
            &VerifyConfig::default(),
        )
        .unwrap();
        let w = r.condition("i").unwrap().witness.unwrap();
        assert!(w.violation.abs() < 1e-12);
        assert_eq!(r.conclusion, Conclusion::Certified);
    }

    #[test]
    fn gumbel_smaller_first_system_fails_ratio() {
        let r = verify_bstar(
            &gumbel_series(2, 2.0, 3.0),
            &gumbel_series(4, 2.0, 2.0),
            &VerifyConfig::default(),
        )
        .unwrap();
        assert_eq!(r.condition("i").unwrap().status, Status::Fail);
        assert_ne!(r.conclusion, Conclusion::Certified);
    }

    #[test]
    fn corollary_examples() {
        assert!(corollary_index_check(1, 3, 2, 3, Relation::CStar).unwrap());
        assert!(!corollary_index_check(2, 3, 1, 3, Relation::CStar).unwrap());
        assert!(corollary_index_check(2, 3, 2, 3, Relation::CStar).unwrap());
        assert!(corollary_index_check(2, 3, 2, 3, Relation::BStar).unwrap());
        assert!(corollary_index_check(0, 3, 2, 3, Relation::BStar).is_err());
        assert!(corollary_index_check(1, 3, 2, 3, Relation::St).is_err());
    }

    #[test]
    fn report_json_round_trip() {
        let r = verify_cstar(
            &fgm_system(1.0, 1.0),
            &series_system(2.0),
            &VerifyConfig::default(),
        )
        .unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: ConditionReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
