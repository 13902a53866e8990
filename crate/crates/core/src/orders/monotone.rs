use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Flagged;

use super::grid::Grid;

/// Above this share of skipped points a non-violating check is inconclusive.
const MAX_SKIPPED_SHARE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Holds {
    Yes,
    No,
    Inconclusive,
}

/// The worst point found: where the largest step against the required
/// direction ends, and the size of that step. A negative violation is the
/// margin by which the check passed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: f64,
    pub violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub holds: Holds,
    pub witness: Option<Witness>,
    pub tolerance: f64,
    pub evaluated: usize,
    pub skipped: usize,
}

impl MonotoneReport {
    pub(crate) fn from_violations(
        violations: impl IntoIterator<Item = Witness>,
        tolerance: f64,
        evaluated: usize,
        skipped: usize,
    ) -> Result<Self> {
        if evaluated == 0 {
            return Err(Error::EmptyGrid { skipped });
        }
        let mut worst: Option<Witness> = None;
        for w in violations {
            if worst.is_none_or(|best| w.violation > best.violation) {
                worst = Some(w);
            }
        }
        let holds = match worst {
            Some(w) if w.violation > tolerance => Holds::No,
            _ if skipped as f64 > MAX_SKIPPED_SHARE * (evaluated + skipped) as f64 => Holds::Inconclusive,
            _ => Holds::Yes,
        };
        Ok(MonotoneReport {
            holds,
            witness: worst,
            tolerance,
            evaluated,
            skipped,
        })
    }
}

/// Checks that `f` is (weakly) monotone on the grid: every step between
/// consecutive usable points may go against `direction` by at most `tol`.
/// Flagged or non-finite values are skipped and counted.
pub fn check_monotone<F, V>(f: F, grid: &Grid, direction: Direction, tol: f64) -> Result<MonotoneReport>
where
    F: Fn(f64) -> V,
    V: Into<Flagged>,
{
    let mut usable = Vec::with_capacity(grid.len());
    let mut skipped = 0;
    for &x in grid.points() {
        match f(x).into().usable() {
            Some(v) => usable.push((x, v)),
            None => skipped += 1,
        }
    }
    let violations = usable.windows(2).map(|w| {
        let step = w[1].1 - w[0].1;
        Witness {
            x: w[1].0,
            violation: match direction {
                Direction::Increasing => -step,
                Direction::Decreasing => step,
            },
        }
    });
    MonotoneReport::from_violations(violations, tol, usable.len(), skipped)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignChanges {
    pub count: usize,
    /// Collapsed sign sequence such as `"-+"`; `"0"` when `f` vanishes
    /// everywhere within tolerance.
    pub pattern: String,
}

/// Counts strict sign alternations of `f` on the grid, ignoring values
/// within `tol` of zero and unusable values.
pub fn sign_change_count<F, V>(f: F, grid: &Grid, tol: f64) -> SignChanges
where
    F: Fn(f64) -> V,
    V: Into<Flagged>,
{
    let mut pattern = String::new();
    for &x in grid.points() {
        let Some(v) = f(x).into().usable() else { continue };
        let sign = if v > tol {
            '+'
        } else if v < -tol {
            '-'
        } else {
            continue;
        };
        if !pattern.ends_with(sign) {
            pattern.push(sign);
        }
    }
    if pattern.is_empty() {
        return SignChanges {
            count: 0,
            pattern: "0".into(),
        };
    }
    SignChanges {
        count: pattern.len() - 1,
        pattern,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Flag;

    fn unit() -> Grid {
        Grid::linear(0.01, 0.99, 99).unwrap()
    }

    #[test]
    fn identity_is_increasing() {
        let r = check_monotone(|p| p, &unit(), Direction::Increasing, 1e-12).unwrap();
        assert_eq!(r.holds, Holds::Yes);
        assert_eq!(r.evaluated, 99);
        assert!(r.witness.unwrap().violation < 0.0);
    }

    #[test]
    fn negation_fails_at_first_pair() {
        let g = Grid::custom((1..=10).map(f64::from).collect()).unwrap();
        let r = check_monotone(|p| -p, &g, Direction::Increasing, 1e-12).unwrap();
        assert_eq!(r.holds, Holds::No);
        let w = r.witness.unwrap();
        assert_eq!(w.x, 2.0);
        assert_eq!(w.violation, 1.0);
    }

    #[test]
    fn skipped_points_make_it_inconclusive() {
        let g = unit();
        let f = |p: f64| {
            if p < 0.095 {
                Flagged::flagged(f64::NAN, Flag::Indeterminate)
            } else {
                Flagged::ok(p)
            }
        };
        let r = check_monotone(f, &g, Direction::Increasing, 1e-12).unwrap();
        assert_eq!(r.skipped, 9);
        assert_eq!(r.holds, Holds::Inconclusive);

        let err = check_monotone(|_| f64::NAN, &g, Direction::Increasing, 1e-12);
        assert!(matches!(err, Err(Error::EmptyGrid { skipped: 99 })));
    }

    #[test]
    fn sign_changes() {
        let g = Grid::linear(0.01, 1.99, 199).unwrap();
        let s = sign_change_count(|x| x - 1.0, &g, 1e-12);
        assert_eq!(
            s,
            SignChanges {
                count: 1,
                pattern: "-+".into()
            }
        );
        let s = sign_change_count(|_| 1.0, &g, 1e-12);
        assert_eq!(
            s,
            SignChanges {
                count: 0,
                pattern: "+".into()
            }
        );
        let s = sign_change_count(|x: f64| (3.0 * x).sin(), &g, 1e-12);
        assert_eq!(s.pattern, "+-");
        assert_eq!(sign_change_count(|_| 0.0, &g, 1e-12).pattern, "0");
    }
}
