use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{Error, Result};

pub const DEFAULT_GRID_SIZE: usize = 2001;

/// Tail probabilities cut off by [`Grid::for_margins`].
const TAIL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridPolicy {
    LogSpaced,
    Linear,
    Custom,
}

/// Strictly increasing, strictly positive evaluation points.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    policy: GridPolicy,
}

impl Grid {
    pub fn custom(points: Vec<f64>) -> Result<Self> {
        Grid::validated(points, GridPolicy::Custom)
    }

    pub fn linear(lo: f64, hi: f64, size: usize) -> Result<Self> {
        check_bounds(lo, hi, size)?;
        let points = (0..size)
            .map(|i| {
                if i + 1 == size {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (size - 1) as f64
                }
            })
            .collect();
        Grid::validated(points, GridPolicy::Linear)
    }

    pub fn log_spaced(lo: f64, hi: f64, size: usize) -> Result<Self> {
        check_bounds(lo, hi, size)?;
        let (a, b) = (lo.ln(), hi.ln());
        let points = (0..size)
            .map(|i| match i {
                0 => lo,
                _ if i + 1 == size => hi,
                _ => (a + (b - a) * i as f64 / (size - 1) as f64).exp(),
            })
            .collect();
        Grid::validated(points, GridPolicy::LogSpaced)
    }

    /// `size` linear points on `[eps, 1 - eps]`, the default domain for
    /// checks on functionals of a distortion.
    pub fn unit_interval(eps: f64, size: usize) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::InvalidGrid(format!(
                "endpoint margin {eps} must be in (0, 0.5)"
            )));
        }
        Grid::linear(eps, 1.0 - eps, size)
    }

    /// Log-spaced points between the `0.001` and `0.999` quantiles of the
    /// equal mixture of two lifetime laws.
    pub fn for_margins(x: &Distribution, y: &Distribution, size: usize) -> Result<Self> {
        let lo = mixture_quantile(x, y, TAIL);
        let hi = mixture_quantile(x, y, 1.0 - TAIL);
        Grid::log_spaced(lo, hi, size)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn policy(&self) -> GridPolicy {
        self.policy
    }

    fn validated(points: Vec<f64>, policy: GridPolicy) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid("no points".into()));
        }
        if let Some(bad) = points.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::InvalidGrid(format!(
                "point {bad} is not finite and positive"
            )));
        }
        if let Some(w) = points.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "points must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Grid { points, policy })
    }
}

fn check_bounds(lo: f64, hi: f64, size: usize) -> Result<()> {
    if size < 2 {
        return Err(Error::InvalidGrid(format!("size {size} must be at least 2")));
    }
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "bounds [{lo}, {hi}] must satisfy 0 < lo < hi"
        )));
    }
    Ok(())
}

/// Bisection on `(F_X + F_Y)/2`, bracketed by the component quantiles.
fn mixture_quantile(x: &Distribution, y: &Distribution, prob: f64) -> f64 {
    let (qx, qy) = (x.quantile(prob), y.quantile(prob));
    let (mut lo, mut hi) = (qx.min(qy), qx.max(qy));
    let target = |t: f64| 0.5 * (x.cdf(t) + y.cdf(t)) - prob;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if target(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
