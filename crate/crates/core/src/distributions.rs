//! Parametric lifetime laws on `[0, inf)`.
//!
//! Every quantity is a closed form in the cumulative hazard `Δ(x) = -ln F̄(x)`:
//! the survival function, the distribution function (via `expm1`), both
//! cumulative hazards, both hazard rates and the density.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{Flag, Flagged, UNDERFLOW};

/// JSON form of a lifetime law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistributionSpec {
    Exp { rate: f64 },
    Lfr { alpha: f64, beta: f64 },
    Weibull { shape: f64, scale: f64 },
}

/// A validated lifetime distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionSpec", into = "DistributionSpec")]
pub enum Distribution {
    Exponential {
        rate: f64,
    },
    /// `F̄(x) = exp{-α(x + βx²)}`.
    LinearFailureRate {
        alpha: f64,
        beta: f64,
    },
    Weibull {
        shape: f64,
        scale: f64,
    },
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

impl Distribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        Ok(Distribution::Exponential {
            rate: positive("rate", rate)?,
        })
    }

    pub fn linear_failure_rate(alpha: f64, beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
                reason: "must be finite and >= 0",
            });
        }
        Ok(Distribution::LinearFailureRate {
            alpha: positive("alpha", alpha)?,
            beta,
        })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        Ok(Distribution::Weibull {
            shape: positive("shape", shape)?,
            scale: positive("scale", scale)?,
        })
    }

    /// Closed-form cumulative hazard without the underflow policy.
    pub fn cum_hazard_raw(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            Distribution::Exponential { rate } => rate * x,
            Distribution::LinearFailureRate { alpha, beta } => alpha * (x + beta * x * x),
            Distribution::Weibull { shape, scale } => (x / scale).powf(shape),
        }
    }

    /// Survival function `F̄(x)`.
    pub fn sf(&self, x: f64) -> f64 {
        (-self.cum_hazard_raw(x)).exp()
    }

    /// Distribution function `F(x)`, accurate for small `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        -(-self.cum_hazard_raw(x)).exp_m1()
    }

    /// `Δ(x) = -ln F̄(x)`; flagged `+inf` once `F̄` drops below `1e-300`.
    pub fn cum_hazard(&self, x: f64) -> Flagged {
        let raw = self.cum_hazard_raw(x);
        if raw > -UNDERFLOW.ln() {
            Flagged::flagged(f64::INFINITY, Flag::Underflow)
        } else {
            Flagged::ok(raw)
        }
    }

    /// `Δ̃(x) = -ln F(x)`; flagged `+inf` once `F` drops below `1e-300`.
    pub fn cum_rev_hazard(&self, x: f64) -> Flagged {
        let raw = self.cum_hazard_raw(x);
        let cdf = -(-raw).exp_m1();
        if cdf < UNDERFLOW {
            return Flagged::flagged(f64::INFINITY, Flag::Underflow);
        }
        let sf = (-raw).exp();
        if sf < 0.5 {
            Flagged::ok(-(-sf).ln_1p())
        } else {
            Flagged::ok(-cdf.ln())
        }
    }

    /// Hazard rate `r(x) = f(x)/F̄(x)`. Infinite at `x = 0` for a Weibull
    /// law with shape below one.
    pub fn hazard(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        match *self {
            Distribution::Exponential { rate } => rate,
            Distribution::LinearFailureRate { alpha, beta } => alpha * (1.0 + 2.0 * beta * x),
            Distribution::Weibull { shape, scale } => {
                if x == 0.0 {
                    return match shape.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => 1.0 / scale,
                        _ => 0.0,
                    };
                }
                shape / scale * (x / scale).powf(shape - 1.0)
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let r = self.hazard(x);
        if r == 0.0 {
            return 0.0;
        }
        r * self.sf(x)
    }

    /// Reversed hazard rate `r̃(x) = f(x)/F(x)`; flagged `+inf` where `F`
    /// underflows.
    pub fn rev_hazard(&self, x: f64) -> Flagged {
        let cdf = self.cdf(x);
        if cdf < UNDERFLOW {
            return Flagged::flagged(f64::INFINITY, Flag::Underflow);
        }
        Flagged::ok(self.pdf(x) / cdf)
    }

    /// The time at which the cumulative hazard reaches `t`.
    pub fn time_at_cum_hazard(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match *self {
            Distribution::Exponential { rate } => t / rate,
            Distribution::LinearFailureRate { alpha, beta } => {
                // positive root of αβx² + αx - t = 0, written without cancellation
                2.0 * t / (alpha + (alpha * alpha + 4.0 * alpha * beta * t).sqrt())
            }
            Distribution::Weibull { shape, scale } => scale * t.powf(1.0 / shape),
        }
    }

    /// Inverse survival function: the `x` with `F̄(x) = u`.
    pub fn inverse_sf(&self, u: f64) -> f64 {
        if u >= 1.0 {
            return 0.0;
        }
        if u <= 0.0 {
            return f64::INFINITY;
        }
        self.time_at_cum_hazard(-u.ln())
    }

    /// Quantile: the `x` with `F(x) = prob`.
    pub fn quantile(&self, prob: f64) -> f64 {
        if prob <= 0.0 {
            return 0.0;
        }
        if prob >= 1.0 {
            return f64::INFINITY;
        }
        self.time_at_cum_hazard(-(-prob).ln_1p())
    }
}

impl TryFrom<DistributionSpec> for Distribution {
    type Error = Error;

    fn try_from(spec: DistributionSpec) -> Result<Self> {
        match spec {
            DistributionSpec::Exp { rate } => Distribution::exponential(rate),
            DistributionSpec::Lfr { alpha, beta } => Distribution::linear_failure_rate(alpha, beta),
            DistributionSpec::Weibull { shape, scale } => Distribution::weibull(shape, scale),
        }
    }
}

impl From<Distribution> for DistributionSpec {
    fn from(d: Distribution) -> Self {
        match d {
            Distribution::Exponential { rate } => DistributionSpec::Exp { rate },
            Distribution::LinearFailureRate { alpha, beta } => DistributionSpec::Lfr { alpha, beta },
            Distribution::Weibull { shape, scale } => DistributionSpec::Weibull { shape, scale },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn survival_examples() {
        assert_eq!(Distribution::exponential(3.0).unwrap().sf(0.0), 1.0);
        let lfr = Distribution::linear_failure_rate(1.0, 1.0).unwrap();
        assert!(close(lfr.sf(1.0), 0.1353352832366127, 1e-15));
        let e2 = Distribution::exponential(2.0).unwrap();
        assert!(close(e2.sf(0.5), 0.36787944117144233, 1e-15));
    }

    #[test]
    fn cumulative_hazard_examples() {
        let e1 = Distribution::exponential(1.0).unwrap();
        assert_eq!(e1.cum_hazard(1.0), Flagged::ok(1.0));
        let lfr = Distribution::linear_failure_rate(2.0, 1.0).unwrap();
        assert_eq!(lfr.cum_hazard(2.0).value, 12.0);

        let e2 = Distribution::exponential(2.0).unwrap();
        let mut prev = f64::INFINITY;
        for i in 1..200 {
            let v = e2.cum_rev_hazard(i as f64 * 0.25).value;
            assert!(v <= prev && v >= 0.0);
            prev = v;
        }
        assert!(prev < 1e-40);
    }

    #[test]
    fn hazard_examples() {
        let e3 = Distribution::exponential(3.0).unwrap();
        for x in [0.01, 1.0, 17.0] {
            assert_eq!(e3.hazard(x), 3.0);
        }
        let lfr = Distribution::linear_failure_rate(1.0, 1.0).unwrap();
        assert_eq!(lfr.hazard(1.0), 3.0);
        let w = Distribution::weibull(1.0, 1.0).unwrap();
        assert!(close(w.hazard(2.0), 1.0, 1e-15));
    }

    #[test]
    fn underflow_is_flagged_not_fatal() {
        let e = Distribution::exponential(1.0).unwrap();
        let d = e.cum_hazard(800.0);
        assert_eq!(d.flag, Some(Flag::Underflow));
        assert!(d.value.is_infinite());
        let r = e.cum_rev_hazard(0.0);
        assert_eq!(r.flag, Some(Flag::Underflow));
        assert_eq!(e.rev_hazard(0.0).flag, Some(Flag::Underflow));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(Distribution::exponential(0.0).is_err());
        assert!(Distribution::exponential(f64::NAN).is_err());
        assert!(Distribution::linear_failure_rate(1.0, -0.1).is_err());
        assert!(Distribution::linear_failure_rate(-1.0, 0.0).is_err());
        assert!(Distribution::weibull(0.0, 1.0).is_err());
        assert!(Distribution::weibull(1.0, -2.0).is_err());
    }

    #[test]
    fn inverse_sf_round_trips() {
        let laws = [
            Distribution::exponential(2.5).unwrap(),
            Distribution::linear_failure_rate(0.7, 3.0).unwrap(),
            Distribution::linear_failure_rate(0.7, 0.0).unwrap(),
            Distribution::weibull(0.6, 2.0).unwrap(),
        ];
        for d in laws {
            for u in [1e-9, 0.01, 0.3, 0.5, 0.99] {
                let x = d.inverse_sf(u);
                assert!(close(d.sf(x), u, 1e-12), "{d:?} u={u}");
                let q = d.quantile(u);
                assert!(close(d.cdf(q), u, 1e-12));
            }
        }
    }

    #[test]
    fn json_fragments() {
        let d: Distribution = serde_json::from_str(r#"{"family":"lfr","alpha":1.0,"beta":1.0}"#).unwrap();
        assert_eq!(d, Distribution::linear_failure_rate(1.0, 1.0).unwrap());
        let d: Distribution = serde_json::from_str(r#"{"family":"exp","rate":3.0}"#).unwrap();
        assert_eq!(d, Distribution::exponential(3.0).unwrap());
        let d: Distribution =
            serde_json::from_str(r#"{"family":"weibull","shape":2.0,"scale":1.0}"#).unwrap();
        assert_eq!(d, Distribution::weibull(2.0, 1.0).unwrap());
        assert!(serde_json::from_str::<Distribution>(r#"{"family":"exp","rate":-1.0}"#).is_err());
        assert!(serde_json::from_str::<Distribution>(r#"{"family":"exp","rate":1.0,"x":1}"#).is_err());
        let back = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<Distribution>(&back).unwrap(), d);
    }
}
