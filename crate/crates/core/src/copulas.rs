//! Exchangeable survival copulas.
//!
//! `K(p_1, …, p_n)` couples the common marginal survival probability of the
//! components into their joint survival probability. Every family here is
//! exchangeable, so `K` evaluated with `j` coordinates at `p` and the rest at
//! one depends only on `(p, j)`; the distortion engine works exclusively with
//! that reduced form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Prob;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "copula", rename_all = "lowercase", deny_unknown_fields)]
pub enum CopulaFamily {
    Independence,
    /// Trivariate Farlie–Gumbel–Morgenstern, `θ ∈ [-1, 1]`.
    Fgm {
        theta: f64,
    },
    /// Gumbel–Hougaard, `θ >= 1`.
    #[serde(rename = "gumbel")]
    GumbelHougaard {
        theta: f64,
    },
    /// Clayton–Oakes in the standard Archimedean form
    /// `(Σ p_i^{-θ} - (n - 1))^{-1/θ}`, `θ > 0`. Provided as an extension
    /// family; none of the worked examples use it.
    #[serde(rename = "clayton")]
    ClaytonOakes {
        theta: f64,
    },
}

/// A copula family bound to a dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Copula {
    family: CopulaFamily,
    dim: usize,
}

/// `K_j`, `1 - K_j` and the first two derivatives of `K_j` in `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct ExchangeableParts {
    pub value: f64,
    pub complement: f64,
    pub d1: f64,
    pub d2: f64,
}

fn check_prob(value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            what: "p",
            value,
            domain: "[0, 1]",
        })
    }
}

impl Copula {
    pub fn new(family: CopulaFamily, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                actual: 0,
            });
        }
        let bad = |name, value, reason| Err(Error::InvalidParameter { name, value, reason });
        match family {
            CopulaFamily::Independence => {}
            CopulaFamily::Fgm { theta } => {
                if !(-1.0..=1.0).contains(&theta) {
                    return bad("theta", theta, "FGM requires theta in [-1, 1]");
                }
                if dim != 3 {
                    return Err(Error::DimensionMismatch {
                        expected: 3,
                        actual: dim,
                    });
                }
            }
            CopulaFamily::GumbelHougaard { theta } => {
                if !(theta.is_finite() && theta >= 1.0) {
                    return bad("theta", theta, "Gumbel-Hougaard requires theta >= 1");
                }
            }
            CopulaFamily::ClaytonOakes { theta } => {
                if !(theta.is_finite() && theta > 0.0) {
                    return bad("theta", theta, "Clayton-Oakes requires theta > 0");
                }
            }
        }
        Ok(Copula { family, dim })
    }

    pub fn independence(dim: usize) -> Self {
        Copula {
            family: CopulaFamily::Independence,
            dim: dim.max(1),
        }
    }

    pub fn family(&self) -> CopulaFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `K(p)` at an arbitrary point of `[0, 1]^n`.
    pub fn eval(&self, p: &[f64]) -> Result<f64> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: p.len(),
            });
        }
        for &pi in p {
            check_prob(pi)?;
        }
        if p.contains(&0.0) {
            return Ok(0.0);
        }
        let value = match self.family {
            CopulaFamily::Independence => p.iter().product(),
            CopulaFamily::Fgm { theta } => {
                let prod: f64 = p.iter().product();
                let tail: f64 = p.iter().map(|pi| 1.0 - pi).product();
                prod * (1.0 + theta * tail)
            }
            CopulaFamily::GumbelHougaard { theta } => {
                let s: f64 = p.iter().map(|pi| (-pi.ln()).powf(theta)).sum();
                (-s.powf(1.0 / theta)).exp()
            }
            CopulaFamily::ClaytonOakes { theta } => {
                let s: f64 = p.iter().map(|pi| pi.powf(-theta) - 1.0).sum::<f64>() + 1.0;
                if s.is_infinite() {
                    0.0
                } else {
                    s.powf(-1.0 / theta)
                }
            }
        };
        Ok(value)
    }

    /// `K` with `j` coordinates at `p` and the remaining `n - j` at one.
    pub fn eval_exchangeable(&self, p: f64, j: usize) -> Result<f64> {
        if j > self.dim {
            return Err(Error::IndexOutOfRange(format!(
                "j = {j} exceeds copula dimension {}",
                self.dim
            )));
        }
        check_prob(p)?;
        Ok(self.parts(&Prob::new(p), j).value)
    }

    /// Closed forms for `K_j(p)`, `1 - K_j(p)`, `K_j'(p)` and `K_j''(p)`.
    pub(crate) fn parts(&self, pr: &Prob, j: usize) -> ExchangeableParts {
        if j == 0 {
            return ExchangeableParts {
                value: 1.0,
                complement: 0.0,
                d1: 0.0,
                d2: 0.0,
            };
        }
        let jf = j as f64;
        match self.family {
            CopulaFamily::Independence => power_parts(pr, jf),
            CopulaFamily::GumbelHougaard { theta } => power_parts(pr, jf.powf(1.0 / theta)),
            CopulaFamily::Fgm { theta } => {
                let base = power_parts(pr, jf);
                if j < 3 {
                    return base;
                }
                // K_3 = p³ + θ p³ q³
                let (p, q) = (pr.p, pr.q);
                let extra = theta * p.powi(3) * q.powi(3);
                let extra_d1 = theta * 3.0 * p * p * q * q * (q - p);
                let extra_d2 = theta * 6.0 * p * q * (q * q - 3.0 * p * q + p * p);
                ExchangeableParts {
                    value: base.value + extra,
                    complement: base.complement - extra,
                    d1: base.d1 + extra_d1,
                    d2: base.d2 + extra_d2,
                }
            }
            CopulaFamily::ClaytonOakes { theta } => {
                if pr.p == 0.0 {
                    // K_j(p) ~ j^{-1/θ} p near zero
                    return ExchangeableParts {
                        value: 0.0,
                        complement: 1.0,
                        d1: jf.powf(-1.0 / theta),
                        d2: 0.0,
                    };
                }
                // A = j - (j-1) p^θ = 1 + (j-1)(1 - p^θ);  K = p A^{-1/θ}
                let one_minus_pt = -(theta * pr.ln_p).exp_m1();
                let ln_a = ((jf - 1.0) * one_minus_pt).ln_1p();
                let ln_k = pr.ln_p - ln_a / theta;
                let pt = (theta * pr.ln_p).exp();
                ExchangeableParts {
                    value: ln_k.exp(),
                    complement: -ln_k.exp_m1(),
                    d1: jf * (-(1.0 / theta + 1.0) * ln_a).exp(),
                    d2: jf * (jf - 1.0) * (1.0 + theta) * pt / pr.p * (-(1.0 / theta + 2.0) * ln_a).exp(),
                }
            }
        }
    }

    /// Power-basis coefficients of `K_j` when it is a polynomial in `p`,
    /// split as `base + θ·theta_part`.
    pub(crate) fn polynomial(&self, j: usize) -> Option<(Vec<i128>, Vec<i128>, f64)> {
        let monomial = |deg: usize| {
            let mut c = vec![0i128; deg + 1];
            c[deg] = 1;
            c
        };
        match self.family {
            CopulaFamily::Independence => Some((monomial(j), Vec::new(), 0.0)),
            CopulaFamily::Fgm { theta } => {
                if j < 3 {
                    Some((monomial(j), Vec::new(), theta))
                } else {
                    // p³(1-p)³ = p³ - 3p⁴ + 3p⁵ - p⁶
                    Some((monomial(3), vec![0, 0, 0, 1, -3, 3, -1], theta))
                }
            }
            _ => None,
        }
    }
}

/// `p^a` and its derivatives, with `1 - p^a` from `expm1`.
fn power_parts(pr: &Prob, a: f64) -> ExchangeableParts {
    if pr.p == 0.0 {
        let d1 = if a == 1.0 { 1.0 } else { 0.0 };
        let d2 = if a == 2.0 { 2.0 } else { 0.0 };
        return ExchangeableParts {
            value: 0.0,
            complement: 1.0,
            d1,
            d2,
        };
    }
    let ln = pr.ln_p;
    ExchangeableParts {
        value: (a * ln).exp(),
        complement: -(a * ln).exp_m1(),
        d1: a * ((a - 1.0) * ln).exp(),
        d2: a * (a - 1.0) * ((a - 2.0) * ln).exp(),
    }
}
