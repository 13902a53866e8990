//! Small numeric building blocks shared by every module: flagged values,
//! probabilities carried together with their complement, and binomials.

use serde::{Deserialize, Serialize};

/// Threshold below which a probability is treated as underflowed when taking
/// its logarithm.
pub const UNDERFLOW: f64 = 1e-300;

/// Why a value could not be computed at face value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// The argument of a logarithm underflowed; the value is `+inf`.
    Underflow,
    /// The evaluation point was clamped into the open interval.
    Boundary,
    /// Both numerator and denominator vanished.
    Indeterminate,
}

/// A real value plus an optional flag explaining why it should not be taken
/// at face value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flagged {
    pub value: f64,
    pub flag: Option<Flag>,
}

impl Flagged {
    pub const fn ok(value: f64) -> Self {
        Flagged { value, flag: None }
    }

    #[allow(clippy::self_named_constructors)]
    pub const fn flagged(value: f64, flag: Flag) -> Self {
        Flagged {
            value,
            flag: Some(flag),
        }
    }

    pub fn is_flagged(&self) -> bool {
        self.flag.is_some()
    }

    /// The value when it is unflagged and finite.
    pub fn usable(&self) -> Option<f64> {
        match self.flag {
            None if self.value.is_finite() => Some(self.value),
            _ => None,
        }
    }

    /// `-ln(v)` with the underflow policy applied.
    pub fn neg_ln(v: f64) -> Self {
        if v < UNDERFLOW {
            Flagged::flagged(f64::INFINITY, Flag::Underflow)
        } else {
            Flagged::ok(-v.ln())
        }
    }
}

impl From<f64> for Flagged {
    fn from(value: f64) -> Self {
        if value.is_finite() {
            Flagged::ok(value)
        } else {
            Flagged::flagged(value, Flag::Indeterminate)
        }
    }
}

/// A probability `p` stored together with `q = 1 - p` and `ln p`, each
/// computed without cancellation from whichever representation is exact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prob {
    pub p: f64,
    pub q: f64,
    pub ln_p: f64,
}

impl Prob {
    pub fn new(p: f64) -> Self {
        let q = 1.0 - p;
        let ln_p = if p > 0.5 { (-q).ln_1p() } else { p.ln() };
        Prob { p, q, ln_p }
    }

    /// From `ln p` (i.e. minus a cumulative hazard).
    pub fn from_ln(ln_p: f64) -> Self {
        Prob {
            p: ln_p.exp(),
            q: -ln_p.exp_m1(),
            ln_p,
        }
    }

    /// From `ln q`, with `p = 1 - q` taken from `expm1`.
    pub fn from_ln_complement(ln_q: f64) -> Self {
        let q = ln_q.exp();
        let p = -ln_q.exp_m1();
        let ln_p = if p > 0.5 { (-q).ln_1p() } else { p.ln() };
        Prob { p, q, ln_p }
    }

    /// From the complement `q = 1 - p`.
    pub fn from_complement(q: f64) -> Self {
        Prob {
            p: 1.0 - q,
            q,
            ln_p: (-q).ln_1p(),
        }
    }
}

/// Binomial coefficient as an exact integer. Panics on overflow, which cannot
/// happen for the dimensions accepted by [`crate::systems::Structure`].
pub fn binomial(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}
