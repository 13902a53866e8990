use crate::copulas::Copula;
use crate::distributions::Distribution;
use crate::error::Result;
use crate::numeric::{Flagged, Prob};

use super::distortion::{build_distortion, Distortion};
use super::structure::Structure;

/// A structure, the survival copula of its components and their common
/// marginal law.
#[derive(Clone, Debug, PartialEq)]
pub struct System {
    structure: Structure,
    distortion: Distortion,
    margin: Distribution,
}

impl System {
    pub fn new(structure: Structure, copula: Copula, margin: Distribution) -> Result<Self> {
        let distortion = build_distortion(&structure, &copula)?;
        Ok(System {
            structure,
            distortion,
            margin,
        })
    }

    /// A system whose distortion was built some other way, e.g. by
    /// [`super::kofn_distortion`]; `structure` must match it.
    pub fn from_parts(structure: Structure, distortion: Distortion, margin: Distribution) -> Self {
        System {
            structure,
            distortion,
            margin,
        }
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn copula(&self) -> &Copula {
        self.distortion.copula()
    }

    pub fn distortion(&self) -> &Distortion {
        &self.distortion
    }

    pub fn margin(&self) -> &Distribution {
        &self.margin
    }

    /// Component survival at `x` as a probability with its complement.
    pub fn component_prob(&self, x: f64) -> Prob {
        Prob::from_ln(-self.margin.cum_hazard_raw(x))
    }

    /// `P(τ > x) = h(F̄(x))`.
    pub fn sf(&self, x: f64) -> f64 {
        self.distortion.at(&self.component_prob(x)).h.clamp(0.0, 1.0)
    }

    /// `-ln h(F̄(x))`.
    pub fn cum_hazard(&self, x: f64) -> Flagged {
        let v = self.distortion.at(&self.component_prob(x));
        if v.h > 0.5 {
            Flagged::ok(-(-v.complement.max(0.0)).ln_1p())
        } else {
            Flagged::neg_ln(v.h)
        }
    }

    /// `-ln(1 - h(F̄(x)))`.
    pub fn cum_rev_hazard(&self, x: f64) -> Flagged {
        let v = self.distortion.at(&self.component_prob(x));
        if v.complement > 0.5 {
            Flagged::ok(-(-v.h.max(0.0)).ln_1p())
        } else {
            Flagged::neg_ln(v.complement)
        }
    }
}
