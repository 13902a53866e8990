//! Certification of relative-ageing relations between coherent systems with
//! dependent, identically distributed components.
//!
//! A system's survival is `h(F̄(x))`, where the dual distortion `h` depends
//! only on the structure and the survival copula of the components. The
//! crate builds `h`, checks ageing-faster orders in the cumulative hazard and
//! the cumulative reversed hazard on grids, assembles sufficient conditions
//! for those orders into certification reports, and cross-checks everything
//! by Monte Carlo.
//!
//! Every "yes" produced here is a numerical certificate on a finite grid at a
//! stated tolerance, not a symbolic proof.

pub mod copulas;
pub mod distributions;
mod error;
pub mod montecarlo;
pub mod numeric;
pub mod orders;
pub mod systems;
pub mod tables;
pub mod verifier;

pub use copulas::{Copula, CopulaFamily};
pub use distributions::Distribution;
pub use error::{Error, Result};
pub use numeric::{Flag, Flagged, Prob};
pub use systems::{build_distortion, kofn_distortion, Distortion, Structure, System};
