//! Coherent structures and their dual distortion functions.

mod bernstein;
mod distortion;
mod structure;
mod system;

pub use distortion::{build_distortion, kofn_distortion, Distortion, DistortionValue, ENDPOINT_CLAMP};
pub use structure::{RawStructure, Structure, MAX_COMPONENTS, MAX_PATH_SETS};
pub use system::System;
