//! Grid-based checks of stochastic orders.
//!
//! A verdict of `yes` certifies the relation on the grid at the stated
//! tolerance. It is a numerical certificate, not a proof.

mod grid;
mod identity;
mod monotone;
mod quadrature;
mod relations;

pub use grid::{Grid, GridPolicy, DEFAULT_GRID_SIZE};
pub use identity::{integral_identity_check, IdentityReport};
pub use monotone::{
    check_monotone, sign_change_count, Direction, Holds, MonotoneReport, SignChanges, Witness,
};
pub use quadrature::integrate;
pub use relations::{check_order, system_order_direct, OrderVerdict, Relation};
