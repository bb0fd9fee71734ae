//! Curvature of left-invariant metrics.
//!
//! The Koszul connection is the reference computation; the moment-map and
//! Killing-field formulas are checked against it.

mod koszul;
mod moment;
mod variation;
mod volume;

pub use koszul::{koszul_connection, ricci_endomorphism, ricci_via_killing, ConnectionTable, CurvatureReport};
pub use moment::{bracket_inner_product, moment_map_ricci, tau_action};
pub use variation::{ric_variation_check, scal_variation_check, variation_curve, VariationCheck, FD_STEP};
pub use volume::{beta_eigenbasis, beta_volume, triangular_log_diagonal};

pub use crate::metric::rho_action;
