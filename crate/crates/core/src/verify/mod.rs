//! Reference implementations and checkers used to validate the fast paths
//! and the structural guarantees of the recursion.

mod brute_force;
mod intersection;
mod opt;
mod privacy;
mod sat;

pub use brute_force::{boundary_tightness_failures, brute_force_spf, BRUTE_FORCE_MAX_N};
pub use intersection::{
    grid_min, l2_counterexample_check, lp_ball_counterexample_check, pairwise_vs_total_intersection, BallD,
    IntersectionCheck, GRID_MARGIN, GRID_RESOLUTION,
};
pub use opt::{opt_linf, LatticeValues, OPT_MAX_N};
pub use privacy::{privacy_ratio_audit_pdf, privacy_ratio_audit_tables};
pub use sat::{sat_gadget, sat_gadget_zero_empty, BoolFormula, SatGadget, SAT_MAX_N};
