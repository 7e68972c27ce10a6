//! The two-point blow-up system
//!
//! ```text
//! G_z(a) + G_z(b) = 0,   wp'(a) + wp'(b) = 0,   a ∉ {-a, ±b}
//! ```
//!
//! `partners` solves the second equation for `b` given `a`, `branch` follows
//! the two non-trivial partner branches along the right edge of a rectangular
//! cell, `search` scans the cell for solutions of the full system and
//! `exclusion` checks the axis and sign arguments that confine solutions.

pub mod branch;
pub mod exclusion;
pub mod partners;
pub mod search;

pub use branch::{
    branch_derivative, branch_point, count_h_zeros, h_and_hprime, thresholds, thresholds_from,
    trace_branch, BranchId, BranchPath, BranchSample, HZeroCount, Thresholds,
};
pub use exclusion::{
    axis_exclusion_check, axis_exclusion_check_with, wp_prime_level_points, ExclusionReport,
    ExclusionSizes, PairSample,
};
pub use partners::{
    classify_degeneracy, conjugate_wp_values, partner_points, residuals, Degeneracy, PartnerSet,
    Residuals,
};
pub use search::{
    exclusion_distance, scan_rhombus_threshold, solve_pair_system, LandscapeCell, PairReport,
    PairStatus, PolishOutcome, PolishedCandidate, ScanPoint, SearchParams, SolvedPair,
    ThresholdReport, THRESHOLD_RESOLUTION,
};
