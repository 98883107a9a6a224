//! Experiment drivers built from models and dynamics.

mod collapse;
mod filter;
mod fock_prep;
mod landscape;

pub use collapse::{run_collapse_revival, CollapseRevivalPlan, CollapseRevivalReport, Window};
pub use filter::{
    find_barrier, run_filter_analysis, run_leakage_control, FilterOptions, FilterReport,
    PhononSnapshot, SNAP_TOL,
};
pub use fock_prep::{run_fock_prep, FockPrepPlan, FockPrepResult};
pub use landscape::{f1_landscape, Landscape, LANDSCAPE_FLOOR};

use std::f64::consts::TAU;

/// Convert a duration in units of `2π/g` to model time.
pub fn periods_to_time(periods: f64, g: f64) -> f64 {
    periods * TAU / g
}
