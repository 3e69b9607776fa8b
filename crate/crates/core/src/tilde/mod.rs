//! The walk of the hole relative to a fixed tile, its heat kernel and
//! conductance profile, and the exact hitting probabilities for simple
//! random walk on Z^2 used alongside it.

mod appendix;
mod banded;
mod conductance;
mod graph;

pub use appendix::{
    exit_side_exact, gambler_ruin_exact, gambler_ruin_strip, martingale_check, ExitSide, MartingaleCheck,
    MartingalePoint, StripSolve,
};
pub use banded::BandedSystem;
pub use conductance::{
    annealed_profile, conductance_profile, hk2_sufficient_time, profile_integral, set_conductance,
    uniform_relative_error, ConductanceMethod, ConductanceProfile,
};
pub use graph::{heat_kernel_curve, heat_kernel_row, relative_walk_equivalence, HeatKernelCurve, RelativeWalkReport, TildeGraph};
