//! The traced simulation behind the mixing lower bound: per-tile visit
//! times of the hole, the column walk each tile performs, the cosine
//! statistic and its sampling reference, and the coupled-holes verifier.

mod concentration;
mod coupling;
mod params;
mod stats;
mod trace;

pub use concentration::{concentration_checkpoints, count_concentration, CheckpointStats, ConcentrationReport};
pub use coupling::{
    coupled_holes, step_index, CoupledHoles, CoupledRun, CouplingTable, CouplingVariant, LAZY_STEP_LAW,
};
pub use params::{choose_parameters, column_cosine, mu, start_configuration, ExperimentParams};
pub use stats::{binomial_two_sided, chi_square_test, hoeffding_bound, reference_statistic_w, tv_separation, TvEstimate};
pub use trace::{
    lazy_hole_step, multiplier_slope, run_traced_loyd, s_walk_extract, wilson_statistic, z_statistic,
    CountSnapshot, TileTrace, TracedRun,
};
